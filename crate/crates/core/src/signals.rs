//! Simple admissible test inputs: on-off keying and equally spaced amplitude levels.

use crate::channel::ChannelSpec;
use crate::dist::DiscreteDist;
use crate::error::{Error, Result};

/// On-off keying `{0, 1}` with `P(1) = alpha_n`; admissible for bounded cost
/// on a spec with nonincreasing ratios.
pub fn ook_bc(spec: &ChannelSpec) -> Result<DiscreteDist> {
    let p = spec.alpha()[spec.n() - 1];
    DiscreteDist::from_atoms(&[(0.0, 1.0 - p), (1.0, p)])
}

/// On-off keying `{0, c}` with mean `h . alpha` and the largest admissible `c`
/// under equal cost.
///
/// With `m = h . alpha` the prefix condition at `H_[k]` reads
/// `m (1 - H_[k] / c) <= C_k`, hence `c <= m H_[k] / (m - C_k)` whenever `C_k < m`.
pub fn ook_ec(spec: &ChannelSpec) -> Result<DiscreteDist> {
    let m = spec.mean_intensity();
    if m <= 0.0 {
        return DiscreteDist::point(0.0);
    }
    let mut c: f64 = 1.0;
    for k in 1..spec.n() {
        let cap = spec.cap(k);
        if cap < m {
            c = c.min(m * spec.cum(k) / (m - cap));
        }
    }
    let c = c.max(m);
    if c <= m {
        return DiscreteDist::point(m);
    }
    DiscreteDist::from_atoms(&[(0.0, 1.0 - m / c), (c, m / c)])
}

/// Equiprobable law on `{0, d, 2d, ..., (L-1) d}`.
pub fn equispaced(levels: usize, spacing: f64) -> Result<DiscreteDist> {
    if levels < 2 {
        return Err(Error::Domain("need at least two levels".into()));
    }
    let p = 1.0 / levels as f64;
    let atoms: Vec<(f64, f64)> = (0..levels).map(|i| (i as f64 * spacing, p)).collect();
    DiscreteDist::from_atoms(&atoms)
}

/// Largest spacing for which the equiprobable `levels`-point law is admissible
/// under bounded cost.
pub fn max_ask_spacing(spec: &ChannelSpec, levels: usize) -> Result<f64> {
    if levels < 2 {
        return Err(Error::Domain("need at least two levels".into()));
    }
    let l = levels as f64;
    let top = (levels - 1) as f64;
    // mean (L-1) d / 2 <= h . alpha, and the support must stay in [0, 1]
    let mut best = (1.0 / top).min(2.0 * spec.mean_intensity() / top);
    for k in 1..spec.n() {
        let t = spec.cum(k);
        let cap = spec.cap(k);
        // pi(t) = (1/L) sum_{i d > t} (i d - t) is increasing and piecewise linear in d;
        // with the top r levels above t it equals (d S_r - r t) / L, S_r = sum of those i.
        for r in 1..levels {
            let first = levels - r;
            let sum_i: f64 = (first..levels).map(|i| i as f64).sum();
            let d = (l * cap + r as f64 * t) / sum_i;
            let above = first as f64 * d > t;
            let below = first == 1 || (first - 1) as f64 * d <= t;
            if above && below {
                best = best.min(d);
                break;
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::Distribution;
    use crate::feasibility::{check_bc, check_ec};

    #[test]
    fn physical_ook() {
        let spec = ChannelSpec::new(vec![0.4, 0.6], vec![0.4, 0.1], 1.0).unwrap();
        let d = ook_bc(&spec).unwrap();
        assert_eq!(d.support(), &[0.0, 1.0]);
        assert!((d.mean() - 0.1).abs() < 1e-15);
        assert!(check_bc(&d, &spec).feasible);
    }

    #[test]
    fn ec_ook_is_tight() {
        let spec = ChannelSpec::new(vec![0.4, 0.2, 0.4], vec![0.8, 0.3, 0.1], 1.0).unwrap();
        let d = ook_ec(&spec).unwrap();
        let r = check_ec(&d, &spec);
        assert!(r.feasible);
        assert!(r.slack.iter().any(|s| s.abs() < 1e-12));
    }

    #[test]
    fn physical_ask_spacing() {
        let spec = ChannelSpec::new(vec![0.4, 0.6], vec![0.4, 0.1], 1.0).unwrap();
        let d = max_ask_spacing(&spec, 8).unwrap();
        assert!((d - 0.22 / 3.5).abs() < 1e-12);
        assert!(check_bc(&equispaced(8, d).unwrap(), &spec).feasible);
    }
}
