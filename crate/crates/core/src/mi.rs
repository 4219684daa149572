//! Mutual information `I(S; S + Z)` with Gaussian `Z`, evaluated by quadrature
//! over the output.

use crate::dist::{BoundedDist, DiscreteDist, Distribution, PiecewiseExpDist};
use crate::error::{Error, Result};
use crate::quadrature;
use crate::special::{ln_normal_interval, log_sum_exp, LN_SQRT_2PI};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MIResult {
    /// Nats.
    pub value: f64,
    pub estimated_error: f64,
}

/// `ln f_Y(y) + (y - m)^2 / (2 sigma^2) + ln(sigma sqrt(2 pi))`: the output log-density
/// relative to a Gaussian of the same mean `m`.
fn ln_ratio_discrete(d: &DiscreteDist, sigma: f64, m: f64, y: f64) -> f64 {
    let s2 = 2.0 * sigma * sigma;
    let terms: Vec<f64> = d
        .atoms()
        .map(|(x, p)| p.ln() - (m - x) * (2.0 * y - x - m) / s2)
        .collect();
    log_sum_exp(&terms)
}

fn ln_density_pwexp(d: &PiecewiseExpDist, sigma: f64, y: f64) -> f64 {
    let terms: Vec<f64> = d
        .segments()
        .iter()
        .map(|seg| {
            // complete the square in the segment's exponential times the kernel
            let c = seg.slope;
            let mu = y + c * sigma * sigma;
            seg.log_start
                + c * (y - seg.start)
                + 0.5 * c * c * sigma * sigma
                + ln_normal_interval((seg.start - mu) / sigma, (seg.end - mu) / sigma)
        })
        .collect();
    log_sum_exp(&terms)
}

fn ln_output_density(s: &BoundedDist, sigma: f64, y: f64) -> f64 {
    match s {
        BoundedDist::Discrete(d) => {
            let m = d.mean();
            ln_ratio_discrete(d, sigma, m, y) - (y - m).powi(2) / (2.0 * sigma * sigma) - LN_SQRT_2PI - sigma.ln()
        }
        BoundedDist::PiecewiseExp(d) => ln_density_pwexp(d, sigma, y),
    }
}

/// Output density `f_Y(y) = E[phi_sigma(y - S)]`.
pub fn output_density(s: &BoundedDist, sigma: f64, y: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::Domain(format!("sigma must be positive, got {sigma}")));
    }
    Ok(ln_output_density(s, sigma, y).exp())
}

fn feature_points(s: &BoundedDist) -> Vec<f64> {
    match s {
        BoundedDist::Discrete(d) => d.support().to_vec(),
        BoundedDist::PiecewiseExp(d) => d.breakpoints().to_vec(),
    }
}

/// `I(S; S + Z)` in nats.
///
/// Computed as `h(Y) - 1/2 ln(2 pi e sigma^2)`. When `Var(S) <= 2 sigma^2` the
/// equivalent form `Var(S) / (2 sigma^2) - D(f_Y || N(E[S], sigma^2))` is used
/// instead, which keeps precision at low SNR.
pub fn mutual_info(s: &BoundedDist, sigma: f64) -> Result<MIResult> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::Domain(format!("sigma must be positive, got {sigma}")));
    }
    let m = s.mean();
    let var = s.variance();
    let s2 = 2.0 * sigma * sigma;
    let ln_ratio = |y: f64| -> f64 {
        match s {
            BoundedDist::Discrete(d) => ln_ratio_discrete(d, sigma, m, y),
            BoundedDist::PiecewiseExp(d) => {
                ln_density_pwexp(d, sigma, y) + (y - m).powi(2) / s2 + LN_SQRT_2PI + sigma.ln()
            }
        }
    };
    let mut points = Vec::new();
    for x in feature_points(s) {
        for k in [0.0, 1.0, 2.0, 4.0, 6.0, 8.0, 10.0] {
            points.push(x - k * sigma);
            points.push(x + k * sigma);
        }
    }
    let (lo, hi) = (-10.0 * sigma, 1.0 + 10.0 * sigma);
    points.retain(|p| (lo..=hi).contains(p));
    points.extend([lo, hi]);
    points.sort_by(f64::total_cmp);
    points.dedup_by(|a, b| (*a - *b).abs() < 1e-15);

    let snr = var / s2;
    let tol = 1e-12 * (1.0 + snr);
    let info = if snr <= 1.0 {
        let kl = quadrature::integrate_panels(
            |y| {
                let r = ln_ratio(y);
                let f = (r - (y - m).powi(2) / s2 - LN_SQRT_2PI - sigma.ln()).exp();
                if f == 0.0 {
                    0.0
                } else {
                    f * r
                }
            },
            &points,
            tol,
        );
        quadrature::Estimate {
            value: snr - kl.value,
            error: kl.error,
        }
    } else {
        // away from low SNR the output entropy is integrated directly
        let h = quadrature::integrate_panels(
            |y| {
                let ln_f = ln_output_density(s, sigma, y);
                let f = ln_f.exp();
                if f == 0.0 {
                    0.0
                } else {
                    -f * ln_f
                }
            },
            &points,
            1e-10,
        );
        quadrature::Estimate {
            value: h.value - 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E * sigma * sigma).ln(),
            error: h.error,
        }
    };
    let mass = quadrature::integrate_panels(|y| ln_output_density(s, sigma, y).exp(), &points, 1e-10);
    let tail = (1.0 - mass.value).abs();
    if tail > 1e-8 {
        return Err(Error::NonConvergence {
            iterations: 0,
            residual: tail,
        });
    }
    let value = info.value;
    // tails beyond ten noise deviations carry < 1e-22 of the mass
    let estimated_error = info.error + mass.error + tail * (1.0 + snr);
    Ok(MIResult {
        value,
        estimated_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binary() -> BoundedDist {
        DiscreteDist::new(vec![0.0, 1.0], vec![0.5, 0.5]).unwrap().into()
    }

    #[test]
    fn point_mass_has_zero_information() {
        let d: BoundedDist = DiscreteDist::point(0.3).unwrap().into();
        let r = mutual_info(&d, 0.1).unwrap();
        assert!(r.value.abs() < 1e-12);
        let sigma = 0.2;
        let y = 0.45;
        let want = (-(y - 0.3f64).powi(2) / (2.0 * sigma * sigma)).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt());
        assert!((output_density(&d, sigma, y).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn binary_limits() {
        let r = mutual_info(&binary(), 0.01).unwrap();
        assert!((r.value - 2f64.ln()).abs() < 1e-6);
        let sigma = 100.0;
        let r = mutual_info(&binary(), sigma).unwrap();
        let slope = 1.0 / (8.0 * sigma * sigma);
        assert!((r.value / slope - 1.0).abs() < 0.05);
    }

    #[test]
    fn output_density_symmetry_and_mass() {
        let d = binary();
        for t in [0.1, 0.4, 1.3] {
            let a = output_density(&d, 0.3, 0.5 - t).unwrap();
            let b = output_density(&d, 0.3, 0.5 + t).unwrap();
            assert!((a - b).abs() < 1e-15);
        }
        let p: BoundedDist = PiecewiseExpDist::normalized(vec![0.0, 0.4, 1.0], vec![4.27, 0.0]).unwrap().into();
        for sigma in [1e-3, 0.05, 1.0] {
            let e = quadrature::integrate_panels(
                |y| output_density(&p, sigma, y).unwrap(),
                &[-12.0 * sigma, 0.0, 0.4, 1.0, 1.0 + 12.0 * sigma],
                1e-12,
            );
            assert!((e.value - 1.0).abs() < 1e-7, "sigma={sigma}");
        }
    }

    #[test]
    fn pwexp_density_matches_direct_convolution() {
        let d = PiecewiseExpDist::normalized(vec![0.0, 0.4, 0.6, 1.0], vec![-2.9, 6.6, 0.0]).unwrap();
        let b: BoundedDist = d.clone().into();
        let sigma = 0.07;
        for y in [-0.1, 0.2, 0.4, 0.75, 1.05] {
            let direct = quadrature::integrate_panels(
                |s| {
                    d.density(s) * (-(y - s).powi(2) / (2.0 * sigma * sigma)).exp()
                        / (sigma * (2.0 * std::f64::consts::PI).sqrt())
                },
                &[0.0, 0.4, 0.6, 1.0],
                1e-14,
            );
            let f = output_density(&b, sigma, y).unwrap();
            assert!((f / direct.value - 1.0).abs() < 1e-8, "y={y}");
        }
    }
}
