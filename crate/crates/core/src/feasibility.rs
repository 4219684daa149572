//! Decomposability certificates for the equivalent input and the bounded-cost
//! intensity allocation.

use crate::channel::ChannelSpec;
use crate::config::Tolerances;
use crate::dist::{maximally_convex, Distribution};
use crate::error::{Error, Result};
use serde::Serialize;

/// Outcome of a feasibility check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub feasible: bool,
    /// `E[S] - h . alpha`.
    pub mean_residual: f64,
    /// `slack[k-1] = (1 - H_[k]) abar_k - pi_S(H_[k])` for `k = 1..n-1`.
    pub slack: Vec<f64>,
}

impl FeasibilityReport {
    pub fn min_slack(&self) -> f64 {
        self.slack.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn slacks<D: Distribution + ?Sized>(s: &D, spec: &ChannelSpec) -> Vec<f64> {
    (1..spec.n())
        .map(|k| spec.cap(k) - s.stop_loss(spec.cum(k)))
        .collect()
}

fn report<D: Distribution + ?Sized>(
    s: &D,
    spec: &ChannelSpec,
    tol: &Tolerances,
    mean_ok: impl Fn(f64) -> bool,
) -> FeasibilityReport {
    let mean_residual = s.mean() - spec.mean_intensity();
    let slack = slacks(s, spec);
    let feasible = mean_ok(mean_residual) && slack.iter().all(|&x| x >= -tol.feasibility);
    FeasibilityReport {
        feasible,
        mean_residual,
        slack,
    }
}

/// Equal-cost test on a spec with nonincreasing ratios.
pub fn check_ec<D: Distribution + ?Sized>(s: &D, spec: &ChannelSpec) -> FeasibilityReport {
    check_ec_with(s, spec, &Tolerances::default())
}

pub fn check_ec_with<D: Distribution + ?Sized>(
    s: &D,
    spec: &ChannelSpec,
    tol: &Tolerances,
) -> FeasibilityReport {
    report(s, spec, tol, |r| r.abs() <= tol.equality)
}

/// Bounded-cost test on a spec with nonincreasing ratios.
pub fn check_bc<D: Distribution + ?Sized>(s: &D, spec: &ChannelSpec) -> FeasibilityReport {
    check_bc_with(s, spec, &Tolerances::default())
}

pub fn check_bc_with<D: Distribution + ?Sized>(
    s: &D,
    spec: &ChannelSpec,
    tol: &Tolerances,
) -> FeasibilityReport {
    report(s, spec, tol, |r| r <= tol.equality)
}

/// Diagnostic over every index subset `J`: `pi_S(sum_{k in J} h_k) <= sum_{k not in J} h_k alpha_k`.
///
/// Exponential in `n`; refuses more than 20 antennas.
pub fn check_all_subsets<D: Distribution + ?Sized>(s: &D, spec: &ChannelSpec) -> Result<bool> {
    let n = spec.n();
    if n > 20 {
        return Err(Error::Domain("subset diagnostic limited to 20 antennas".into()));
    }
    let tol = Tolerances::default().feasibility;
    for mask in 1u32..(1 << n) - 1 {
        let mut inside = 0.0;
        let mut outside = 0.0;
        for k in 0..n {
            if mask & (1 << k) != 0 {
                inside += spec.h()[k];
            } else {
                outside += spec.h()[k] * spec.alpha()[k];
            }
        }
        if s.stop_loss(inside) > outside + tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Compares `pi_S` with the stop-loss transform of the maximally convex law on a
/// uniform grid of `grid` points together with every breakpoint `H_[k]`.
pub fn convex_order_dominates<D: Distribution + ?Sized>(
    s: &D,
    spec: &ChannelSpec,
    grid: usize,
) -> Result<bool> {
    let tol = Tolerances::default();
    let target = spec.mean_intensity();
    let mean = s.mean();
    if (mean - target).abs() > tol.equality {
        return Err(Error::MeanMismatch { mean, target });
    }
    let top = maximally_convex(spec)?;
    let uniform = (0..grid).map(|i| {
        if grid == 1 {
            0.0
        } else {
            i as f64 / (grid - 1) as f64
        }
    });
    let ok = uniform
        .chain(spec.cums().iter().copied())
        .all(|t| s.stop_loss(t) <= top.stop_loss(t) + tol.feasibility);
    Ok(ok)
}

/// Per-antenna average intensities `a = min(beta 1, alpha)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Allocation {
    pub a: Vec<f64>,
    pub beta: f64,
}

/// The allocation `min(beta 1, alpha)` whose mean `h . a` equals `E[S]`.
pub fn bc_allocation<D: Distribution + ?Sized>(s: &D, spec: &ChannelSpec) -> Result<Allocation> {
    let rep = check_bc(s, spec);
    if !rep.feasible {
        return Err(Error::Infeasible(format!(
            "bounded-cost check failed (mean residual {:e}, min slack {:e})",
            rep.mean_residual,
            rep.min_slack()
        )));
    }
    let target = s.mean().max(0.0);
    let n = spec.n();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| spec.alpha()[j].total_cmp(&spec.alpha()[i]));
    let sorted: Vec<f64> = order.iter().map(|&i| spec.alpha()[i]).collect();
    // On [alpha_(k+1), alpha_(k)] the map is beta * G_k + C_k with G_k the gain of the
    // k largest ratios and C_k the mean carried by the rest.
    let mut gain_top = vec![0.0; n + 1];
    let mut carried = vec![0.0; n + 1];
    for k in 0..n {
        gain_top[k + 1] = gain_top[k] + spec.h()[order[k]];
    }
    for k in (0..n).rev() {
        carried[k] = carried[k + 1] + spec.h()[order[k]] * sorted[k];
    }
    let mut beta = sorted[0];
    for k in (1..=n).rev() {
        let lo = if k == n { 0.0 } else { sorted[k] };
        let hi = sorted[k - 1];
        if target <= hi * gain_top[k] + carried[k] {
            beta = ((target - carried[k]) / gain_top[k]).clamp(lo, hi);
            break;
        }
    }
    let a = spec.alpha().iter().map(|&x| x.min(beta)).collect();
    Ok(Allocation { a, beta })
}
