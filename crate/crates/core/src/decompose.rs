//! Greedy decomposition of a feasible equivalent input into comonotonic
//! per-antenna intensities.

use crate::channel::{canonicalize, sort_and_merge, ChannelSpec, Kind, Reduction};
use crate::config::Tolerances;
use crate::dist::{BoundedDist, Distribution};
use crate::error::{Error, Result};
use crate::feasibility::{bc_allocation, check_ec_with, Allocation};
use crate::intervals::IntervalSet;
use serde::{Deserialize, Serialize};

// Blocks of already assigned intervals closer than this count as abutting.
const ABUT_GAP: f64 = 1e-13;

/// Clip-and-shift map: `s` below `v`, flat at `v` on `(v, v + z]`, `s - z` above.
pub fn phi(s: f64, v: f64, z: f64) -> Result<f64> {
    const SLACK: f64 = 1e-12;
    if !(-SLACK..=1.0 + SLACK).contains(&s) {
        return Err(Error::Domain(format!("phi argument {s} outside [0, 1]")));
    }
    if !(0.0..=1.0).contains(&v) || z < 0.0 || v + z > 1.0 + SLACK {
        return Err(Error::Domain(format!("invalid phi parameters v={v}, z={z}")));
    }
    Ok(phi_unchecked(s, v, z))
}

#[inline]
fn phi_unchecked(s: f64, v: f64, z: f64) -> f64 {
    if s <= v {
        s
    } else if s <= v + z {
        v
    } else {
        s - z
    }
}

/// Thresholds `kappa_k` and the sets `P_k` of the interval partition of `[0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionPlan {
    pub kappa: Vec<f64>,
    pub sets: Vec<IntervalSet>,
}

impl PartitionPlan {
    pub fn n(&self) -> usize {
        self.kappa.len()
    }

    /// `E[x_k(S)]` in closed form from the stop-loss transform of `S`.
    pub fn expected_intensity<D: Distribution + ?Sized>(&self, s: &D, spec: &ChannelSpec) -> Vec<f64> {
        self.sets
            .iter()
            .zip(spec.h())
            .map(|(set, h)| {
                set.intervals()
                    .iter()
                    .map(|&[a, b]| s.stop_loss(a) - s.stop_loss(b))
                    .sum::<f64>()
                    / h
            })
            .collect()
    }
}

/// Builds the partition plan for an equal-cost feasible input.
///
/// `spec` must have nonincreasing ratios. Among non-unique thresholds the
/// smallest one is returned.
pub fn solve_partition<D: Distribution + ?Sized>(s: &D, spec: &ChannelSpec) -> Result<PartitionPlan> {
    solve_partition_with(s, spec, &Tolerances::default())
}

pub fn solve_partition_with<D: Distribution + ?Sized>(
    s: &D,
    spec: &ChannelSpec,
    tol: &Tolerances,
) -> Result<PartitionPlan> {
    if spec.alpha().windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::InvalidChannel {
            field: "alpha",
            reason: "ratios must be sorted in nonincreasing order".into(),
        });
    }
    let rep = check_ec_with(s, spec, tol);
    if !rep.feasible {
        return Err(Error::Infeasible(format!(
            "equal-cost check failed (mean residual {:e}, min slack {:e})",
            rep.mean_residual,
            rep.min_slack()
        )));
    }
    let n = spec.n();
    let mut kappa = vec![0.0; n];
    let mut sets = vec![IntervalSet::empty(); n];
    let mut taken = IntervalSet::empty();
    let mut ceiling: f64 = 1.0;
    for j in (1..n).rev() {
        let hj = spec.h()[j];
        let target = hj * spec.alpha()[j];
        let upper = ceiling.min(spec.cum(j));
        let g = |k: f64| -> f64 {
            let eta = taken.skip_forward(k, hj, ABUT_GAP);
            let skipped: f64 = taken
                .intervals()
                .iter()
                .filter(|iv| iv[0] >= k && iv[1] <= eta + ABUT_GAP)
                .map(|&[a, b]| s.stop_loss(a) - s.stop_loss(b))
                .sum();
            s.stop_loss(k) - s.stop_loss(eta) - skipped - target
        };
        let k = smallest_root(&g, upper, tol)?;
        let eta = taken.skip_forward(k, hj, ABUT_GAP).min(1.0);
        let set = IntervalSet::interval(k, eta).difference(&taken);
        taken = taken.union(&set);
        kappa[j] = k;
        sets[j] = set;
        ceiling = k;
    }
    sets[0] = IntervalSet::interval(0.0, 1.0).difference(&taken);
    Ok(PartitionPlan { kappa, sets })
}

/// Smallest point of `[0, upper]` where the nonincreasing `g` drops to zero.
fn smallest_root<G: Fn(f64) -> f64>(g: &G, upper: f64, tol: &Tolerances) -> Result<f64> {
    if g(0.0) <= 0.0 {
        return Ok(0.0);
    }
    let cells = tol.scan_cells.max(1);
    let mut lo = 0.0;
    let mut hi = None;
    for i in 1..=cells {
        let x = upper * i as f64 / cells as f64;
        if g(x) <= 0.0 {
            hi = Some(x);
            break;
        }
        lo = x;
    }
    let Some(mut hi) = hi else {
        let residual = g(upper);
        if residual <= tol.feasibility {
            return Ok(upper);
        }
        return Err(Error::Internal(format!(
            "no threshold in [0, {upper}] (residual {residual:e})"
        )));
    };
    while hi - lo > tol.root {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Normalized intensities `x_k = mu(P_k ∩ [0, s]) / h_k`.
pub fn decompose_partition(plan: &PartitionPlan, spec: &ChannelSpec, s: f64) -> Vec<f64> {
    let s = s.clamp(0.0, 1.0);
    plan.sets
        .iter()
        .zip(plan.kappa.iter().zip(spec.h()))
        .map(|(set, (&k, &h))| {
            if s <= k {
                0.0
            } else {
                (set.measure_below(s) / h).clamp(0.0, 1.0)
            }
        })
        .collect()
}

/// Peels antennas off from the last one using the clip-and-shift map on the residual.
pub fn decompose_iterative(plan: &PartitionPlan, spec: &ChannelSpec, s: f64) -> Vec<f64> {
    let n = spec.n();
    let mut x = vec![0.0; n];
    let mut r = s.clamp(0.0, 1.0);
    for k in (0..n).rev() {
        let h = spec.h()[k];
        let next = phi_unchecked(r, plan.kappa[k], h);
        x[k] = ((r - next) / h).clamp(0.0, 1.0);
        r = next;
    }
    x
}

/// Bounded-cost decomposition: allocation, plan and intensities for one value `s`.
pub fn decompose_bc<D: Distribution + ?Sized>(d: &D, spec: &ChannelSpec, s: f64) -> Result<Vec<f64>> {
    let (_, plan, eff) = plan_bc(d, spec)?;
    Ok(decompose_partition(&plan, &eff, s))
}

/// Allocation, plan and the effective equal-cost spec `(h, a)` for a bounded-cost input.
pub fn plan_bc<D: Distribution + ?Sized>(
    d: &D,
    spec: &ChannelSpec,
) -> Result<(Allocation, PartitionPlan, ChannelSpec)> {
    let alloc = bc_allocation(d, spec)?;
    let eff = spec.with_alpha(alloc.a.clone())?;
    let plan = solve_partition(d, &eff)?;
    Ok((alloc, plan, eff))
}

/// Per-realization signaling for an arbitrary (non-canonical) channel.
#[derive(Debug, Clone)]
pub struct Signaler {
    spec: ChannelSpec,
    reduction: Reduction,
    plan: PartitionPlan,
    allocation: Option<Allocation>,
    peaks: Option<Vec<f64>>,
}

/// Intensities for one realization of the equivalent input.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Signal {
    pub s: f64,
    /// Normalized intensities of the original antennas.
    pub x: Vec<f64>,
    /// Physical intensities `A_k x_k` when peaks were supplied.
    pub raw: Option<Vec<f64>>,
}

impl Signaler {
    /// Reduces the channel, checks feasibility of `d` and solves the partition.
    pub fn new(spec: &ChannelSpec, kind: Kind, d: &BoundedDist, peaks: Option<Vec<f64>>) -> Result<Self> {
        if let Some(p) = &peaks {
            if p.len() != spec.n() {
                return Err(Error::InvalidChannel {
                    field: "peaks",
                    reason: format!("expected {} entries, found {}", spec.n(), p.len()),
                });
            }
        }
        match kind {
            Kind::Ec => {
                let (canon, reduction) = canonicalize(spec, Kind::Ec);
                let law = if reduction.flipped { d.reflect() } else { d.clone() };
                let plan = solve_partition(&law, &canon)?;
                Ok(Self {
                    spec: canon,
                    reduction,
                    plan,
                    allocation: None,
                    peaks,
                })
            }
            Kind::Bc => {
                let (merged, reduction) = sort_and_merge(spec);
                let (alloc, plan, eff) = plan_bc(d, &merged)?;
                Ok(Self {
                    spec: eff,
                    reduction,
                    plan,
                    allocation: Some(alloc),
                    peaks,
                })
            }
        }
    }

    pub fn plan(&self) -> &PartitionPlan {
        &self.plan
    }

    /// The reduced spec the plan was built on (ratios replaced by the allocation for BC).
    pub fn spec(&self) -> &ChannelSpec {
        &self.spec
    }

    pub fn reduction(&self) -> &Reduction {
        &self.reduction
    }

    pub fn allocation(&self) -> Option<&Allocation> {
        self.allocation.as_ref()
    }

    pub fn signal(&self, s: f64) -> Result<Signal> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::Domain(format!("input value {s} outside [0, 1]")));
        }
        let sc = self.reduction.to_canonical_input(s);
        let xc = decompose_partition(&self.plan, &self.spec, sc);
        let x = self.reduction.expand(&xc);
        let raw = self
            .peaks
            .as_ref()
            .map(|p| x.iter().zip(p).map(|(x, a)| x * a).collect());
        Ok(Signal { s, x, raw })
    }
}
