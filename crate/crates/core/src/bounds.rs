//! Capacity lower and upper bounds and their asymptotes.

use crate::channel::{canonicalize, ChannelSpec, Kind};
use crate::error::{Error, Result};
use crate::maxent::{solve_gamma, MaxEntSolution};
use crate::special::{ln_segment_mass, log_add_exp, log_sum_exp, q_function, std_normal_pdf};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{E, PI};

/// All bounds at one noise level, in nats.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundsReport {
    pub sigma: f64,
    pub lower_epi: f64,
    pub upper_maxvar: f64,
    pub upper_duality: f64,
    pub best_lower: f64,
    pub best_upper: f64,
    pub gap: f64,
}

/// Free parameters of the duality bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityParams {
    pub delta: f64,
    pub lambdas: Vec<f64>,
}

/// Log-spaced noise levels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub points: usize,
    pub kind: Kind,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_min > 0.0 && self.sigma_min < self.sigma_max && self.sigma_max.is_finite()) {
            return Err(Error::Domain(format!(
                "need 0 < sigma_min < sigma_max, got {} and {}",
                self.sigma_min, self.sigma_max
            )));
        }
        if self.points < 2 {
            return Err(Error::Domain("a sweep needs at least 2 points".into()));
        }
        Ok(())
    }

    pub fn sigmas(&self) -> Vec<f64> {
        log_grid(self.sigma_min, self.sigma_max, self.points)
    }
}

fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| {
            if i + 1 == points {
                hi
            } else {
                (a + (b - a) * i as f64 / (points - 1) as f64).exp()
            }
        })
        .collect()
}

/// `1/2 ln(1 + e^{2 gamma} / (2 pi e sigma^2))`.
pub fn epi_bound(gamma: f64, sigma: f64) -> f64 {
    let ln_ratio = 2.0 * gamma - (2.0 * PI * E).ln() - 2.0 * sigma.ln();
    0.5 * log_add_exp(0.0, ln_ratio)
}

/// Entropy-power lower bound; the spec is canonicalized first.
pub fn lower_epi(spec: &ChannelSpec, sigma: f64, kind: Kind) -> Result<f64> {
    let (canon, _) = canonicalize(spec, kind);
    let sol = solve_gamma(&canon, kind)?;
    Ok(epi_bound(sol.gamma, sigma))
}

/// `sum_ij h_i h_j (min(a_i, a_j) - a_i a_j)`.
fn comonotone_variance(h: &[f64], a: &[f64]) -> f64 {
    let mut v = 0.0;
    for i in 0..h.len() {
        for j in 0..h.len() {
            v += h[i] * h[j] * (a[i].min(a[j]) - a[i] * a[j]);
        }
    }
    v
}

/// Largest variance of an admissible equivalent input on a canonical spec.
pub fn v_max_canonical(spec: &ChannelSpec, kind: Kind) -> f64 {
    match kind {
        Kind::Ec => comonotone_variance(spec.h(), spec.alpha()),
        Kind::Bc => {
            let beta = optimal_beta(spec);
            let alpha = spec.alpha();
            let k = alpha.iter().filter(|&&a| a >= beta).count();
            let hk = spec.cum(k);
            let rest = comonotone_variance(&spec.h()[k..], &alpha[k..]);
            hk * hk * beta * (1.0 - beta) + 2.0 * hk * spec.cap(k) * (1.0 - beta) + rest
        }
    }
}

/// Infimum of the ratios where the bounded-cost variance stops increasing.
pub fn optimal_beta(spec: &ChannelSpec) -> f64 {
    let n = spec.n();
    let alpha = spec.alpha();
    for k in (1..n).rev() {
        let hk = spec.cum(k);
        let root = 0.5 - spec.cap(k) / hk;
        if root <= alpha[k] {
            return alpha[k];
        }
        if root <= alpha[k - 1] {
            return root;
        }
    }
    alpha[0]
}

/// Maximum variance for the (canonicalized) spec.
pub fn v_max(spec: &ChannelSpec, kind: Kind) -> f64 {
    let (canon, _) = canonicalize(spec, kind);
    v_max_canonical(&canon, kind)
}

/// `1/2 ln(1 + V_max / sigma^2)`.
pub fn upper_maxvar(spec: &ChannelSpec, sigma: f64, kind: Kind) -> f64 {
    0.5 * (v_max(spec, kind) / (sigma * sigma)).ln_1p()
}

pub fn low_snr_slope(spec: &ChannelSpec, kind: Kind) -> f64 {
    0.5 * v_max(spec, kind)
}

pub fn high_snr_offset(spec: &ChannelSpec, kind: Kind) -> Result<f64> {
    let (canon, _) = canonicalize(spec, kind);
    Ok(offset_from_gamma(solve_gamma(&canon, kind)?.gamma))
}

fn offset_from_gamma(gamma: f64) -> f64 {
    -0.5 * (2.0 * PI * E).ln() + gamma
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Form {
    /// All multipliers nonnegative.
    Nonnegative,
    /// Equal cost with `lambda_0 <= 0`.
    NegativeLead,
}

/// `ln int_0^{1+delta} exp(-lambda_0 y - sum_{i>=1} lambda_i (y - H_[i])_+) dy`.
fn ln_p(spec: &ChannelSpec, delta: f64, lambdas: &[f64]) -> f64 {
    let n = spec.n();
    let mut terms = Vec::with_capacity(n);
    let mut log_start = 0.0;
    let mut slope = 0.0;
    for k in 0..n {
        let b = spec.cum(k);
        let e = if k + 1 == n { 1.0 + delta } else { spec.cum(k + 1) };
        slope -= lambdas[k];
        terms.push(ln_segment_mass(log_start, slope, e - b));
        log_start += slope * (e - b);
    }
    log_sum_exp(&terms)
}

fn duality_form(spec: &ChannelSpec, sigma: f64, delta: f64, lambdas: &[f64], form: Form) -> f64 {
    let lead = ln_p(spec, delta, lambdas) - (2.0 * PI * E).sqrt().ln() - sigma.ln();
    let linear: f64 = lambdas.iter().zip(spec.caps()).map(|(l, c)| l * c).sum();
    let tail = sigma / (2.0 * PI).sqrt() * -(-(1.0 + delta).powi(2) / (2.0 * sigma * sigma)).exp_m1();
    let base = log_add_exp(0.0, lead) + linear;
    match form {
        Form::Nonnegative => base + lambdas.iter().sum::<f64>() * tail,
        Form::NegativeLead => {
            let l0 = lambdas[0];
            base + lambdas[1..].iter().sum::<f64>() * tail
                + l0 * sigma * (std_normal_pdf(1.0 / sigma) - std_normal_pdf(delta / sigma))
                - l0 * (q_function(1.0 / sigma) + q_function(delta / sigma))
        }
    }
}

/// Duality upper bound at the given parameters on a canonical spec.
///
/// For equal cost both closed forms are admissible at `lambda_0 = 0` and the
/// smaller one is returned.
pub fn duality_bound_value(
    spec: &ChannelSpec,
    sigma: f64,
    kind: Kind,
    params: &DualityParams,
) -> Result<f64> {
    let n = spec.n();
    if params.lambdas.len() != n {
        return Err(Error::Domain(format!(
            "expected {n} multipliers, found {}",
            params.lambdas.len()
        )));
    }
    if !(params.delta > 0.0) || !params.delta.is_finite() {
        return Err(Error::Domain(format!("delta must be positive, got {}", params.delta)));
    }
    if !(sigma > 0.0) {
        return Err(Error::Domain(format!("sigma must be positive, got {sigma}")));
    }
    let l = &params.lambdas;
    if let Some(i) = (1..n).find(|&i| l[i] < 0.0 || !l[i].is_finite()) {
        return Err(Error::SignPattern(format!("lambda_{i} = {} must be nonnegative", l[i])));
    }
    let delta = params.delta;
    match kind {
        Kind::Bc if l[0] < 0.0 => Err(Error::SignPattern(format!(
            "lambda_0 = {} must be nonnegative for bounded cost",
            l[0]
        ))),
        Kind::Bc => Ok(duality_form(spec, sigma, delta, l, Form::Nonnegative)),
        Kind::Ec if l[0] > 0.0 => Ok(duality_form(spec, sigma, delta, l, Form::Nonnegative)),
        Kind::Ec if l[0] < 0.0 => Ok(duality_form(spec, sigma, delta, l, Form::NegativeLead)),
        Kind::Ec => Ok(duality_form(spec, sigma, delta, l, Form::Nonnegative)
            .min(duality_form(spec, sigma, delta, l, Form::NegativeLead))),
    }
}

/// Minimizes `f` from `x0` by the Nelder-Mead simplex method; returns the best point seen.
fn nelder_mead<F: Fn(&[f64]) -> f64>(f: &F, x0: &[f64], steps: &[f64], max_evals: usize) -> (Vec<f64>, f64) {
    let d = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    simplex.push((x0.to_vec(), f(x0)));
    for i in 0..d {
        let mut x = x0.to_vec();
        x[i] += steps[i];
        let v = f(&x);
        simplex.push((x, v));
    }
    let mut evals = d + 1;
    let by_value = |a: &(Vec<f64>, f64), b: &(Vec<f64>, f64)| a.1.total_cmp(&b.1);
    while evals < max_evals {
        simplex.sort_by(by_value);
        let spread = simplex[d].1 - simplex[0].1;
        if spread.abs() < 1e-12 * (1.0 + simplex[0].1.abs()) {
            break;
        }
        let centroid: Vec<f64> = (0..d)
            .map(|j| simplex[..d].iter().map(|p| p.0[j]).sum::<f64>() / d as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            (0..d).map(|j| centroid[j] + t * (simplex[d].0[j] - centroid[j])).collect()
        };
        let xr = along(-1.0);
        let fr = f(&xr);
        evals += 1;
        if fr < simplex[0].1 {
            let xe = along(-2.0);
            let fe = f(&xe);
            evals += 1;
            simplex[d] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[d - 1].1 {
            simplex[d] = (xr, fr);
        } else {
            let (xc, fc) = if fr < simplex[d].1 {
                let x = along(-0.5);
                let v = f(&x);
                (x, v)
            } else {
                let x = along(0.5);
                let v = f(&x);
                (x, v)
            };
            evals += 1;
            if fc < simplex[d].1.min(fr) {
                simplex[d] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for p in simplex.iter_mut().skip(1) {
                    for j in 0..d {
                        p.0[j] = best[j] + 0.5 * (p.0[j] - best[j]);
                    }
                    p.1 = f(&p.0);
                }
                evals += d;
            }
        }
    }
    simplex.sort_by(by_value);
    simplex.swap_remove(0)
}

fn delta_seeds(sigma: f64) -> Vec<f64> {
    let lo = sigma.powf(1.5);
    let mut seeds = if lo < 10.0 { log_grid(lo, 10.0, 14) } else { log_grid(1e-3, 10.0, 14) };
    seeds.push(sigma.sqrt());
    seeds
}

/// Best duality bound over the forms admissible for `kind`, started from the
/// multipliers `lambda_star`.
fn optimize_duality(spec: &ChannelSpec, sigma: f64, kind: Kind, lambda_star: &[f64]) -> f64 {
    let n = spec.n();
    let forms: &[Form] = match kind {
        Kind::Ec => &[Form::Nonnegative, Form::NegativeLead],
        Kind::Bc => &[Form::Nonnegative],
    };
    let mut best = f64::INFINITY;
    for &form in forms {
        let admissible = |theta: &[f64]| -> (f64, Vec<f64>) {
            let delta = theta[0].exp();
            let mut l = theta[1..].to_vec();
            for (i, x) in l.iter_mut().enumerate() {
                *x = match (i, form) {
                    (0, Form::NegativeLead) => x.min(0.0),
                    _ => x.max(0.0),
                };
            }
            (delta, l)
        };
        let objective = |theta: &[f64]| -> f64 {
            let (delta, l) = admissible(theta);
            let v = duality_form(spec, sigma, delta, &l, form);
            if v.is_finite() {
                v
            } else {
                f64::INFINITY
            }
        };
        let mut seeds: Vec<(Vec<f64>, f64)> = Vec::new();
        for lambdas in [vec![0.0; n], lambda_star.to_vec()] {
            for delta in delta_seeds(sigma) {
                let mut theta = vec![delta.ln()];
                theta.extend_from_slice(&lambdas);
                let v = objective(&theta);
                seeds.push((theta, v));
            }
        }
        seeds.sort_by(|a, b| a.1.total_cmp(&b.1));
        best = best.min(seeds[0].1);
        for (theta, _) in seeds.iter().take(3) {
            let steps: Vec<f64> = theta
                .iter()
                .enumerate()
                .map(|(i, x)| if i == 0 { 0.5 } else { 0.25 * x.abs().max(1.0) })
                .collect();
            let (_, v) = nelder_mead(&objective, theta, &steps, 400 * (n + 1));
            best = best.min(v);
        }
    }
    best
}

/// Numerically minimized duality bound on a canonical spec with its max-entropy solution.
pub fn upper_duality_with(spec: &ChannelSpec, sigma: f64, kind: Kind, sol: &MaxEntSolution) -> f64 {
    let direct = optimize_duality(spec, sigma, kind, &sol.lambdas);
    if kind == Kind::Bc {
        return direct;
    }
    let reflected = sol.density.reflect();
    direct.min(optimize_duality(&spec.flipped(), sigma, kind, reflected.lambdas()))
}

/// Numerically minimized duality upper bound; the spec is canonicalized first.
pub fn upper_duality(spec: &ChannelSpec, sigma: f64, kind: Kind) -> Result<f64> {
    let (canon, _) = canonicalize(spec, kind);
    let sol = solve_gamma(&canon, kind)?;
    Ok(upper_duality_with(&canon, sigma, kind, &sol))
}

/// Caches the reduced spec and its max-entropy solution across noise levels.
#[derive(Debug, Clone)]
pub struct BoundsEvaluator {
    spec: ChannelSpec,
    kind: Kind,
    solution: MaxEntSolution,
    v_max: f64,
}

impl BoundsEvaluator {
    pub fn new(spec: &ChannelSpec, kind: Kind) -> Result<Self> {
        let (canon, _) = canonicalize(spec, kind);
        let solution = solve_gamma(&canon, kind)?;
        let v_max = v_max_canonical(&canon, kind);
        Ok(Self {
            spec: canon,
            kind,
            solution,
            v_max,
        })
    }

    pub fn spec(&self) -> &ChannelSpec {
        &self.spec
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn solution(&self) -> &MaxEntSolution {
        &self.solution
    }

    pub fn v_max(&self) -> f64 {
        self.v_max
    }

    pub fn low_snr_slope(&self) -> f64 {
        0.5 * self.v_max
    }

    pub fn high_snr_offset(&self) -> f64 {
        offset_from_gamma(self.solution.gamma)
    }

    pub fn lower_epi(&self, sigma: f64) -> f64 {
        epi_bound(self.solution.gamma, sigma)
    }

    pub fn upper_maxvar(&self, sigma: f64) -> f64 {
        0.5 * (self.v_max / (sigma * sigma)).ln_1p()
    }

    pub fn upper_duality(&self, sigma: f64) -> f64 {
        upper_duality_with(&self.spec, sigma, self.kind, &self.solution)
    }

    pub fn report(&self, sigma: f64) -> BoundsReport {
        let lower_epi = self.lower_epi(sigma);
        let upper_maxvar = self.upper_maxvar(sigma);
        let upper_duality = self.upper_duality(sigma);
        let best_upper = upper_maxvar.min(upper_duality);
        BoundsReport {
            sigma,
            lower_epi,
            upper_maxvar,
            upper_duality,
            best_lower: lower_epi,
            best_upper,
            gap: best_upper - lower_epi,
        }
    }

    /// Reports for every noise level of `cfg`, in increasing `sigma` order.
    pub fn sweep(&self, cfg: &SweepConfig) -> Result<Vec<BoundsReport>> {
        cfg.validate()?;
        if cfg.kind != self.kind {
            return Err(Error::Domain(format!(
                "sweep kind {} does not match evaluator kind {}",
                cfg.kind, self.kind
            )));
        }
        Ok(cfg.sigmas().par_iter().map(|&s| self.report(s)).collect())
    }
}
