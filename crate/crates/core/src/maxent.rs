//! Maximum differential entropy of the equivalent input under the stop-loss
//! constraints, via its convex dual.

use crate::channel::{ChannelSpec, Kind};
use crate::config::Tolerances;
use crate::dist::{Distribution, PiecewiseExpDist};
use crate::error::{Error, Result};
use crate::special::zeta;
use serde::Serialize;

/// Optimal dual point and the induced density.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaxEntSolution {
    pub kind: Kind,
    pub nu0: f64,
    pub lambdas: Vec<f64>,
    /// Maximum differential entropy in nats.
    pub gamma: f64,
    pub breakpoints: Vec<f64>,
    pub iterations: usize,
    /// Norm of the projected gradient at the returned point.
    pub residual: f64,
    #[serde(skip)]
    pub density: PiecewiseExpDist,
}

impl MaxEntSolution {
    /// `(1 - H_[i]) abar_i - pi(H_[i])` for `i = 1..n-1`.
    pub fn slacks(&self, spec: &ChannelSpec) -> Vec<f64> {
        (1..spec.n())
            .map(|i| spec.cap(i) - self.density.stop_loss(spec.cum(i)))
            .collect()
    }
}

fn check_signs(lambdas: &[f64], kind: Kind) -> Result<()> {
    let first = match kind {
        Kind::Ec => 1,
        Kind::Bc => 0,
    };
    if let Some(i) = (first..lambdas.len()).find(|&i| lambdas[i] < 0.0) {
        return Err(Error::SignPattern(format!(
            "lambda_{i} = {} must be nonnegative for kind {kind}",
            lambdas[i]
        )));
    }
    Ok(())
}

/// The dual objective at an arbitrary (not necessarily normalizing) `nu0`.
pub fn dual_objective(nu0: f64, lambdas: &[f64], spec: &ChannelSpec, kind: Kind) -> Result<f64> {
    let n = spec.n();
    if lambdas.len() != n {
        return Err(Error::Domain(format!(
            "expected {n} multipliers, found {}",
            lambdas.len()
        )));
    }
    check_signs(lambdas, kind)?;
    let linear: f64 = (0..n).map(|i| lambdas[i] * spec.cap(i)).sum();
    let mut bracket = 0.0;
    for k in 1..=n {
        let start = spec.cum(k - 1);
        let mut exponent = -lambdas[0] * start;
        for i in 1..k.saturating_sub(1) {
            exponent += lambdas[i] * (spec.cum(i) - start);
        }
        let rate: f64 = lambdas[..k].iter().sum();
        bracket += spec.h()[k - 1] * exponent.exp() * zeta(-rate * spec.h()[k - 1]);
    }
    Ok(linear - 1.0 - nu0 + nu0.exp() * bracket)
}

struct Eval {
    value: f64,
    grad: Vec<f64>,
    density: PiecewiseExpDist,
}

fn evaluate(lambdas: &[f64], spec: &ChannelSpec) -> Result<Eval> {
    let density = PiecewiseExpDist::normalized(spec.cums().to_vec(), lambdas.to_vec())?;
    let n = spec.n();
    let value = (0..n).map(|i| lambdas[i] * spec.cap(i)).sum::<f64>() - density.nu0();
    let grad = (0..n)
        .map(|i| spec.cap(i) - density.stop_loss(spec.cum(i)))
        .collect();
    Ok(Eval {
        value,
        grad,
        density,
    })
}

/// Covariance of the features `(S - H_[i])_+`, `i = 0..n-1`.
fn feature_covariance(d: &PiecewiseExpDist, spec: &ChannelSpec) -> Vec<Vec<f64>> {
    let n = spec.n();
    let first: Vec<f64> = (0..n).map(|i| d.stop_loss(spec.cum(i))).collect();
    let mut cov = vec![vec![0.0; n]; n];
    for j in 0..n {
        let bj = spec.cum(j);
        let second = d.stop_loss_second(bj);
        for i in 0..=j {
            let cross = second + (bj - spec.cum(i)) * first[j];
            let c = cross - first[i] * first[j];
            cov[i][j] = c;
            cov[j][i] = c;
        }
    }
    cov
}

/// Solves `A x = b` for symmetric positive definite `A` by Cholesky.
fn cholesky_solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[i][j];
            for k in 0..j {
                sum -= l[i][k] * l[j][k];
            }
            if i == j {
                if !(sum > 0.0) {
                    return None;
                }
                l[i][i] = sum.sqrt();
            } else {
                l[i][j] = sum / l[j][j];
            }
        }
    }
    let mut y = vec![0.0; n];
    for i in 0..n {
        let s: f64 = (0..i).map(|k| l[i][k] * y[k]).sum();
        y[i] = (b[i] - s) / l[i][i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| l[k][i] * x[k]).sum();
        x[i] = (y[i] - s) / l[i][i];
    }
    Some(x)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn solve_gamma(spec: &ChannelSpec, kind: Kind) -> Result<MaxEntSolution> {
    solve_gamma_with(spec, kind, &Tolerances::default())
}

/// Projected Newton descent on the dual with `nu0` eliminated as the normalizer.
pub fn solve_gamma_with(spec: &ChannelSpec, kind: Kind, tol: &Tolerances) -> Result<MaxEntSolution> {
    let n = spec.n();
    let alpha = spec.alpha();
    if alpha.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::InvalidChannel {
            field: "alpha",
            reason: "ratios must be sorted in nonincreasing order".into(),
        });
    }
    if alpha[n - 1] <= tol.merge {
        return Err(Error::Degenerate(
            "smallest ratio is zero, no density satisfies the constraints".into(),
        ));
    }
    if kind == Kind::Ec && alpha[0] >= 1.0 - tol.merge {
        return Err(Error::Degenerate(
            "largest ratio is one, no density satisfies the constraints".into(),
        ));
    }
    let free = |i: usize| i == 0 && kind == Kind::Ec;
    let project = |l: &mut [f64]| {
        for (i, x) in l.iter_mut().enumerate() {
            if !free(i) && *x < 0.0 {
                *x = 0.0;
            }
        }
    };
    let inactive = |l: &[f64], g: &[f64], i: usize| free(i) || l[i] > 0.0 || g[i] < 0.0;
    let projected = |l: &[f64], g: &[f64]| -> Vec<f64> {
        (0..n).map(|i| if inactive(l, g, i) { g[i] } else { 0.0 }).collect()
    };

    let mut lambdas = vec![0.0; n];
    let mut cur = evaluate(&lambdas, spec)?;
    let mut pg = projected(&lambdas, &cur.grad);
    let mut iterations = 0;
    while norm(&pg) >= tol.dual_gradient {
        if iterations >= tol.max_iterations {
            return Err(Error::NonConvergence {
                iterations,
                residual: norm(&pg),
            });
        }
        iterations += 1;
        let idx: Vec<usize> = (0..n).filter(|&i| inactive(&lambdas, &cur.grad, i)).collect();
        let cov = feature_covariance(&cur.density, spec);
        let sub: Vec<Vec<f64>> = idx.iter().map(|&i| idx.iter().map(|&j| cov[i][j]).collect()).collect();
        let rhs: Vec<f64> = idx.iter().map(|&i| -cur.grad[i]).collect();
        let mut newton = vec![0.0; n];
        let solved = cholesky_solve(&sub, &rhs).or_else(|| {
            let trace: f64 = (0..idx.len()).map(|i| sub[i][i]).sum();
            let mut ridged = sub.clone();
            for (i, row) in ridged.iter_mut().enumerate() {
                row[i] += 1e-10 * trace.max(1e-300);
            }
            cholesky_solve(&ridged, &rhs)
        });
        if let Some(d) = solved {
            for (k, &i) in idx.iter().enumerate() {
                newton[i] = d[k];
            }
        }
        let gradient_step: Vec<f64> = pg.iter().map(|g| -g).collect();
        let pg_norm = norm(&pg);
        let mut next = None;
        for dir in [newton, gradient_step] {
            if dir.iter().zip(&cur.grad).map(|(d, g)| d * g).sum::<f64>() >= 0.0 {
                continue;
            }
            let mut t = 1.0;
            for _ in 0..60 {
                let mut trial: Vec<f64> = lambdas.iter().zip(&dir).map(|(l, d)| l + t * d).collect();
                project(&mut trial);
                if let Ok(e) = evaluate(&trial, spec) {
                    let predicted: f64 = cur
                        .grad
                        .iter()
                        .zip(trial.iter().zip(&lambdas))
                        .map(|(g, (a, b))| g * (a - b))
                        .sum();
                    let armijo = e.value <= cur.value + 1e-4 * predicted;
                    // near the optimum the objective is flat to rounding; accept on
                    // gradient progress instead
                    let flat = predicted.abs() < 1e-13
                        && norm(&projected(&trial, &e.grad)) < pg_norm;
                    if e.value.is_finite() && (armijo || flat) {
                        next = Some((trial, e));
                        break;
                    }
                }
                t *= 0.5;
            }
            if next.is_some() {
                break;
            }
        }
        let Some((trial, e)) = next else {
            return Err(Error::NonConvergence {
                iterations,
                residual: pg_norm,
            });
        };
        lambdas = trial;
        cur = e;
        pg = projected(&lambdas, &cur.grad);
    }
    Ok(MaxEntSolution {
        kind,
        nu0: cur.density.nu0(),
        lambdas,
        gamma: cur.value,
        breakpoints: spec.cums().to_vec(),
        iterations,
        residual: norm(&pg),
        density: cur.density,
    })
}
