//! Channel description, normalization of physical parameters and reduction to
//! canonical form.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Whether the per-antenna average intensities are prescribed exactly (`Ec`)
/// or only bounded from above (`Bc`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Ec,
    Bc,
}

impl FromStr for Kind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ec" => Ok(Kind::Ec),
            "bc" => Ok(Kind::Bc),
            other => Err(Error::Domain(format!("unknown channel kind `{other}`"))),
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Ec => "ec",
            Kind::Bc => "bc",
        })
    }
}

/// Physical channel parameters before normalization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawChannelSpec {
    pub gains: Vec<f64>,
    pub peaks: Vec<f64>,
    pub alpha: Vec<f64>,
    pub sigma: f64,
}

/// Normalized channel: gains summing to one, ratios in `[0, 1]`, noise level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelSpec {
    h: Vec<f64>,
    alpha: Vec<f64>,
    sigma: f64,
    #[serde(skip)]
    cum: Vec<f64>,
    #[serde(skip)]
    caps: Vec<f64>,
}

const GAIN_SUM_TOL: f64 = 1e-9;

impl ChannelSpec {
    /// Gains summing to one within `1e-9` are rescaled to sum to one.
    pub fn new(h: Vec<f64>, alpha: Vec<f64>, sigma: f64) -> Result<Self> {
        if h.is_empty() {
            return Err(Error::InvalidChannel {
                field: "h",
                reason: "at least one antenna is required".into(),
            });
        }
        if alpha.len() != h.len() {
            return Err(Error::InvalidChannel {
                field: "alpha",
                reason: format!("expected {} entries, found {}", h.len(), alpha.len()),
            });
        }
        if h.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
            return Err(Error::InvalidChannel {
                field: "h",
                reason: "gains must be positive and finite".into(),
            });
        }
        let total: f64 = h.iter().sum();
        if (total - 1.0).abs() > GAIN_SUM_TOL {
            return Err(Error::InvalidChannel {
                field: "h",
                reason: format!("gains sum to {total}, expected 1"),
            });
        }
        if alpha.iter().any(|a| !(0.0..=1.0).contains(a)) {
            return Err(Error::InvalidChannel {
                field: "alpha",
                reason: "ratios must lie in [0, 1]".into(),
            });
        }
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidChannel {
                field: "sigma",
                reason: "noise level must be positive and finite".into(),
            });
        }
        let h: Vec<f64> = h.iter().map(|x| x / total).collect();
        Ok(Self::build(h, alpha, sigma))
    }

    fn build(h: Vec<f64>, alpha: Vec<f64>, sigma: f64) -> Self {
        let n = h.len();
        let mut cum = vec![0.0; n + 1];
        for k in 0..n {
            cum[k + 1] = cum[k] + h[k];
        }
        cum[n] = 1.0;
        let mut caps = vec![0.0; n + 1];
        for k in (0..n).rev() {
            caps[k] = caps[k + 1] + h[k] * alpha[k];
        }
        Self {
            h,
            alpha,
            sigma,
            cum,
            caps,
        }
    }

    pub fn n(&self) -> usize {
        self.h.len()
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// `H_[k] = h_1 + ... + h_k`, with `H_[0] = 0` and `H_[n] = 1`.
    pub fn cum(&self, k: usize) -> f64 {
        self.cum[k]
    }

    pub fn cums(&self) -> &[f64] {
        &self.cum
    }

    /// Stop-loss cap `(1 - H_[k]) abar_k = sum_{i>k} h_i alpha_i`.
    pub fn cap(&self, k: usize) -> f64 {
        self.caps[k]
    }

    pub fn caps(&self) -> &[f64] {
        &self.caps
    }

    /// Tail average `abar_k`; zero for `k = n`.
    pub fn tail_avg(&self, k: usize) -> f64 {
        if k >= self.n() {
            0.0
        } else {
            self.caps[k] / (1.0 - self.cum[k])
        }
    }

    /// Mean intensity `h . alpha` of the equivalent input.
    pub fn mean_intensity(&self) -> f64 {
        self.caps[0]
    }

    pub fn with_sigma(&self, sigma: f64) -> Result<Self> {
        Self::new(self.h.clone(), self.alpha.clone(), sigma)
    }

    pub fn with_alpha(&self, alpha: Vec<f64>) -> Result<Self> {
        Self::new(self.h.clone(), alpha, self.sigma)
    }

    /// Strictly decreasing positive ratios with the smallest at most 1/2.
    pub fn is_canonical(&self) -> bool {
        self.alpha.windows(2).all(|w| w[0] > w[1])
            && self.alpha[self.n() - 1] > 0.0
            && self.alpha[self.n() - 1] <= 0.5
    }

    /// Spec under `x -> 1 - x`: ratios `1 - alpha` with the antenna order reversed.
    pub fn flipped(&self) -> Self {
        let h = self.h.iter().rev().copied().collect();
        let alpha = self.alpha.iter().rev().map(|a| 1.0 - a).collect();
        Self::build(h, alpha, self.sigma)
    }
}

/// Normalizes physical gains and peaks to unit total peak received intensity.
pub fn normalize(raw: &RawChannelSpec) -> Result<ChannelSpec> {
    let n = raw.gains.len();
    if raw.peaks.len() != n {
        return Err(Error::InvalidChannel {
            field: "peaks",
            reason: format!("expected {n} entries, found {}", raw.peaks.len()),
        });
    }
    if raw.gains.iter().any(|&g| !(g > 0.0) || !g.is_finite()) {
        return Err(Error::InvalidChannel {
            field: "h_raw",
            reason: "gains must be positive and finite".into(),
        });
    }
    if raw.peaks.iter().any(|&a| !(a > 0.0) || !a.is_finite()) {
        return Err(Error::InvalidChannel {
            field: "peaks",
            reason: "peak intensities must be positive and finite".into(),
        });
    }
    let scale: f64 = raw.gains.iter().zip(&raw.peaks).map(|(g, a)| g * a).sum();
    let h = raw.gains.iter().zip(&raw.peaks).map(|(g, a)| g * a / scale).collect();
    ChannelSpec::new(h, raw.alpha.clone(), raw.sigma / scale)
}

/// How canonical antennas map back onto the original ones.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reduction {
    /// `groups[j]` lists the original antenna indices merged into canonical antenna `j`.
    pub groups: Vec<Vec<usize>>,
    /// Intensities were reflected, `x -> 1 - x`.
    pub flipped: bool,
    /// Bounded-cost ratios were all at least 1/2 and were replaced by 1/2.
    pub clamped: bool,
    pub original_len: usize,
}

impl Reduction {
    pub fn identity(n: usize) -> Self {
        Self {
            groups: (0..n).map(|i| vec![i]).collect(),
            flipped: false,
            clamped: false,
            original_len: n,
        }
    }

    /// Expands canonical normalized intensities to the original antennas.
    pub fn expand(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.original_len];
        for (j, group) in self.groups.iter().enumerate() {
            let v = if self.flipped { 1.0 - x[j] } else { x[j] };
            for &i in group {
                out[i] = v;
            }
        }
        out
    }

    /// Maps an equivalent-input value of the original channel to the canonical one.
    pub fn to_canonical_input(&self, s: f64) -> f64 {
        if self.flipped {
            1.0 - s
        } else {
            s
        }
    }
}

/// Sorts, merges equal ratios and applies the symmetry reductions of each kind.
pub fn canonicalize(spec: &ChannelSpec, kind: Kind) -> (ChannelSpec, Reduction) {
    let n = spec.n();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| spec.alpha[b].total_cmp(&spec.alpha[a]));

    let min_alpha = spec.alpha.iter().copied().fold(f64::INFINITY, f64::min);
    if kind == Kind::Bc && min_alpha >= 0.5 {
        let reduction = Reduction {
            groups: vec![order],
            flipped: false,
            clamped: true,
            original_len: n,
        };
        return (ChannelSpec::build(vec![1.0], vec![0.5], spec.sigma), reduction);
    }
    let (merged, mut reduction) = sort_and_merge(spec);
    if kind == Kind::Ec && merged.alpha[merged.n() - 1] > 0.5 {
        reduction.groups.reverse();
        reduction.flipped = true;
        return (merged.flipped(), reduction);
    }
    (merged, reduction)
}

/// Sorts antennas by decreasing ratio and merges equal ratios, without any
/// symmetry reduction.
pub fn sort_and_merge(spec: &ChannelSpec) -> (ChannelSpec, Reduction) {
    const MERGE_TOL: f64 = 1e-12;
    let n = spec.n();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| spec.alpha[b].total_cmp(&spec.alpha[a]));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut h: Vec<f64> = Vec::new();
    let mut weighted: Vec<f64> = Vec::new();
    let mut head: Vec<f64> = Vec::new();
    for &i in &order {
        let a = spec.alpha[i];
        match head.last() {
            Some(&first) if (first - a).abs() <= MERGE_TOL => {
                groups.last_mut().unwrap().push(i);
                *h.last_mut().unwrap() += spec.h[i];
                *weighted.last_mut().unwrap() += spec.h[i] * a;
            }
            _ => {
                groups.push(vec![i]);
                h.push(spec.h[i]);
                weighted.push(spec.h[i] * a);
                head.push(a);
            }
        }
    }
    let alpha: Vec<f64> = weighted
        .iter()
        .zip(&h)
        .zip(&groups)
        .map(|((w, g), members)| {
            if members.len() == 1 {
                spec.alpha[members[0]]
            } else {
                (w / g).clamp(0.0, 1.0)
            }
        })
        .collect();
    let reduction = Reduction {
        groups,
        flipped: false,
        clamped: false,
        original_len: n,
    };
    (ChannelSpec::build(h, alpha, spec.sigma), reduction)
}
