//! Finite unions of half-open intervals `[a, b)`.

use serde::{Deserialize, Serialize};

/// Sorted, disjoint, non-abutting half-open intervals.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntervalSet {
    ivs: Vec<[f64; 2]>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn interval(a: f64, b: f64) -> Self {
        Self::from_intervals(vec![[a, b]])
    }

    /// Normalizes arbitrary intervals: drops empty ones, sorts and coalesces.
    pub fn from_intervals(mut ivs: Vec<[f64; 2]>) -> Self {
        ivs.retain(|iv| iv[1] > iv[0]);
        ivs.sort_by(|x, y| x[0].total_cmp(&y[0]));
        let mut out: Vec<[f64; 2]> = Vec::with_capacity(ivs.len());
        for iv in ivs {
            match out.last_mut() {
                Some(last) if iv[0] <= last[1] => last[1] = last[1].max(iv[1]),
                _ => out.push(iv),
            }
        }
        Self { ivs: out }
    }

    pub fn intervals(&self) -> &[[f64; 2]] {
        &self.ivs
    }

    pub fn len(&self) -> usize {
        self.ivs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ivs.is_empty()
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut all = self.ivs.clone();
        all.extend_from_slice(&other.ivs);
        Self::from_intervals(all)
    }

    pub fn difference(&self, other: &Self) -> Self {
        let mut out = Vec::new();
        for &[a, b] in &self.ivs {
            let mut lo = a;
            for &[c, d] in &other.ivs {
                if d <= lo {
                    continue;
                }
                if c >= b {
                    break;
                }
                if c > lo {
                    out.push([lo, c]);
                }
                lo = lo.max(d);
                if lo >= b {
                    break;
                }
            }
            if lo < b {
                out.push([lo, b]);
            }
        }
        Self::from_intervals(out)
    }

    pub fn measure(&self) -> f64 {
        self.ivs.iter().map(|iv| iv[1] - iv[0]).sum()
    }

    /// Measure of the part lying in `(-inf, s]`.
    pub fn measure_below(&self, s: f64) -> f64 {
        let mut total = 0.0;
        for &[a, b] in &self.ivs {
            if a >= s {
                break;
            }
            total += b.min(s) - a;
        }
        total
    }

    pub fn contains(&self, x: f64) -> bool {
        self.ivs.iter().any(|iv| iv[0] <= x && x < iv[1])
    }

    /// Smallest right end point `eta >= from` at which `[from, eta)` minus the set
    /// has measure `amount`, pushed past any block of the set starting within
    /// `gap` of that point.
    ///
    /// Requires `from` to lie outside the interior of every interval.
    pub fn skip_forward(&self, from: f64, amount: f64, gap: f64) -> f64 {
        let mut pos = from;
        let mut rem = amount;
        for &[a, b] in &self.ivs {
            if b <= pos {
                continue;
            }
            let free = (a - pos).max(0.0);
            if rem < free - gap {
                return pos + rem;
            }
            rem = (rem - free).max(0.0);
            pos = b;
        }
        pos + rem
    }
}
