//! Fixed channels shared by the benchmarks in `benches/`.

use oic_core::{ChannelSpec, Kind};

/// Three antennas, already sorted by decreasing ratio.
pub fn three() -> ChannelSpec {
    ChannelSpec::new(vec![0.4, 0.2, 0.4], vec![0.8, 0.3, 0.1], 1.0).unwrap()
}

/// `n` antennas with equal gains and evenly spread budgets in (0, 1/2).
pub fn uniform(n: usize) -> ChannelSpec {
    let h = vec![1.0 / n as f64; n];
    let alpha = (0..n).map(|k| 0.45 - 0.4 * k as f64 / n as f64).collect();
    ChannelSpec::new(h, alpha, 1.0).unwrap()
}

pub const KINDS: [Kind; 2] = [Kind::Ec, Kind::Bc];
