#![allow(dead_code)]

use oic_core::*;
use rand::Rng;

/// Random spec with `n` antennas, ratios in `[lo, hi]` separated by at least `1e-3`.
pub fn random_spec<R: Rng>(rng: &mut R, n: usize, lo: f64, hi: f64) -> ChannelSpec {
    let raw: Vec<f64> = (0..n).map(|_| 0.05 + rng.random::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    let h: Vec<f64> = raw.iter().map(|x| x / total).collect();
    let alpha = loop {
        let mut a: Vec<f64> = (0..n).map(|_| rng.random_range(lo..hi)).collect();
        a.sort_by(|x, y| y.total_cmp(x));
        if a.windows(2).all(|w| w[0] - w[1] > 1e-3) {
            break a;
        }
    };
    ChannelSpec::new(h, alpha, 1.0).unwrap()
}

/// Random spec already reduced to canonical form for `kind`.
pub fn random_canonical<R: Rng>(rng: &mut R, kind: Kind) -> ChannelSpec {
    loop {
        let n = rng.random_range(2..=6);
        let spec = random_spec(rng, n, 0.02, 0.98);
        let (canon, _) = canonicalize(&spec, kind);
        if canon.n() >= 2 {
            return canon;
        }
    }
}

/// A law below the maximally convex one in convex order: consecutive atoms are
/// replaced by their conditional means, the result is contracted towards the
/// mean and mixed with a point mass there.
pub fn random_feasible<R: Rng>(rng: &mut R, spec: &ChannelSpec) -> DiscreteDist {
    let top = maximally_convex(spec).unwrap();
    let m = top.mean();
    let atoms: Vec<(f64, f64)> = top.atoms().collect();
    let mut merged = Vec::new();
    let mut i = 0;
    while i < atoms.len() {
        let len = rng.random_range(1..=2).min(atoms.len() - i);
        let group = &atoms[i..i + len];
        let p: f64 = group.iter().map(|a| a.1).sum();
        let x: f64 = group.iter().map(|a| a.0 * a.1).sum::<f64>() / p;
        merged.push((x, p));
        i += len;
    }
    let t = if rng.random_bool(0.3) { 1.0 } else { rng.random_range(0.3..1.0) };
    let w = if rng.random_bool(0.5) { 0.0 } else { rng.random_range(0.0..0.5) };
    let mut out: Vec<(f64, f64)> = merged
        .iter()
        .map(|&(x, p)| ((m + t * (x - m)).clamp(0.0, 1.0), p * (1.0 - w)))
        .collect();
    if w > 0.0 {
        out.push((m, w));
    }
    DiscreteDist::from_atoms(&out).unwrap()
}

/// Arbitrary discrete law on `[0, 1]` with mean exactly `m`.
pub fn random_with_mean<R: Rng>(rng: &mut R, m: f64) -> DiscreteDist {
    loop {
        let k = rng.random_range(1..=6);
        let atoms: Vec<(f64, f64)> = (0..k)
            .map(|_| (rng.random::<f64>(), 0.05 + rng.random::<f64>()))
            .collect();
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        let mu: f64 = atoms.iter().map(|a| a.0 * a.1).sum::<f64>() / total;
        let w = rng.random_range(0.05..0.95);
        let c = (m - (1.0 - w) * mu) / w;
        if !(0.0..=1.0).contains(&c) {
            continue;
        }
        let mut all: Vec<(f64, f64)> = atoms.iter().map(|&(x, p)| (x, p / total * (1.0 - w))).collect();
        all.push((c, w));
        let d = DiscreteDist::from_atoms(&all).unwrap();
        if (d.mean() - m).abs() < 1e-12 {
            return d;
        }
    }
}

pub mod strategies {
    use super::*;
    use proptest::prelude::{any, prop, prop_oneof, Strategy};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub fn discrete() -> impl Strategy<Value = DiscreteDist> {
        prop::collection::vec((0.0..=1.0f64, 0.01..1.0f64), 1..8).prop_map(|atoms| {
            let total: f64 = atoms.iter().map(|a| a.1).sum();
            let atoms: Vec<(f64, f64)> = atoms.iter().map(|&(x, p)| (x, p / total)).collect();
            DiscreteDist::from_atoms(&atoms).unwrap()
        })
    }

    pub fn pwexp() -> impl Strategy<Value = PiecewiseExpDist> {
        (1usize..5)
            .prop_flat_map(|segments| {
                (
                    prop::collection::vec(0.02..0.98f64, segments - 1),
                    prop::collection::vec(-25.0..25.0f64, segments),
                )
            })
            .prop_filter_map("breakpoints too close", |(mut inner, lambdas)| {
                inner.sort_by(f64::total_cmp);
                let mut b = vec![0.0];
                b.extend(inner);
                b.push(1.0);
                if b.windows(2).any(|w| w[1] - w[0] < 1e-3) {
                    return None;
                }
                PiecewiseExpDist::normalized(b, lambdas).ok()
            })
    }

    pub fn bounded() -> impl Strategy<Value = BoundedDist> {
        prop_oneof![discrete().prop_map(BoundedDist::from), pwexp().prop_map(BoundedDist::from)]
    }

    /// A canonical spec for `kind` together with an rng seeded for further draws.
    pub fn canonical(kind: Kind) -> impl Strategy<Value = (ChannelSpec, ChaCha8Rng)> {
        any::<u64>().prop_map(move |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let spec = random_canonical(&mut rng, kind);
            (spec, rng)
        })
    }

    /// Any spec with distinct ratios, not necessarily sorted or canonical.
    pub fn any_spec() -> impl Strategy<Value = ChannelSpec> {
        (1usize..=5, any::<u64>()).prop_map(|(n, seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sorted = random_spec(&mut rng, n, 0.03, 0.97);
            let mut idx: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                idx.swap(i, rng.random_range(0..=i));
            }
            ChannelSpec::new(
                idx.iter().map(|&i| sorted.h()[i]).collect(),
                idx.iter().map(|&i| sorted.alpha()[i]).collect(),
                1.0,
            )
            .unwrap()
        })
    }
}
