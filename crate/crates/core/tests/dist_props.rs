mod common;

use common::strategies::*;
use oic_core::quadrature::integrate_panels;
use oic_core::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn grid(n: usize) -> impl Iterator<Item = f64> {
    (0..=n).map(move |i| i as f64 / n as f64)
}

/// `p`-axis breakpoints of the quantile function: the cdf at every kink or jump.
fn p_points(d: &BoundedDist, extra: &[f64]) -> Vec<f64> {
    let xs: Vec<f64> = match d {
        BoundedDist::Discrete(d) => d.support().to_vec(),
        BoundedDist::PiecewiseExp(d) => d.breakpoints().to_vec(),
    };
    let mut p: Vec<f64> = xs.iter().chain(extra).map(|&x| d.cdf(x)).collect();
    p.extend([0.0, 1.0]);
    p.sort_by(f64::total_cmp);
    p.dedup();
    p
}

proptest! {
    #[test]
    fn stop_loss_is_convex_nonincreasing_and_bounded(d in bounded()) {
        let v: Vec<f64> = grid(1000).map(|t| d.slt(t).unwrap()).collect();
        for (i, t) in grid(1000).enumerate() {
            prop_assert!(v[i] >= -1e-15 && v[i] <= 1.0 - t + 1e-12);
            if i > 0 {
                prop_assert!(v[i] <= v[i - 1] + 1e-15);
            }
            if i > 1 {
                prop_assert!(v[i] - 2.0 * v[i - 1] + v[i - 2] >= -1e-10);
            }
        }
        prop_assert!((v[0] - d.mean()).abs() < 1e-12);
    }

    #[test]
    fn cdf_and_quantile_form_a_galois_connection(d in bounded()) {
        for x in grid(200) {
            let f = d.cdf(x);
            for p in grid(200).skip(1) {
                let q = d.quantile(p).unwrap();
                // pairs within rounding of the boundary are not decidable
                if (f - p).abs() < 1e-12 || (x - q).abs() < 1e-12 {
                    continue;
                }
                prop_assert_eq!(f >= p, x >= q, "x={} p={} F={} Q={}", x, p, f, q);
            }
        }
    }

    #[test]
    fn quantile_integrates_to_the_mean(d in bounded()) {
        let pts = p_points(&d, &[]);
        let e = integrate_panels(|p| d.quantile_unchecked(p), &pts, 1e-11);
        prop_assert!((e.value - d.mean()).abs() < 1e-8, "{} vs {}", e.value, d.mean());
    }

    #[test]
    fn area_above_threshold_equals_stop_loss(d in bounded(), t in 0.0..1.0f64) {
        let pts = p_points(&d, &[t]);
        let area = integrate_panels(|p| (d.quantile_unchecked(p) - t).max(0.0), &pts, 1e-10);
        prop_assert!((area.value - d.slt(t).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn sample_mean_tracks_mean(d in bounded(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 4000;
        let draws: Vec<f64> = (0..n).map(|_| match &d {
            BoundedDist::Discrete(x) => x.sample(&mut rng),
            BoundedDist::PiecewiseExp(x) => x.sample(&mut rng),
        }).collect();
        prop_assert!(draws.iter().all(|x| (0.0..=1.0).contains(x)));
        let m = draws.iter().sum::<f64>() / n as f64;
        let sd = (d.variance() / n as f64).sqrt();
        prop_assert!((m - d.mean()).abs() <= 5.0 * sd + 1e-12);
    }

    #[test]
    fn reflection_mirrors_the_law(d in bounded(), t in 0.0..1.0f64) {
        let r = d.reflect();
        prop_assert!((r.mean() - (1.0 - d.mean())).abs() < 1e-12);
        prop_assert!((r.variance() - d.variance()).abs() < 1e-10);
        // pi_R(t) = E[(1 - X - t)_+] = (1 - t) - E[X] + pi_X(1 - t)
        let want = 1.0 - t - d.mean() + d.stop_loss(1.0 - t);
        prop_assert!((r.stop_loss(t) - want).abs() < 1e-10);
    }

    #[test]
    fn maximally_convex_variance_matches_comonotone_sum((spec, _) in canonical(Kind::Ec)) {
        let (h, a) = (spec.h(), spec.alpha());
        let mut closed = 0.0;
        for i in 0..spec.n() {
            for j in 0..spec.n() {
                closed += h[i] * h[j] * (a[i].min(a[j]) - a[i] * a[j]);
            }
        }
        let v = maximally_convex(&spec).unwrap().variance();
        prop_assert!((v - closed).abs() < 1e-12);
    }
}

#[test]
fn pwexp_entropy_matches_quadrature() {
    let d = PiecewiseExpDist::normalized(vec![0.0, 0.3, 0.7, 1.0], vec![-4.0, 9.0, 2.5]).unwrap();
    let e = integrate_panels(
        |s| {
            let f = d.density(s);
            -f * f.ln()
        },
        &[0.0, 0.3, 0.7, 1.0],
        1e-13,
    );
    assert!((d.entropy() - e.value).abs() < 1e-10);
}
