mod common;

use common::strategies::*;
use oic_core::quadrature::integrate_panels;
use oic_core::*;
use proptest::prelude::*;
use rand::Rng;

fn kinds() -> impl Strategy<Value = Kind> {
    prop_oneof![Just(Kind::Ec), Just(Kind::Bc)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn solution_is_primal_feasible_and_slack_complementary(
        (spec, kind) in kinds().prop_flat_map(|k| (canonical(k).prop_map(|c| c.0), Just(k)))
    ) {
        let sol = solve_gamma(&spec, kind).unwrap();
        let d = &sol.density;
        let mean_gap = d.mean() - spec.mean_intensity();
        match kind {
            Kind::Ec => prop_assert!(mean_gap.abs() < 1e-6),
            Kind::Bc => prop_assert!(mean_gap < 1e-6),
        }
        for (i, s) in sol.slacks(&spec).iter().enumerate() {
            prop_assert!(*s > -1e-6, "slack {} = {}", i + 1, s);
            prop_assert!((sol.lambdas[i + 1] * s).abs() < 1e-6);
        }
        if kind == Kind::Bc {
            prop_assert!((sol.lambdas[0] * mean_gap).abs() < 1e-6);
            prop_assert!(sol.lambdas.iter().all(|&l| l >= 0.0));
        } else {
            prop_assert!(sol.lambdas[1..].iter().all(|&l| l >= 0.0));
        }
    }

    #[test]
    fn entropy_equals_dual_value(
        (spec, kind) in kinds().prop_flat_map(|k| (canonical(k).prop_map(|c| c.0), Just(k)))
    ) {
        let sol = solve_gamma(&spec, kind).unwrap();
        let d = &sol.density;
        let h = integrate_panels(
            |s| {
                let f = d.density(s);
                if f > 0.0 { -f * f.ln() } else { 0.0 }
            },
            d.breakpoints(),
            1e-12,
        );
        prop_assert!((h.value - sol.gamma).abs() < 1e-6, "{} vs {}", h.value, sol.gamma);
        let dual = dual_objective(sol.nu0, &sol.lambdas, &spec, kind).unwrap();
        prop_assert!((dual - sol.gamma).abs() < 1e-6);
        // any admissible law has no more entropy; the uniform law is admissible only sometimes
        prop_assert!(sol.gamma <= 1e-12);
    }

    #[test]
    fn dual_objective_is_midpoint_convex(
        (spec, mut rng) in canonical(Kind::Ec),
        ec in any::<bool>(),
    ) {
        let kind = if ec { Kind::Ec } else { Kind::Bc };
        let n = spec.n();
        let draw = |rng: &mut rand_chacha::ChaCha8Rng| -> (f64, Vec<f64>) {
            let nu0 = rng.random_range(-2.0..2.0);
            let mut l: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..6.0)).collect();
            if kind == Kind::Ec {
                l[0] = rng.random_range(-6.0..6.0);
            }
            (nu0, l)
        };
        for _ in 0..100 {
            let (a0, a) = draw(&mut rng);
            let (b0, b) = draw(&mut rng);
            let m: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 0.5 * (x + y)).collect();
            let fa = dual_objective(a0, &a, &spec, kind).unwrap();
            let fb = dual_objective(b0, &b, &spec, kind).unwrap();
            let fm = dual_objective(0.5 * (a0 + b0), &m, &spec, kind).unwrap();
            prop_assert!(fm <= 0.5 * (fa + fb) + 1e-10 * (1.0 + fa.abs() + fb.abs()));
        }
    }

    #[test]
    fn reflected_spec_has_the_same_entropy((spec, _) in canonical(Kind::Ec)) {
        let a = solve_gamma(&spec, Kind::Ec).unwrap();
        let (flip, _) = sort_and_merge(&spec.flipped());
        let b = solve_gamma(&flip, Kind::Ec).unwrap();
        prop_assert!((a.gamma - b.gamma).abs() < 1e-8);
    }
}

#[test]
fn sign_pattern_is_enforced() {
    let spec = ChannelSpec::new(vec![0.5, 0.5], vec![0.4, 0.1], 1.0).unwrap();
    assert!(matches!(dual_objective(0.0, &[-1.0, 0.0], &spec, Kind::Bc), Err(Error::SignPattern(_))));
    assert!(matches!(dual_objective(0.0, &[1.0, -0.5], &spec, Kind::Ec), Err(Error::SignPattern(_))));
    assert!(dual_objective(0.0, &[-1.0, 0.5], &spec, Kind::Ec).is_ok());
}
