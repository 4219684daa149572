mod common;

use common::strategies::*;
use common::{random_feasible, random_with_mean};
use oic_core::*;
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #[test]
    fn admissible_laws_are_dominated((spec, mut rng) in canonical(Kind::Ec)) {
        let s = if rng.random_bool(0.5) {
            random_feasible(&mut rng, &spec)
        } else {
            random_with_mean(&mut rng, spec.mean_intensity())
        };
        let report = check_ec(&s, &spec);
        if report.feasible {
            prop_assert!(convex_order_dominates(&s, &spec, 501).unwrap());
            let top = maximally_convex(&spec).unwrap();
            prop_assert!(s.variance() <= top.variance() + 1e-10);
            prop_assert!(check_bc(&s, &spec).feasible);
            prop_assert!(feasibility::check_all_subsets(&s, &spec).unwrap());
        } else {
            prop_assert!(!convex_order_dominates(&s, &spec, 501).unwrap());
        }
    }

    #[test]
    fn bounded_cost_allocation_is_consistent((spec, mut rng) in canonical(Kind::Bc), w in 0.0..0.9f64) {
        // moving mass to zero keeps a bounded-cost law admissible
        let base = random_feasible(&mut rng, &spec);
        let mut atoms: Vec<(f64, f64)> = base.atoms().map(|(x, p)| (x, p * (1.0 - w))).collect();
        atoms.push((0.0, w));
        let s = DiscreteDist::from_atoms(&atoms).unwrap();
        prop_assert!(check_bc(&s, &spec).feasible);
        let alloc = bc_allocation(&s, &spec).unwrap();
        for (a, alpha) in alloc.a.iter().zip(spec.alpha()) {
            prop_assert!(*a >= 0.0 && *a <= *alpha);
            prop_assert!(*a == alpha.min(alloc.beta));
        }
        let mean: f64 = alloc.a.iter().zip(spec.h()).map(|(a, h)| a * h).sum();
        prop_assert!((mean - s.mean()).abs() < 1e-12);
        let eff = spec.with_alpha(alloc.a.clone()).unwrap();
        prop_assert!(check_ec(&s, &eff).feasible);
    }

    #[test]
    fn excess_mean_is_never_bounded_cost((spec, mut rng) in canonical(Kind::Bc)) {
        let m = (spec.mean_intensity() + 0.01 + 0.2 * rng.random::<f64>()).min(0.999);
        let s = random_with_mean(&mut rng, m);
        prop_assert!(!check_bc(&s, &spec).feasible);
        prop_assert!(bc_allocation(&s, &spec).is_err());
    }
}

#[test]
fn relaxed_single_antenna_law_is_not_admissible() {
    // max-entropy law under the mean constraint alone
    let spec = ChannelSpec::new(vec![0.4, 0.2, 0.4], vec![0.8, 0.3, 0.1], 1.0).unwrap();
    let single = ChannelSpec::new(vec![1.0], vec![spec.mean_intensity()], 1.0).unwrap();
    let relaxed = solve_gamma(&single, Kind::Ec).unwrap();
    assert!((relaxed.density.mean() - 0.42).abs() < 1e-9);
    let r = check_ec(&relaxed.density, &spec);
    assert!(!r.feasible);
    assert!(r.min_slack() < -1e-3);
    let full = solve_gamma(&spec, Kind::Ec).unwrap();
    assert!(convex_order_dominates(&full.density, &spec, 1001).unwrap());
}
