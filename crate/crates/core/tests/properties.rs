mod common;

use proptest::prelude::*;
use wish_core::bits::Bits;
use wish_core::model::{binarize, parse_uai, power_model, write_uai};
use wish_core::oracle::{brute_force_log_z, brute_force_quantiles, graph_log_z};
use wish_core::parity::{propagate, Propagation};
use wish_core::solver::{brute_force_map, solve};
use wish_core::{Budget, ParitySystem};

fn system(n: usize) -> impl Strategy<Value = ParitySystem> {
    prop::collection::vec((0u64..1 << n, any::<bool>()), 0..=n + 1).prop_map(move |rows| ParitySystem::from_masks(n, &rows))
}

fn holds(sys: &ParitySystem, x: u64) -> bool {
    sys.evaluate(&Bits::from_u64(sys.num_vars(), x)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn hash_zero_iff_satisfied(sys in system(6), x in 0u64..64) {
        let bits = Bits::from_u64(6, x);
        let h = sys.hash(&bits).unwrap();
        prop_assert_eq!(h.count_ones() == 0, sys.evaluate(&bits).unwrap());
    }

    #[test]
    fn reduction_preserves_solution_set(sys in system(7)) {
        let reduced = sys.row_reduce();
        let mut direct: Vec<u64> = (0..128).filter(|&x| holds(&sys, x)).collect();
        let mut listed: Vec<u64> = reduced
            .solutions()
            .iter()
            .map(|b| (0..7).map(|i| (b.get(i) as u64) << i).sum())
            .collect();
        direct.sort_unstable();
        listed.sort_unstable();
        prop_assert_eq!(reduced.is_feasible(), !direct.is_empty());
        prop_assert_eq!(&direct, &listed);
        if reduced.is_feasible() {
            prop_assert_eq!(Some(direct.len()), reduced.log2_solution_count().map(|k| 1 << k));
        }
        let round: Vec<u64> = (0..128).filter(|&x| holds(&reduced.to_system(), x)).collect();
        prop_assert_eq!(direct, round);
    }

    #[test]
    fn propagation_only_forces_implied_bits(sys in system(6), fix in prop::collection::vec(prop::option::of(any::<bool>()), 6)) {
        let reduced = sys.row_reduce();
        let consistent: Vec<u64> = (0..64u64)
            .filter(|&x| holds(&sys, x))
            .filter(|&x| fix.iter().enumerate().all(|(i, v)| v.is_none_or(|v| (x >> i & 1 == 1) == v)))
            .collect();
        let partial: Vec<(usize, bool)> = fix.iter().enumerate().filter_map(|(i, v)| v.map(|v| (i, v))).collect();
        match propagate(&reduced, &partial) {
            Propagation::Conflict => prop_assert!(consistent.is_empty()),
            Propagation::Forced(forced) => {
                prop_assert!(!consistent.is_empty());
                for (var, val) in forced {
                    prop_assert!(consistent.iter().all(|&x| (x >> var & 1 == 1) == val));
                }
            }
        }
    }

    #[test]
    fn solver_matches_enumeration(seed in 0u64..10_000, sys in system(9)) {
        let model = binarize(&common::random_ising(9, seed));
        let a = solve(&model, &sys, Budget::unlimited()).unwrap();
        let b = brute_force_map(&model, &sys, 24).unwrap();
        prop_assert_eq!(a.status, b.status);
        prop_assert_eq!(a.best_log_weight.to_bits(), b.best_log_weight.to_bits());
    }

    #[test]
    fn binarization_and_round_trip_preserve_z(seed in 0u64..10_000) {
        let g = common::random_multivalued(10, seed);
        let z = graph_log_z(&g, 24).unwrap();
        let zb = brute_force_log_z(&binarize(&g), 24).unwrap();
        let zr = graph_log_z(&parse_uai(&write_uai(&g)).unwrap(), 24).unwrap();
        prop_assert!(z == zb || (z - zb).abs() < 1e-9);
        prop_assert!(z == zr || (z - zr).abs() < 1e-9);
    }

    #[test]
    fn power_model_multiplies_z(seed in 0u64..10_000, copies in 1usize..=3) {
        let m = binarize(&common::random_ising(4, seed));
        let z = brute_force_log_z(&m, 24).unwrap();
        let zp = brute_force_log_z(&power_model(&m, copies).unwrap(), 24).unwrap();
        prop_assert!((zp - copies as f64 * z).abs() < 1e-9);
    }

    #[test]
    fn tail_counts_are_monotone(seed in 0u64..10_000) {
        let p = brute_force_quantiles(&binarize(&common::random_ising(8, seed)), 24).unwrap();
        let q = p.quantiles();
        for w in q.windows(2) {
            prop_assert!(w[0] >= w[1]);
        }
        for (i, &b) in q.iter().enumerate() {
            prop_assert!(p.tail_count(b) >= 1u64 << i);
        }
        let mut last = u64::MAX;
        for k in -20..20 {
            let g = p.tail_count(k as f64 * 0.5);
            prop_assert!(g <= last);
            last = g;
        }
    }
}
