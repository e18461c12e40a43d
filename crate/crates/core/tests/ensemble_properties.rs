mod common;

use proptest::prelude::*;

use common::{random_hermitian, random_state};
use thermolimit::ensemble::{
    collective_stats_bruteforce, collective_stats_factorized, BruteForceEnsemble, EnsembleSpec, SubsystemSpec,
};
use thermolimit::hilbert::Operator;

fn subsystem(dim: usize, seed: u64) -> SubsystemSpec {
    SubsystemSpec::new(
        random_hermitian(dim, seed),
        random_hermitian(dim, seed.wrapping_mul(31).wrapping_add(1)),
        random_state(dim, seed),
    )
    .unwrap()
}

fn times() -> Vec<f64> {
    (0..16).map(|k| 0.37 * k as f64).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn factorized_matches_bruteforce(dims in prop::collection::vec(2usize..=3, 1..=5), seed: u64) {
        let spec = EnsembleSpec::heterogeneous(
            dims.iter().enumerate().map(|(k, &d)| subsystem(d, seed.wrapping_add(k as u64))).collect(),
        ).unwrap();
        let brute = BruteForceEnsemble::new(&spec).unwrap();
        for t in times() {
            let fast = collective_stats_factorized(&spec, t).unwrap();
            let slow = brute.stats(t).unwrap();
            prop_assert!((fast.mean - slow.mean).abs() <= 1e-10);
            prop_assert!((fast.variance - slow.variance).abs() <= 1e-10);
        }
    }

    #[test]
    fn replication_is_exactly_extensive(dim in 2usize..=4, seed: u64, n in 1usize..=1_000_000, t in 0.0f64..20.0) {
        let template = subsystem(dim, seed);
        let one = collective_stats_factorized(&EnsembleSpec::replicated(template.clone(), 1).unwrap(), t).unwrap();
        let many = collective_stats_factorized(&EnsembleSpec::replicated(template, n).unwrap(), t).unwrap();
        prop_assert_eq!(many.mean, n as f64 * one.mean);
        prop_assert_eq!(many.variance, n as f64 * one.variance);
    }

    #[test]
    fn conserved_observable_is_stationary(dim in 2usize..=4, seed: u64, n in 1usize..=50) {
        // A = f(H) commutes with H.
        let h = random_hermitian(dim, seed);
        let a = h.matmul(&h).unwrap().add(&h.scale(0.5)).unwrap();
        let a = Operator::hermitian(a.entries().clone(), vec![dim]).unwrap();
        let spec = EnsembleSpec::replicated(SubsystemSpec::new(h, a, random_state(dim, seed)).unwrap(), n).unwrap();
        let start = collective_stats_factorized(&spec, 0.0).unwrap();
        for t in times() {
            let s = collective_stats_factorized(&spec, t).unwrap();
            prop_assert!((s.mean - start.mean).abs() <= 1e-10 * (1.0 + start.mean.abs()));
            prop_assert!((s.variance - start.variance).abs() <= 1e-10 * (1.0 + start.variance.abs()));
        }
    }

    #[test]
    fn heterogeneous_stats_add(dims in prop::collection::vec(2usize..=4, 1..=8), seed: u64, t in 0.0f64..10.0) {
        let parts: Vec<SubsystemSpec> =
            dims.iter().enumerate().map(|(k, &d)| subsystem(d, seed.wrapping_add(k as u64))).collect();
        let whole = collective_stats_factorized(&EnsembleSpec::heterogeneous(parts.clone()).unwrap(), t).unwrap();
        let (mut mean, mut variance) = (0.0, 0.0);
        for p in parts {
            let s = collective_stats_factorized(&EnsembleSpec::replicated(p, 1).unwrap(), t).unwrap();
            mean += s.mean;
            variance += s.variance;
        }
        prop_assert!((whole.mean - mean).abs() <= 1e-10);
        prop_assert!((whole.variance - variance).abs() <= 1e-10);
    }
}

#[test]
fn replicated_bruteforce_agrees_up_to_cap() {
    let template = subsystem(2, 11);
    for n in [1, 4, 8, 9] {
        let spec = EnsembleSpec::replicated(template.clone(), n).unwrap();
        for t in [0.0, 0.8, 2.5] {
            let fast = collective_stats_factorized(&spec, t).unwrap();
            let slow = collective_stats_bruteforce(&spec, t).unwrap();
            assert!((fast.mean - slow.mean).abs() <= 1e-10, "n={n}");
            assert!((fast.variance - slow.variance).abs() <= 1e-10, "n={n}");
        }
    }
}
