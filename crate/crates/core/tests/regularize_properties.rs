use std::f64::consts::PI;

use proptest::prelude::*;

use thermolimit::regularize::{
    abel_mean, cesaro_bound, cesaro_mean, phase_samples, window_average, window_bound, OscillatorySpec,
};

fn dirichlet(f: f64, m: usize) -> f64 {
    let m = m as f64;
    (m * f / 2.0).sin() * ((m + 1.0) * f / 2.0).cos() / (m * (f / 2.0).sin())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn cesaro_within_dirichlet_bound(f in -10.0f64..10.0, m in 1usize..=100_000) {
        let spec = OscillatorySpec::new(f, m, 0.5).unwrap();
        prop_assume!((f / 2.0).sin().abs() > 1e-6);
        let mean = cesaro_mean(&spec);
        prop_assert!(!mean.resonant);
        prop_assert!(mean.value.abs() <= cesaro_bound(&spec));
        prop_assert!((mean.value - dirichlet(f, m)).abs() <= 1e-10);
    }

    #[test]
    fn abel_decays_linearly(f in 0.05f64..(2.0 * PI - 0.05), log_eps in -8.0f64..-1.0) {
        let eps = 10f64.powf(log_eps);
        let mean = abel_mean(&OscillatorySpec::new(f, 1, 1.0 - eps).unwrap());
        prop_assert!(mean.value.abs() <= 2.0 / (1.0 - f.cos()) * eps);
    }

    #[test]
    fn window_mean_bounded(omega in 0.5f64..200.0, window in 1.0f64..50.0, samples in 1000usize..20000) {
        let avg = window_average(&phase_samples(omega, window, samples)).unwrap();
        prop_assert!(avg.norm() <= window_bound(omega, window, samples));
    }
}

#[test]
fn resonant_phases_are_flagged() {
    for k in -3..=3 {
        let spec = OscillatorySpec::new(2.0 * PI * k as f64, 17, 0.9).unwrap();
        assert!(cesaro_mean(&spec).resonant);
        assert!(abel_mean(&spec).resonant);
    }
}
