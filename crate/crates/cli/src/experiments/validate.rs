//! Fixed self-checks, one row per check. A row passes when `value <= threshold`.

use std::f64::consts::{FRAC_PI_4, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;
use thermolimit::catdynamics::{
    analytic_evolve, coherent_state, fidelity_sweep, phase_gap, wigner, wigner_point, Axis, CatModel, CatParams,
    FockState,
};
use thermolimit::ensemble::{
    collective_stats_bruteforce, collective_stats_factorized, scaling_study, EnsembleSpec, SubsystemSpec,
};
use thermolimit::hilbert::{herm_eigen, trace_distance, Operator, StateVector};
use thermolimit::regularize::{
    abel_mean, cesaro_bound, cesaro_mean, phase_samples, window_average, window_bound, OscillatorySpec,
};
use thermolimit::strongcoupling::{
    analytic_rho_s, averaged_coherences, exact_rho_s, tau_m, trace_distance_series, StrongCouplingModel,
};

use super::Sampler;
use crate::table::{Column, ColumnKind::*, ResultTable};
use crate::RunError;

type Check = (&'static str, &'static str, f64, f64);

pub struct Plan {
    seed: u64,
}

impl Plan {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn execute(&self) -> Result<Vec<ResultTable>, RunError> {
        let mut rng = Sampler::new(self.seed);
        let mut checks = Vec::new();
        checks.extend(hilbert(&mut rng)?);
        checks.extend(ensemble(&mut rng)?);
        checks.extend(strongcoupling()?);
        checks.extend(catdynamics()?);
        checks.extend(regularize()?);

        let mut table = ResultTable::new(
            "validate-all",
            "checks",
            vec![
                Column::new("module", Text),
                Column::new("check", Text),
                Column::new("value", Real),
                Column::new("threshold", Real),
                Column::new("pass", Bool),
            ],
        );
        for (module, check, value, threshold) in checks {
            table.push(vec![
                module.into(),
                check.into(),
                value.into(),
                threshold.into(),
                (value <= threshold).into(),
            ])?;
        }
        Ok(vec![table])
    }
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn hilbert(rng: &mut Sampler) -> Result<Vec<Check>, RunError> {
    let h = rng.hermitian(8);
    let spec = herm_eigen(&h)?;
    let u = spec.propagator(0.7);
    let identity = DMatrix::<Complex64>::identity(8, 8);
    let unitarity = max_abs(&(u.adjoint() * &u - identity));
    let composition = max_abs(&(spec.propagator(0.3) * spec.propagator(0.4) - &u));
    let reconstruction = max_abs(&(spec.reconstruct() - h.entries()));

    let (psi, phi) = (rng.state(2), rng.state(3));
    let reduced = psi.tensor(&phi).reduced(&[0])?;
    let partial = max_abs(&(reduced.entries() - psi.density_matrix().entries()));
    Ok(vec![
        ("hilbert", "unitarity", unitarity, 1e-10),
        ("hilbert", "composition", composition, 1e-10),
        ("hilbert", "reconstruction", reconstruction, 1e-10),
        ("hilbert", "partial_trace", partial, 1e-12),
    ])
}

fn ensemble(rng: &mut Sampler) -> Result<Vec<Check>, RunError> {
    let parts = (0..3)
        .map(|_| SubsystemSpec::new(rng.hermitian(2), rng.hermitian(2), rng.state(2)))
        .collect::<Result<Vec<_>, _>>()?;
    let spec = EnsembleSpec::heterogeneous(parts)?;
    let (fast, slow) = (collective_stats_factorized(&spec, 0.9)?, collective_stats_bruteforce(&spec, 0.9)?);
    let oracle = (fast.mean - slow.mean).abs().max((fast.variance - slow.variance).abs());

    let template = SubsystemSpec::new(Operator::sigma_z(), Operator::sigma_x(), StateVector::qubit_angle(PI / 8.0))?;
    let one = template.moments(0.3)?;
    let big = collective_stats_factorized(&EnsembleSpec::replicated(template.clone(), 1_000_000)?, 0.3)?;
    let extensivity = ((big.mean - 1e6 * one.mean) / (1e6 * one.mean))
        .abs()
        .max(((big.variance - 1e6 * one.variance) / (1e6 * one.variance)).abs());
    let study = scaling_study(&template, &[1, 10, 100, 1000, 10000], 0.3)?;
    let slope = (study.sqrt_variance_slope - 0.5).abs();

    let conserved = SubsystemSpec::new(Operator::sigma_z(), Operator::sigma_z(), StateVector::qubit_angle(0.4))?;
    let v0 = conserved.moments(0.0)?;
    let conservation = [0.5, 1.7, 4.2]
        .iter()
        .map(|&t| conserved.moments(t).map(|m| (m.mean - v0.mean).abs().max((m.variance - v0.variance).abs())))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(vec![
        ("ensemble", "factorized_vs_bruteforce", oracle, 1e-10),
        ("ensemble", "extensivity_relative_error", extensivity, 1e-9),
        ("ensemble", "scaling_slope_error", slope, 1e-9),
        ("ensemble", "conserved_observable_drift", conservation, 1e-12),
    ])
}

fn strongcoupling() -> Result<Vec<Check>, RunError> {
    let psi = StateVector::qubit_angle(FRAC_PI_4);
    let model = StrongCouplingModel::uniform(Operator::sigma_z().scale(0.5), Operator::sigma_x(), 4, 1.0, 5.0)?;
    let basis = model.v0_spectrum()?;
    let populations = |t: f64| -> Result<Vec<f64>, RunError> {
        let rho = basis.to_eigenbasis(analytic_rho_s(&model, &psi, t)?.entries())?;
        Ok((0..rho.nrows()).map(|k| rho[(k, k)].re).collect())
    };
    let p0 = populations(0.0)?;
    let mut dephasing = 0.0f64;
    for t in [0.3, 1.1, 2.9] {
        for (a, b) in populations(t)?.iter().zip(&p0) {
            dephasing = dephasing.max((a - b).abs());
        }
    }

    let commuting = StrongCouplingModel::uniform(Operator::sigma_z().scale(0.5), Operator::sigma_z(), 4, 1.0, 10.0)?;
    let mut commuting_err = 0.0f64;
    for t in [0.0, 0.5, 1.3] {
        let d = trace_distance(&exact_rho_s(&commuting, &psi, t)?, &analytic_rho_s(&commuting, &psi, t)?)?;
        commuting_err = commuting_err.max(d);
    }

    let times: Vec<f64> = (0..16).map(|k| 0.5 * k as f64 / 15.0).collect();
    let mut maxima = Vec::new();
    for g in [5.0, 20.0, 80.0] {
        let d = trace_distance_series(&model.with_coupling(g)?, &StateVector::basis(2, 0)?, &times)?;
        maxima.push(d.into_iter().fold(0.0, f64::max));
    }
    let increase = maxima.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    let ratio = maxima[2] / maxima[0];

    let window = 50.0 * tau_m(&model)?;
    let coherences = averaged_coherences(&model, &psi, window, 20001)?;
    let closed = coherences.iter().map(|c| (c.averaged_magnitude - c.closed_form).abs()).fold(0.0, f64::max);
    let excess = coherences.iter().map(|c| c.averaged_magnitude - c.bound).fold(f64::NEG_INFINITY, f64::max);
    Ok(vec![
        ("strongcoupling", "population_drift", dephasing, 1e-12),
        ("strongcoupling", "commuting_trace_distance", commuting_err, 1e-10),
        ("strongcoupling", "convergence_increase", increase, 0.0),
        ("strongcoupling", "convergence_ratio", ratio, 0.25),
        ("strongcoupling", "averaging_closed_form_error", closed, 1e-6),
        ("strongcoupling", "averaging_bound_excess", excess, 0.0),
    ])
}

fn catdynamics() -> Result<Vec<Check>, RunError> {
    let models = [1, 2]
        .iter()
        .map(|&n| CatModel::new(CatParams { n, ..CatParams::default() }))
        .collect::<Result<Vec<_>, _>>()?;
    let times = [0.0, 1.0, PI, 5.0];
    let infidelity = fidelity_sweep(&models, &times)?.iter().map(|r| 1.0 - r.overlap).fold(0.0, f64::max);

    let base = CatModel::new(CatParams { n: 10, ..CatParams::default() })?;
    let doubled = base.with_size(20)?;
    let homogeneity = (phase_gap(&doubled, 1.0) / phase_gap(&base, 1.0) - 2.0).abs() / 2.0;

    let vacuum = (wigner_point(&FockState::vacuum(16)?, 0.0, 0.0)? - 1.0 / PI).abs();

    let coherent = coherent_state(Complex64::new(1.0, 0.5), 30)?;
    let axis = Axis::symmetric(6.0, 61)?;
    let grid = wigner(&coherent, axis, axis)?;
    let normalization = (grid.normalization() - 1.0).abs();

    let evolved = analytic_evolve(&models[1], 2.0)?.state;
    let phased = evolved.with_global_phase(1.3);
    let phase = (wigner_point(&evolved, 0.4, -0.7)? - wigner_point(&phased, 0.4, -0.7)?).abs();
    let norm = (evolved.norm() - 1.0).abs();
    Ok(vec![
        ("catdynamics", "analytic_vs_bruteforce_infidelity", infidelity, 1e-6),
        ("catdynamics", "phase_gap_homogeneity", homogeneity, 1e-12),
        ("catdynamics", "vacuum_peak_error", vacuum, 1e-10),
        ("catdynamics", "grid_normalization_error", normalization, 1e-3),
        ("catdynamics", "global_phase_sensitivity", phase, 1e-12),
        ("catdynamics", "imaginary_residue", grid.max_imag_residue, 1e-10),
        ("catdynamics", "norm_error", norm, 1e-10),
    ])
}

fn regularize() -> Result<Vec<Check>, RunError> {
    let spec = OscillatorySpec::new(1.0, 100, 0.99)?;
    let cesaro = cesaro_mean(&spec).value;
    let excess = cesaro.abs() - cesaro_bound(&spec);
    let (m, f) = (100.0, 1.0f64);
    let dirichlet = (0.5 * m * f).sin() * (0.5 * (m + 1.0) * f).cos() / (m * (0.5 * f).sin());
    let closed = (cesaro - dirichlet).abs();

    let direct: f64 = (1..=20_000).map(|n| 0.99f64.powi(n) * (n as f64).cos()).sum::<f64>() * 0.01;
    let abel = (abel_mean(&spec).value - direct).abs();

    // 10 × 10 grid of non-resonant (f, M).
    let mut grid_closed = 0.0f64;
    let mut grid_excess = f64::NEG_INFINITY;
    for i in 0..10 {
        let f = 0.1 + 0.6 * i as f64;
        for j in 0..10 {
            let m = 1 + 37 * j;
            let spec = OscillatorySpec::new(f, m, 0.5)?;
            let direct = cesaro_mean(&spec).value;
            let m = m as f64;
            let dirichlet = (0.5 * m * f).sin() * (0.5 * (m + 1.0) * f).cos() / (m * (0.5 * f).sin());
            grid_closed = grid_closed.max((direct - dirichlet).abs());
            grid_excess = grid_excess.max(direct.abs() - cesaro_bound(&spec));
        }
    }

    // Slope of ln|Abel mean| against ln(1 - r) as r → 1.
    let mut slope_error = 0.0f64;
    for f in [0.7, 1.0, 2.5] {
        let xs: Vec<f64> = (4..=8).map(|k| -(k as f64) * std::f64::consts::LN_10).collect();
        let ys = xs
            .iter()
            .map(|&x| Ok(abel_mean(&OscillatorySpec::new(f, 1, 1.0 - x.exp())?).value.abs().ln()))
            .collect::<Result<Vec<f64>, RunError>>()?;
        slope_error = slope_error.max((thermolimit::ensemble::least_squares_slope(&xs, &ys) - 1.0).abs());
    }

    let (omega, window, samples) = (3.0, 40.0, 4001);
    let avg = window_average(&phase_samples(omega, window, samples))?.norm();
    Ok(vec![
        ("regularize", "cesaro_bound_excess", excess, 0.0),
        ("regularize", "cesaro_closed_form_error", closed, 1e-12),
        ("regularize", "cesaro_grid_closed_form_error", grid_closed, 1e-10),
        ("regularize", "cesaro_grid_bound_excess", grid_excess, 0.0),
        ("regularize", "abel_series_error", abel, 1e-10),
        ("regularize", "abel_linear_decay_slope_error", slope_error, 1e-3),
        ("regularize", "window_bound_excess", avg - window_bound(omega, window, samples), 0.0),
    ])
}
