//! A quantum system coupled strongly to an ensemble through `g V_0 ⊗ Σ A_i`.
//!
//! When the bath starts in a joint eigenstate `Π|χ_i⟩` of the `A_i`
//! (`A_i|χ_i⟩ = a_i|χ_i⟩`) and the coupling dominates, the leading-order
//! state is diagonal in the eigenbasis `{|v_n⟩}` of `V_0`:
//!
//! ```text
//! |ψ(t)⟩ ≈ Σ_n e^{-i (γ̇_n + g N ā v_n) t} |v_n⟩⟨v_n|ψ_S(0)⟩ ⊗ Π|χ_i⟩,   γ̇_n = ⟨v_n|H_S|v_n⟩
//! ```
//!
//! Both phases carry the `e^{-iEt}` sign of Schrödinger evolution. With
//! `[H_S, V_0] = 0` and no bath Hamiltonian this is the exact evolution,
//! which is what fixes the sign of the `γ̇_n` term.
//!
//! The exact model realizes the bath as qubits with `A_i = σ_z` and
//! computational-basis `|χ_i⟩`, so `a_i = ±1`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::hilbert::{herm_eigen, DensityMatrix, Operator, SpectralDecomp, StateVector};
use crate::{par, Error, Result};

/// Eigenvalue gaps of `V_0` at or below this count as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;
/// Largest system ⊗ bath dimension the exact path accepts.
pub const EXACT_DIM_CAP: usize = 4096;
const BATH_VALUE_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct StrongCouplingModel {
    h_s: Operator,
    v0: Operator,
    a_values: Vec<f64>,
    a_bar: f64,
    g: f64,
    h_bath: Option<Operator>,
}

impl StrongCouplingModel {
    /// `a_values` holds one bath eigenvalue per site, so `N = a_values.len()`.
    pub fn new(h_s: Operator, v0: Operator, a_values: Vec<f64>, g: f64) -> Result<Self> {
        if !h_s.is_hermitian() || !v0.is_hermitian() {
            return Err(Error::InvalidSpec("H_S and V_0 must be Hermitian".into()));
        }
        if h_s.dim() != v0.dim() {
            return Err(Error::DimensionMismatch { expected: h_s.dim(), found: v0.dim() });
        }
        if a_values.is_empty() {
            return Err(Error::InvalidSpec("bath size N must be at least 1".into()));
        }
        if a_values.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidSpec("bath values must be finite".into()));
        }
        if !(g.is_finite() && g >= 0.0) {
            return Err(Error::InvalidSpec(format!("coupling g must be non-negative, got {g}")));
        }
        let a_bar = a_values.iter().sum::<f64>() / a_values.len() as f64;
        Ok(Self { h_s, v0, a_values, a_bar, g, h_bath: None })
    }

    /// Bath of `n` sites all with eigenvalue `a`.
    pub fn uniform(h_s: Operator, v0: Operator, n: usize, a: f64, g: f64) -> Result<Self> {
        Self::new(h_s, v0, vec![a; n], g)
    }

    /// Adds a per-site bath Hamiltonian, replicated on every site. Only the
    /// exact path sees it.
    pub fn with_bath_hamiltonian(mut self, h: Operator) -> Result<Self> {
        if !h.is_hermitian() {
            return Err(Error::InvalidSpec("bath Hamiltonian must be Hermitian".into()));
        }
        if h.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: h.dim() });
        }
        self.h_bath = Some(h);
        Ok(self)
    }

    /// Same model with a different coupling strength.
    pub fn with_coupling(&self, g: f64) -> Result<Self> {
        if !(g.is_finite() && g >= 0.0) {
            return Err(Error::InvalidSpec(format!("coupling g must be non-negative, got {g}")));
        }
        Ok(Self { g, ..self.clone() })
    }

    pub fn h_s(&self) -> &Operator {
        &self.h_s
    }

    pub fn v0(&self) -> &Operator {
        &self.v0
    }

    pub fn n(&self) -> usize {
        self.a_values.len()
    }

    pub fn a_values(&self) -> &[f64] {
        &self.a_values
    }

    pub fn a_bar(&self) -> f64 {
        self.a_bar
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn h_bath(&self) -> Option<&Operator> {
        self.h_bath.as_ref()
    }

    pub fn system_dim(&self) -> usize {
        self.h_s.dim()
    }

    /// Eigendecomposition of `V_0`, rejecting degenerate spectra.
    pub fn v0_spectrum(&self) -> Result<SpectralDecomp> {
        let spectrum = herm_eigen(&self.v0)?;
        let gap = spectrum.min_gap();
        if gap <= DEGENERACY_TOL {
            return Err(Error::DegenerateSpectrum { gap });
        }
        Ok(spectrum)
    }

    /// `N · ā`, the eigenvalue of `Σ A_i` on the bath state.
    pub fn collective_bath_value(&self) -> f64 {
        self.n() as f64 * self.a_bar
    }

    /// Total dimension of the exact system ⊗ qubit-bath model.
    pub fn exact_dim(&self) -> Option<usize> {
        1usize.checked_shl(self.n() as u32).and_then(|b| b.checked_mul(self.system_dim()))
    }
}

/// `γ̇_n = ⟨v_n|H_S|v_n⟩` paired with the ascending eigenvalues `v_n` of `V_0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseData {
    pub gamma_dot: Vec<f64>,
    pub v: Vec<f64>,
}

pub fn phase_data(model: &StrongCouplingModel) -> Result<PhaseData> {
    let spectrum = model.v0_spectrum()?;
    Ok(phase_data_in(model, &spectrum))
}

fn phase_data_in(model: &StrongCouplingModel, spectrum: &SpectralDecomp) -> PhaseData {
    let u = spectrum.eigenvectors();
    let h = model.h_s.entries();
    let gamma_dot = (0..spectrum.dim())
        .map(|k| {
            let col = u.column(k);
            col.dotc(&(h * col)).re
        })
        .collect();
    PhaseData { gamma_dot, v: spectrum.eigenvalues().to_vec() }
}

/// The leading-order dynamics, with the `V_0` spectrum computed once.
#[derive(Debug, Clone)]
pub struct AnalyticDynamics {
    spectrum: SpectralDecomp,
    phases: PhaseData,
    energies: Vec<f64>,
}

impl AnalyticDynamics {
    pub fn new(model: &StrongCouplingModel) -> Result<Self> {
        let spectrum = model.v0_spectrum()?;
        let phases = phase_data_in(model, &spectrum);
        let coupling = model.g * model.collective_bath_value();
        let energies = phases.gamma_dot.iter().zip(&phases.v).map(|(gd, v)| gd + coupling * v).collect();
        Ok(Self { spectrum, phases, energies })
    }

    pub fn spectrum(&self) -> &SpectralDecomp {
        &self.spectrum
    }

    pub fn phase_data(&self) -> &PhaseData {
        &self.phases
    }

    /// Branch energies `γ̇_n + g N ā v_n`.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Phase rate of the coherence `ρ_mn` in the `V_0` basis,
    /// `ρ_mn(t) = ρ_mn(0) e^{-i Ω_mn t}`.
    pub fn phase_rate(&self, m: usize, n: usize) -> f64 {
        self.energies[m] - self.energies[n]
    }

    pub fn state(&self, psi_s0: &StateVector, t: f64) -> Result<StateVector> {
        if psi_s0.dim() != self.spectrum.dim() {
            return Err(Error::DimensionMismatch { expected: self.spectrum.dim(), found: psi_s0.dim() });
        }
        if (psi_s0.norm() - 1.0).abs() > crate::hilbert::NORM_TOL {
            return Err(Error::NotNormalized { norm: psi_s0.norm() });
        }
        if t == 0.0 {
            return Ok(psi_s0.clone());
        }
        let u = self.spectrum.eigenvectors();
        let mut coeffs = u.adjoint() * psi_s0.amplitudes();
        for (c, e) in coeffs.iter_mut().zip(&self.energies) {
            *c *= Complex64::from_polar(1.0, -e * t);
        }
        Ok(StateVector::from_raw(u * coeffs, psi_s0.dims().to_vec()))
    }

    pub fn rho(&self, psi_s0: &StateVector, t: f64) -> Result<DensityMatrix> {
        Ok(self.state(psi_s0, t)?.density_matrix())
    }
}

/// System factor of the leading-order strong-coupling state. The bath factor
/// stays `Π|χ_i⟩`, see [`analytic_full_state`].
pub fn analytic_state(model: &StrongCouplingModel, psi_s0: &StateVector, t: f64) -> Result<StateVector> {
    AnalyticDynamics::new(model)?.state(psi_s0, t)
}

/// `ρ_S(t)` of the leading-order state: populations in the `V_0` basis are
/// frozen and every coherence only rotates its phase.
pub fn analytic_rho_s(model: &StrongCouplingModel, psi_s0: &StateVector, t: f64) -> Result<DensityMatrix> {
    AnalyticDynamics::new(model)?.rho(psi_s0, t)
}

/// Computational-basis qubit bath `Π|χ_i⟩` with `σ_z|χ_i⟩ = a_i|χ_i⟩`.
pub fn bath_state(model: &StrongCouplingModel) -> Result<StateVector> {
    let sites = model
        .a_values
        .iter()
        .enumerate()
        .map(|(index, &a)| {
            if (a - 1.0).abs() <= BATH_VALUE_TOL {
                StateVector::basis(2, 0)
            } else if (a + 1.0).abs() <= BATH_VALUE_TOL {
                StateVector::basis(2, 1)
            } else {
                Err(Error::UnrealizableBathValues { index, value: a })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    StateVector::product(&sites)
}

/// The leading-order state on system ⊗ bath. The bath factor is the initial
/// product state, untouched.
pub fn analytic_full_state(model: &StrongCouplingModel, psi_s0: &StateVector, t: f64) -> Result<StateVector> {
    let bath = bath_state(model)?;
    Ok(analytic_state(model, psi_s0, t)?.tensor(&bath))
}

/// Exact dynamics of `H_S⊗I + I⊗Σ H_i + g V_0⊗Σ σ_z^{(i)}`, diagonalized once.
#[derive(Debug, Clone)]
pub struct ExactDynamics {
    spectrum: SpectralDecomp,
    bath: StateVector,
}

impl ExactDynamics {
    pub fn new(model: &StrongCouplingModel) -> Result<Self> {
        let dim = model.exact_dim().unwrap_or(usize::MAX);
        if dim > EXACT_DIM_CAP {
            return Err(Error::TooLarge { dim, cap: EXACT_DIM_CAP });
        }
        let bath = bath_state(model)?;
        let mut dims = vec![model.system_dim()];
        dims.extend(std::iter::repeat_n(2, model.n()));

        let mut h = model.h_s.embed(0, &dims)?;
        let sigma_z = Operator::sigma_z();
        let mut collective = Operator::zeros(1usize << model.n());
        let bath_dims = vec![2; model.n()];
        for site in 0..model.n() {
            collective = collective.add(&sigma_z.embed(site, &bath_dims)?)?;
            if let Some(hb) = &model.h_bath {
                h = h.add(&hb.embed(site + 1, &dims)?)?;
            }
        }
        let coupling = crate::hilbert::kron(&model.v0.scale(model.g), &collective);
        let h = h.add(&coupling)?;
        Ok(Self { spectrum: herm_eigen(&h)?, bath })
    }

    pub fn rho(&self, psi_s0: &StateVector, t: f64) -> Result<DensityMatrix> {
        let psi0 = psi_s0.tensor(&self.bath);
        self.spectrum.evolve(&psi0, t)?.reduced(&[0])
    }
}

/// `ρ_S(t)` from exact evolution of system ⊗ qubit bath followed by a
/// partial trace over the bath.
pub fn exact_rho_s(model: &StrongCouplingModel, psi_s0: &StateVector, t: f64) -> Result<DensityMatrix> {
    ExactDynamics::new(model)?.rho(psi_s0, t)
}

/// `1 / (N |ā| g min|v_m - v_n|)`.
pub fn tau_m(model: &StrongCouplingModel) -> Result<f64> {
    if model.system_dim() < 2 {
        return Err(Error::UndefinedTimescale("system dimension is 1"));
    }
    if model.a_bar == 0.0 {
        return Err(Error::UndefinedTimescale("bath mean a_bar is zero"));
    }
    if model.g == 0.0 {
        return Err(Error::UndefinedTimescale("coupling g is zero"));
    }
    let gap = model.v0_spectrum()?.min_gap();
    Ok(1.0 / (model.n() as f64 * model.a_bar.abs() * model.g * gap))
}

/// Entrywise trapezoidal average of samples on a uniform time grid.
pub fn time_averaged_rho(series: &[DensityMatrix]) -> Result<DensityMatrix> {
    if series.len() < 2 {
        return Err(Error::EmptySeries(series.len()));
    }
    let dim = series[0].dim();
    if let Some(bad) = series.iter().find(|r| r.dim() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: bad.dim() });
    }
    let intervals = (series.len() - 1) as f64;
    let mut acc = DMatrix::<Complex64>::zeros(dim, dim);
    for (k, rho) in series.iter().enumerate() {
        let w = if k == 0 || k + 1 == series.len() { 0.5 } else { 1.0 };
        acc += rho.entries() * Complex64::new(w / intervals, 0.0);
    }
    Ok(DensityMatrix::from_raw(acc, series[0].dims().to_vec()))
}

/// `sqrt(Σ_{m≠n} |ρ_mn|²)` with `ρ` expressed in `basis`.
pub fn offdiagonal_norm(rho: &DensityMatrix, basis: &SpectralDecomp) -> Result<f64> {
    let m = basis.to_eigenbasis(rho.entries())?;
    let mut acc = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if i != j {
                acc += m[(i, j)].norm_sqr();
            }
        }
    }
    Ok(acc.sqrt())
}

/// Worst trace distance between exact and leading-order `ρ_S` over a time
/// grid, for one coupling strength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub g: f64,
    pub max_trace_distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of `ln max_trace_distance` against `ln g`.
    pub slope: f64,
}

/// Trace distance between exact and analytic `ρ_S` at every time.
pub fn trace_distance_series(model: &StrongCouplingModel, psi_s0: &StateVector, times: &[f64]) -> Result<Vec<f64>> {
    let exact = ExactDynamics::new(model)?;
    let analytic = AnalyticDynamics::new(model)?;
    par::collect_ok(par::map(times, |&t| {
        crate::hilbert::trace_distance(&exact.rho(psi_s0, t)?, &analytic.rho(psi_s0, t)?)
    }))
}

/// Runs the exact-vs-analytic comparison along a ladder of couplings.
pub fn convergence_study(
    model: &StrongCouplingModel,
    psi_s0: &StateVector,
    g_values: &[f64],
    times: &[f64],
) -> Result<ConvergenceStudy> {
    let rows = par::collect_ok(par::map(g_values, |&g| {
        let series = trace_distance_series(&model.with_coupling(g)?, psi_s0, times)?;
        let max_trace_distance = series.into_iter().fold(0.0, f64::max);
        Ok(ConvergenceRow { g, max_trace_distance })
    }))?;
    let xs: Vec<f64> = rows.iter().map(|r| r.g.ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.max_trace_distance.ln()).collect();
    let slope = if rows.len() >= 2 { crate::ensemble::least_squares_slope(&xs, &ys) } else { f64::NAN };
    Ok(ConvergenceStudy { rows, slope })
}

/// One coherence of the time-averaged leading-order `ρ_S`, in the `V_0`
/// basis, next to its closed-form value and the averaging bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceAverage {
    pub m: usize,
    pub n: usize,
    /// Phase rate `Ω_mn`.
    pub omega: f64,
    pub initial_magnitude: f64,
    pub averaged_magnitude: f64,
    /// `|ρ_mn(0)| · 2|sin(Ω T/2)| / (|Ω| T)`.
    pub closed_form: f64,
    /// `|ρ_mn(0)| · (2/(Ω_min T) + Δt² Ω² / 12)`.
    pub bound: f64,
}

/// Averages the leading-order `ρ_S` over `[0, window]` on `samples` points and
/// reports every coherence (`m < n`).
pub fn averaged_coherences(
    model: &StrongCouplingModel,
    psi_s0: &StateVector,
    window: f64,
    samples: usize,
) -> Result<Vec<CoherenceAverage>> {
    if samples < 2 {
        return Err(Error::EmptySeries(samples));
    }
    if !(window.is_finite() && window > 0.0) {
        return Err(Error::InvalidSpec(format!("averaging window must be positive, got {window}")));
    }
    let dynamics = AnalyticDynamics::new(model)?;
    let dt = window / (samples - 1) as f64;
    let series = par::collect_ok(par::map_range(samples, |k| dynamics.rho(psi_s0, k as f64 * dt)))?;
    let averaged = time_averaged_rho(&series)?;
    let basis = dynamics.spectrum();
    let initial = basis.to_eigenbasis(series[0].entries())?;
    let avg = basis.to_eigenbasis(averaged.entries())?;

    let dim = basis.dim();
    let pairs: Vec<(usize, usize)> = (0..dim).flat_map(|m| (m + 1..dim).map(move |n| (m, n))).collect();
    let omega_min = pairs.iter().map(|&(m, n)| dynamics.phase_rate(m, n).abs()).fold(f64::INFINITY, f64::min);
    Ok(pairs
        .into_iter()
        .map(|(m, n)| {
            let omega = dynamics.phase_rate(m, n);
            let initial_magnitude = initial[(m, n)].norm();
            let x = omega.abs() * window;
            let decay = if x == 0.0 { 1.0 } else { 2.0 * (x / 2.0).sin().abs() / x };
            CoherenceAverage {
                m,
                n,
                omega,
                initial_magnitude,
                averaged_magnitude: avg[(m, n)].norm(),
                closed_form: initial_magnitude * decay,
                bound: initial_magnitude * (2.0 / (omega_min * window) + dt * dt * omega * omega / 12.0),
            }
        })
        .collect())
}
