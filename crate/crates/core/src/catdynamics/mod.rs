//! A single field mode coupled to a collective ensemble observable, with the
//! ensemble in an eigenstate of `Σ A_i` (eigenvalue `Nā`):
//!
//! ```text
//! H = ω a†a + Nā (γ a† + γ* a)
//! ```
//!
//! Starting from the cat `𝒩(|αe^{iφ}⟩ + |αe^{-iφ}⟩)`, the state at time `t` is
//! a superposition of two coherent branches displaced by `β(t)e^{-iωt}` with
//! `β(t) = (Nāγ/ω)(1 - e^{iωt})`. Both the closed form and a truncated
//! matrix propagator are provided, together with the Wigner function and the
//! interference measures that shrink as the ensemble grows.

pub mod fock;
pub mod wigner;

pub use fock::{
    annihilation, cat_normalization, cat_state, coherent_overlap, coherent_state, displacement_apply, required_cutoff,
    FockState, TAIL_LEVELS, TAIL_TOL,
};
pub use wigner::{wigner, wigner_point, Axis, PhaseSpace, WignerGrid};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::hilbert::{herm_eigen, Operator, SpectralDecomp};
use crate::regularize::window_average;
use crate::{par, Error, Result};

/// Largest cutoff accepted by the matrix propagator.
pub const BRUTE_FORCE_CUTOFF_CAP: usize = 512;
/// Half-length (in `λ` units) of the fringe-axis scan around the midpoint.
const FRINGE_HALF_LENGTH: f64 = 1.5;

/// Inputs of a [`CatModel`]; `cutoff: None` applies the cutoff rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatParams {
    pub omega: f64,
    pub gamma: Complex64,
    pub alpha: f64,
    pub phi: f64,
    pub n: usize,
    pub a_bar: f64,
    pub cutoff: Option<usize>,
}

impl Default for CatParams {
    fn default() -> Self {
        Self {
            omega: 1.0,
            gamma: Complex64::new(0.1, 0.0),
            alpha: 1.0,
            phi: std::f64::consts::FRAC_PI_4,
            n: 1,
            a_bar: 1.0,
            cutoff: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatModel {
    omega: f64,
    gamma: Complex64,
    alpha: f64,
    phi: f64,
    n: usize,
    a_bar: f64,
    cutoff: usize,
}

impl CatModel {
    pub fn new(params: CatParams) -> Result<Self> {
        let CatParams { omega, gamma, alpha, phi, n, a_bar, cutoff } = params;
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::InvalidSpec(format!("omega must be positive, got {omega}")));
        }
        if !(gamma.re.is_finite() && gamma.im.is_finite()) {
            return Err(Error::InvalidSpec("gamma must be finite".into()));
        }
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::InvalidSpec(format!("alpha must be non-negative, got {alpha}")));
        }
        if !phi.is_finite() || !a_bar.is_finite() {
            return Err(Error::InvalidSpec("phi and a_bar must be finite".into()));
        }
        if n == 0 {
            return Err(Error::InvalidSpec("ensemble size must be positive".into()));
        }
        let mut model = Self { omega, gamma, alpha, phi, n, a_bar, cutoff: 0 };
        let needed = model.rule_cutoff();
        model.cutoff = match cutoff {
            None => needed,
            Some(c) if c >= needed => c,
            Some(c) => {
                let tail = poisson_tail(model.max_displacement() + alpha, c);
                return Err(Error::InadequateCutoff { cutoff: c, tail });
            }
        };
        Ok(model)
    }

    /// Same model at ensemble size `n`, cutoff re-derived from the rule.
    pub fn with_size(&self, n: usize) -> Result<Self> {
        Self::new(CatParams { n, cutoff: None, ..self.params() })
    }

    pub fn params(&self) -> CatParams {
        CatParams {
            omega: self.omega,
            gamma: self.gamma,
            alpha: self.alpha,
            phi: self.phi,
            n: self.n,
            a_bar: self.a_bar,
            cutoff: Some(self.cutoff),
        }
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn gamma(&self) -> Complex64 {
        self.gamma
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a_bar(&self) -> f64 {
        self.a_bar
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// `Nā`, the eigenvalue of the collective bath observable.
    pub fn collective_value(&self) -> f64 {
        self.n as f64 * self.a_bar
    }

    /// `max_t |β(t)| = 2|Nā||γ|/ω`.
    pub fn max_displacement(&self) -> f64 {
        2.0 * self.collective_value().abs() * self.gamma.norm() / self.omega
    }

    pub fn rule_cutoff(&self) -> usize {
        required_cutoff(self.max_displacement() + self.alpha)
    }

    /// `β(t)`. Computed as `(γ·(Nā/ω))·(1 - e^{iωt})` so that doubling `N`
    /// doubles every component exactly.
    pub fn beta(&self, t: f64) -> Complex64 {
        let lead = self.gamma * (self.collective_value() / self.omega);
        lead * (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, self.omega * t))
    }

    /// `ξ(t) = (Nā)²|γ|²/ω² (ωt - sin ωt)`.
    pub fn xi(&self, t: f64) -> f64 {
        let s = self.collective_value();
        let wt = self.omega * t;
        s * s * self.gamma.norm_sqr() / (self.omega * self.omega) * (wt - wt.sin())
    }

    /// `(φ₁, φ₂)` from `e^{iφ_k} = exp((α/2)(β e^{∓iφ} - β* e^{±iφ}))`.
    pub fn branch_phases(&self, t: f64) -> (f64, f64) {
        let beta = self.beta(t);
        let branch = |sign: f64| {
            let rot = Complex64::from_polar(1.0, sign * self.phi);
            let z = (beta * rot.conj() - beta.conj() * rot) * (0.5 * self.alpha);
            assert!(z.re.abs() <= 1e-12 * (1.0 + z.norm()), "branch phase exponent is not imaginary: {z}");
            z.im
        };
        (branch(1.0), branch(-1.0))
    }

    /// Coherent amplitudes of the two branches at time `t`.
    pub fn branch_centers(&self, t: f64) -> (Complex64, Complex64) {
        let rot = Complex64::from_polar(1.0, -self.omega * t);
        let shift = self.beta(t) * rot;
        (
            shift + Complex64::from_polar(self.alpha, self.phi) * rot,
            shift + Complex64::from_polar(self.alpha, -self.phi) * rot,
        )
    }

    /// `𝒩` of the initial cat, exact in the branch overlap.
    pub fn normalization(&self) -> f64 {
        cat_normalization(Complex64::from_polar(self.alpha, self.phi), Complex64::from_polar(self.alpha, -self.phi))
    }

    pub fn initial_state(&self) -> Result<FockState> {
        cat_state(self.alpha, self.phi, self.cutoff)
    }

    /// `H = ω a†a + Nā(γ a† + γ* a)` on the model truncation.
    pub fn hamiltonian(&self) -> Result<Operator> {
        let a = annihilation(self.cutoff);
        let ad = a.adjoint();
        let number = DMatrix::from_fn(self.cutoff + 1, self.cutoff + 1, |i, j| {
            Complex64::new(if i == j { self.omega * i as f64 } else { 0.0 }, 0.0)
        });
        let s = self.collective_value();
        let h = number + (ad * self.gamma + a * self.gamma.conj()) * Complex64::new(s, 0.0);
        Operator::hermitian(h, vec![self.cutoff + 1])
    }
}

/// Poisson mass above `cutoff - TAIL_LEVELS` for mean `amplitude²`.
fn poisson_tail(amplitude: f64, cutoff: usize) -> f64 {
    let mean = amplitude * amplitude;
    let start = cutoff.saturating_sub(TAIL_LEVELS) + 1;
    let mut p = (-mean).exp();
    let mut below = 0.0;
    for k in 0..start {
        below += p;
        p *= mean / (k + 1) as f64;
    }
    (1.0 - below).max(0.0)
}

/// Closed-form state at time `t` and the scalars that build it.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticEvolution {
    pub state: FockState,
    pub xi: f64,
    pub beta_t: Complex64,
    pub phi1: f64,
    pub phi2: f64,
}

pub fn analytic_evolve(model: &CatModel, t: f64) -> Result<AnalyticEvolution> {
    let beta_t = model.beta(t);
    let xi = model.xi(t);
    let (phi1, phi2) = model.branch_phases(t);
    let (c1, c2) = model.branch_centers(t);
    let b1 = coherent_state(c1, model.cutoff)?;
    let b2 = coherent_state(c2, model.cutoff)?;
    let n = model.normalization();
    let w1 = Complex64::from_polar(n, xi + phi1);
    let w2 = Complex64::from_polar(n, xi + phi2);
    let state = FockState::from_raw(b1.amplitudes() * w1 + b2.amplitudes() * w2);
    Ok(AnalyticEvolution { state, xi, beta_t, phi1, phi2 })
}

/// Diagonalized model Hamiltonian, reusable across times and initial states.
#[derive(Debug, Clone)]
pub struct BruteForcePropagator {
    spectrum: SpectralDecomp,
    cutoff: usize,
}

impl BruteForcePropagator {
    pub fn new(model: &CatModel) -> Result<Self> {
        if model.cutoff > BRUTE_FORCE_CUTOFF_CAP {
            return Err(Error::TooLarge { dim: model.cutoff + 1, cap: BRUTE_FORCE_CUTOFF_CAP + 1 });
        }
        Ok(Self { spectrum: herm_eigen(&model.hamiltonian()?)?, cutoff: model.cutoff })
    }

    pub fn evolve(&self, initial: &FockState, t: f64) -> Result<FockState> {
        if initial.cutoff() != self.cutoff {
            return Err(Error::DimensionMismatch { expected: self.cutoff + 1, found: initial.cutoff() + 1 });
        }
        let out = self.spectrum.evolve(&initial.to_state_vector(), t)?;
        let state = FockState::from_raw(out.amplitudes().clone());
        state.check_tail()?;
        Ok(state)
    }
}

/// The model cat evolved with the truncated matrix Hamiltonian.
pub fn brute_force_evolve(model: &CatModel, t: f64) -> Result<FockState> {
    BruteForcePropagator::new(model)?.evolve(&model.initial_state()?, t)
}

/// Any initial state on the model truncation evolved with the matrix
/// Hamiltonian.
pub fn brute_force_evolve_from(model: &CatModel, initial: &FockState, t: f64) -> Result<FockState> {
    BruteForcePropagator::new(model)?.evolve(initial, t)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityRow {
    pub n: usize,
    pub t: f64,
    pub overlap: f64,
}

/// `|⟨analytic|brute force⟩|` for every model and time; one diagonalization
/// per model.
pub fn fidelity_sweep(models: &[CatModel], times: &[f64]) -> Result<Vec<FidelityRow>> {
    let mut rows = Vec::with_capacity(models.len() * times.len());
    for model in models {
        let propagator = BruteForcePropagator::new(model)?;
        let initial = model.initial_state()?;
        let batch = par::collect_ok(par::map(times, |&t| {
            let exact = propagator.evolve(&initial, t)?;
            let analytic = analytic_evolve(model, t)?;
            Ok(FidelityRow { n: model.n, t, overlap: analytic.state.inner(&exact)?.norm() })
        }))?;
        rows.extend(batch);
    }
    Ok(rows)
}

/// `|φ₁(t) - φ₂(t)|`.
pub fn phase_gap(model: &CatModel, t: f64) -> f64 {
    let (phi1, phi2) = model.branch_phases(t);
    (phi1 - phi2).abs()
}

/// `2α|sin φ| / |β(t)|`, the branch separation relative to the common
/// displacement.
pub fn separation_ratio(model: &CatModel, t: f64) -> Result<f64> {
    let beta = model.beta(t).norm();
    let scale = model.gamma.norm() * (model.collective_value() / model.omega).abs();
    if beta == 0.0 || beta <= 1e-12 * scale {
        return Err(Error::UndefinedRatio);
    }
    Ok(2.0 * model.alpha * model.phi.sin().abs() / beta)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferenceMetrics {
    pub phase_gap: f64,
    /// `f64::INFINITY` when `β(t)` vanishes.
    pub separation_ratio: f64,
    pub fringe_visibility: f64,
}

pub fn interference_metrics(model: &CatModel, t: f64) -> Result<InterferenceMetrics> {
    let separation_ratio = match separation_ratio(model, t) {
        Ok(r) => r,
        Err(Error::UndefinedRatio) => f64::INFINITY,
        Err(e) => return Err(e),
    };
    Ok(InterferenceMetrics {
        phase_gap: phase_gap(model, t),
        separation_ratio,
        fringe_visibility: fringe_visibility(model, t)?,
    })
}

/// Peak of `|W_int|` on the fringe axis over the larger lobe peak.
///
/// `W_int(λ) = 2 Re[w₁ w₂* W_{12}(λ)]` is the cross term of the two branches
/// `w_k |c_k⟩`; the fringe axis is the line through the branch midpoint
/// perpendicular to the separation, where the Gaussian envelope of the cross
/// term peaks. Well separated branches give a value close to 2.
pub fn fringe_visibility(model: &CatModel, t: f64) -> Result<f64> {
    let (c1, c2) = model.branch_centers(t);
    let sep = c1 - c2;
    if sep.norm() < 1e-12 {
        return Ok(0.0);
    }
    let (phi1, phi2) = model.branch_phases(t);
    let norm = model.normalization();
    let weight = norm * norm * Complex64::from_polar(1.0, phi1 - phi2);

    let mid = (c1 + c2) * 0.5;
    let axis = Complex64::new(0.0, 1.0) * sep / sep.norm();
    let reach = c1.norm().max(c2.norm()) + mid.norm() + FRINGE_HALF_LENGTH;
    let space = PhaseSpace::new(required_cutoff(reach) + 8)?;
    let b1 = coherent_state(c1, space.cutoff())?;
    let b2 = coherent_state(c2, space.cutoff())?;
    let to_xp = |lambda: Complex64| (lambda.re * std::f64::consts::SQRT_2, lambda.im * std::f64::consts::SQRT_2);

    let lobe = |b: &FockState, c: Complex64| -> Result<f64> {
        let (x, p) = to_xp(c);
        Ok(space.value(b, x, p)?.0)
    };
    let lobe_peak = (norm * norm) * lobe(&b1, c1)?.max(lobe(&b2, c2)?);

    // Fringe period along the axis is π/|c₁ - c₂|.
    let period = std::f64::consts::PI / sep.norm();
    let step = (period / 40.0).min(0.01);
    let count = (2.0 * FRINGE_HALF_LENGTH / step).ceil() as usize + 1;
    let offsets: Vec<f64> =
        (0..count).map(|k| -FRINGE_HALF_LENGTH + 2.0 * FRINGE_HALF_LENGTH * k as f64 / (count - 1) as f64).collect();
    let values = par::collect_ok(par::map(&offsets, |&s| {
        let (x, p) = to_xp(mid + axis * s);
        let w12 = space.cross(&b1, &b2, x, p)?;
        Ok((2.0 * (weight * w12).re).abs())
    }))?;
    let peak = values.into_iter().fold(0.0, f64::max);
    Ok(peak / lobe_peak)
}

/// `|⟨e^{i(φ₁-φ₂)}⟩_T|`, the window average of the relative branch phase over
/// `[0, window]`.
pub fn averaged_interference(model: &CatModel, window: f64, samples: usize) -> Result<f64> {
    if !(window.is_finite() && window > 0.0) {
        return Err(Error::InvalidSpec(format!("window must be positive, got {window}")));
    }
    if samples < 2 {
        return Err(Error::EmptySeries(samples));
    }
    let h = window / (samples - 1) as f64;
    let series: Vec<Complex64> = (0..samples)
        .map(|k| {
            let (phi1, phi2) = model.branch_phases(k as f64 * h);
            Complex64::from_polar(1.0, phi1 - phi2)
        })
        .collect();
    Ok(window_average(&series)?.norm())
}
