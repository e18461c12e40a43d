//! Wigner functions through displaced parity.
//!
//! Conventions: `a = (x + ip)/√2`, `[x, p] = i`, `λ = (x + ip)/√2` and
//!
//! ```text
//! W(x, p) = (1/π) ⟨ψ| D(λ) Π D(λ)† |ψ⟩,   Π = (-1)^{a†a}
//! ```
//!
//! so the vacuum peaks at `1/π` and `∫ W dx dp = 1`. `D(λ)†` is applied as
//! `e^{i x P} e^{-i p X}` (equal up to a global phase that drops out of every
//! quadratic form), with `X` and `P` diagonalized once per cutoff.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::{FRAC_1_PI, FRAC_1_SQRT_2};

use super::fock::{annihilation, required_cutoff, tail_of, FockState, TAIL_TOL};
use crate::hilbert::{herm_eigen, Operator, SpectralDecomp, StateVector};
use crate::{par, Error, Result};

/// Extra levels above the cutoff rule for the displaced-state workspace.
const WORKSPACE_MARGIN: usize = 8;

/// Quadrature eigenbases on a fixed truncation, reused for every phase-space
/// point.
#[derive(Debug, Clone)]
pub struct PhaseSpace {
    cutoff: usize,
    x: SpectralDecomp,
    p: SpectralDecomp,
}

impl PhaseSpace {
    pub fn new(cutoff: usize) -> Result<Self> {
        let a = annihilation(cutoff);
        let ad = a.adjoint();
        let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let x = (&a + &ad) * s;
        let p = (&ad - &a) * Complex64::new(0.0, FRAC_1_SQRT_2);
        let dims = vec![cutoff + 1];
        Ok(Self {
            cutoff,
            x: herm_eigen(&Operator::hermitian(x, dims.clone())?)?,
            p: herm_eigen(&Operator::hermitian(p, dims)?)?,
        })
    }

    /// Workspace large enough to displace states of mean photon number up to
    /// `mean_number` by up to `radius` (in `λ` units).
    pub fn for_extent(mean_number: f64, radius: f64) -> Result<Self> {
        Self::new(required_cutoff(mean_number.sqrt() + radius) + WORKSPACE_MARGIN)
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// `D(λ)†|ψ⟩` up to a global phase, `ψ` already padded to this cutoff.
    pub fn displace_back(&self, psi: &StateVector, x: f64, p: f64) -> Result<DVector<Complex64>> {
        let shifted = self.x.evolve(psi, p)?;
        let back = self.p.evolve(&shifted, -x)?;
        let amps = back.amplitudes().clone();
        let tail = tail_of(&amps);
        if tail > TAIL_TOL {
            return Err(Error::InadequateCutoff { cutoff: self.cutoff, tail });
        }
        Ok(amps)
    }

    fn prepare(&self, state: &FockState) -> Result<StateVector> {
        if state.cutoff() > self.cutoff {
            return Err(Error::DimensionMismatch { expected: self.cutoff + 1, found: state.cutoff() + 1 });
        }
        Ok(state.padded(self.cutoff).to_state_vector())
    }

    /// `W(x, p)` together with the imaginary residue of the parity sum.
    pub fn value(&self, state: &FockState, x: f64, p: f64) -> Result<(f64, f64)> {
        let psi = self.prepare(state)?;
        let phi = self.displace_back(&psi, x, p)?;
        let z = parity_form(&phi, &phi) * FRAC_1_PI;
        Ok((z.re, z.im.abs()))
    }

    /// Cross term `(1/π) ⟨ψ₂| D(λ) Π D(λ)† |ψ₁⟩`, the Wigner function of the
    /// operator `|ψ₁⟩⟨ψ₂|`.
    pub fn cross(&self, psi1: &FockState, psi2: &FockState, x: f64, p: f64) -> Result<Complex64> {
        let phi1 = self.displace_back(&self.prepare(psi1)?, x, p)?;
        let phi2 = self.displace_back(&self.prepare(psi2)?, x, p)?;
        Ok(parity_form(&phi2, &phi1) * FRAC_1_PI)
    }
}

/// `Σ_n (-1)^n conj(u_n) v_n`.
fn parity_form(u: &DVector<Complex64>, v: &DVector<Complex64>) -> Complex64 {
    u.iter()
        .zip(v.iter())
        .enumerate()
        .map(|(n, (a, b))| {
            let term = a.conj() * b;
            if n % 2 == 0 {
                term
            } else {
                -term
            }
        })
        .sum()
}

/// Evenly spaced samples of `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        if count < 2 || !(min.is_finite() && max.is_finite()) || max <= min {
            return Err(Error::InvalidSpec(format!("bad grid axis [{min}, {max}] x {count}")));
        }
        Ok(Self { min, max, count })
    }

    /// Symmetric axis `[-half_width, half_width]`.
    pub fn symmetric(half_width: f64, count: usize) -> Result<Self> {
        Self::new(-half_width, half_width, count)
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.count - 1) as f64
    }

    pub fn points(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.count).map(|k| self.min + k as f64 * h).collect()
    }

    fn max_abs(&self) -> f64 {
        self.min.abs().max(self.max.abs())
    }
}

/// Rectangular grid of Wigner samples; `values[(ix, ip)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    pub x_axis: Vec<f64>,
    pub p_axis: Vec<f64>,
    pub values: DMatrix<f64>,
    /// Largest discarded imaginary part of the parity sums.
    pub max_imag_residue: f64,
}

impl WignerGrid {
    /// `Σ W Δx Δp`.
    pub fn normalization(&self) -> f64 {
        let dx = self.x_axis[1] - self.x_axis[0];
        let dp = self.p_axis[1] - self.p_axis[0];
        self.values.sum() * dx * dp
    }

    pub fn value(&self, ix: usize, ip: usize) -> f64 {
        self.values[(ix, ip)]
    }
}

/// Samples `W` on the grid `x_axis × p_axis`.
pub fn wigner(state: &FockState, x_axis: Axis, p_axis: Axis) -> Result<WignerGrid> {
    let radius = x_axis.max_abs().hypot(p_axis.max_abs()) * FRAC_1_SQRT_2;
    let space = PhaseSpace::for_extent(state.mean_number(), radius)?;
    let space = if space.cutoff() < state.cutoff() { PhaseSpace::new(state.cutoff())? } else { space };
    let psi = space.prepare(state)?;
    let xs = x_axis.points();
    let ps = p_axis.points();
    let columns = par::collect_ok(par::map(&xs, |&x| {
        ps.iter()
            .map(|&p| {
                let phi = space.displace_back(&psi, x, p)?;
                Ok(parity_form(&phi, &phi) * FRAC_1_PI)
            })
            .collect::<Result<Vec<Complex64>>>()
    }))?;
    let mut residue = 0.0f64;
    let values = DMatrix::from_fn(xs.len(), ps.len(), |i, j| {
        residue = residue.max(columns[i][j].im.abs());
        columns[i][j].re
    });
    Ok(WignerGrid { x_axis: xs, p_axis: ps, values, max_imag_residue: residue })
}

/// `W(x, p)` at a single point.
pub fn wigner_point(state: &FockState, x: f64, p: f64) -> Result<f64> {
    let radius = x.hypot(p) * FRAC_1_SQRT_2;
    let space = PhaseSpace::for_extent(state.mean_number(), radius)?;
    let space = if space.cutoff() < state.cutoff() { PhaseSpace::new(state.cutoff())? } else { space };
    Ok(space.value(state, x, p)?.0)
}
