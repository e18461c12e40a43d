//! Single-mode states in the truncated number basis `|0⟩ … |cutoff⟩`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::hilbert::{herm_eigen, Operator, StateVector, NORM_TOL};
use crate::{Error, Result};

/// Number of top levels whose population is watched for truncation.
pub const TAIL_LEVELS: usize = 4;
/// Largest population allowed in the top [`TAIL_LEVELS`] levels.
pub const TAIL_TOL: f64 = 1e-8;

/// Smallest cutoff deemed adequate for states whose coherent amplitude stays
/// below `amplitude`: `ceil(B + 6√B + 9)` with `B = amplitude²` (Poisson mean
/// plus six standard deviations, plus margin).
pub fn required_cutoff(amplitude: f64) -> usize {
    let b = amplitude * amplitude;
    (b + 6.0 * b.sqrt() + 9.0).ceil() as usize
}

/// A normalized state of one oscillator mode.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    amplitudes: DVector<Complex64>,
}

impl FockState {
    /// Checks normalization and the tail-population rule.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(Error::InvalidSpec("Fock cutoff must be at least 1".into()));
        }
        let state = Self { amplitudes: DVector::from_vec(amplitudes) };
        let norm = state.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        state.check_tail()?;
        Ok(state)
    }

    pub fn vacuum(cutoff: usize) -> Result<Self> {
        Self::number(0, cutoff)
    }

    /// Number state `|n⟩`.
    pub fn number(n: usize, cutoff: usize) -> Result<Self> {
        if n > cutoff {
            return Err(Error::InadequateCutoff { cutoff, tail: 1.0 });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); cutoff + 1];
        amps[n] = Complex64::new(1.0, 0.0);
        Self::new(amps)
    }

    pub(crate) fn from_raw(amplitudes: DVector<Complex64>) -> Self {
        Self { amplitudes }
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn cutoff(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// Population of levels above `cutoff - TAIL_LEVELS`.
    pub fn tail_population(&self) -> f64 {
        tail_of(&self.amplitudes)
    }

    pub fn check_tail(&self) -> Result<()> {
        let tail = self.tail_population();
        if tail > TAIL_TOL {
            return Err(Error::InadequateCutoff { cutoff: self.cutoff(), tail });
        }
        Ok(())
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &FockState) -> Result<Complex64> {
        if self.cutoff() != other.cutoff() {
            return Err(Error::DimensionMismatch { expected: self.amplitudes.len(), found: other.amplitudes.len() });
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn mean_number(&self) -> f64 {
        self.amplitudes.iter().enumerate().map(|(n, c)| n as f64 * c.norm_sqr()).sum()
    }

    /// `⟨a⟩`.
    pub fn mean_annihilation(&self) -> Complex64 {
        let a = &self.amplitudes;
        (1..a.len()).map(|n| a[n - 1].conj() * a[n] * (n as f64).sqrt()).sum()
    }

    /// `⟨(-1)^{a†a}⟩`.
    pub fn parity(&self) -> f64 {
        self.amplitudes.iter().enumerate().map(|(n, c)| if n % 2 == 0 { c.norm_sqr() } else { -c.norm_sqr() }).sum()
    }

    pub fn with_global_phase(&self, theta: f64) -> FockState {
        let phase = Complex64::from_polar(1.0, theta);
        Self { amplitudes: self.amplitudes.map(|c| c * phase) }
    }

    /// Same state with zero-padding up to a larger cutoff.
    pub fn padded(&self, cutoff: usize) -> FockState {
        if cutoff <= self.cutoff() {
            return self.clone();
        }
        let mut amps = DVector::zeros(cutoff + 1);
        amps.rows_mut(0, self.amplitudes.len()).copy_from(&self.amplitudes);
        Self { amplitudes: amps }
    }

    pub fn to_state_vector(&self) -> StateVector {
        StateVector::from_raw(self.amplitudes.clone(), vec![self.amplitudes.len()])
    }
}

pub(crate) fn tail_of(amplitudes: &DVector<Complex64>) -> f64 {
    let start = amplitudes.len().saturating_sub(TAIL_LEVELS);
    amplitudes.iter().skip(start).map(|c| c.norm_sqr()).sum()
}

/// Lowering operator `a` on `cutoff + 1` levels.
pub fn annihilation(cutoff: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(cutoff + 1, cutoff + 1, |i, j| {
        if j == i + 1 {
            Complex64::new((j as f64).sqrt(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Closed-form overlap `⟨α|β⟩ = exp(-|α|²/2 - |β|²/2 + α*β)` of untruncated
/// coherent states.
pub fn coherent_overlap(alpha: Complex64, beta: Complex64) -> Complex64 {
    (-0.5 * alpha.norm_sqr() - 0.5 * beta.norm_sqr() + alpha.conj() * beta).exp()
}

/// Coherent state `e^{-|α|²/2} Σ αⁿ/√(n!) |n⟩`, renormalized on the
/// truncation. The population lost to truncation counts towards the tail.
pub fn coherent_state(alpha: Complex64, cutoff: usize) -> Result<FockState> {
    if cutoff < 1 {
        return Err(Error::InvalidSpec("Fock cutoff must be at least 1".into()));
    }
    if !(alpha.re.is_finite() && alpha.im.is_finite()) {
        return Err(Error::InvalidSpec("coherent amplitude must be finite".into()));
    }
    let mut amps = DVector::zeros(cutoff + 1);
    amps[0] = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for n in 1..=cutoff {
        amps[n] = amps[n - 1] * alpha / (n as f64).sqrt();
    }
    let kept = amps.norm_squared();
    let tail = tail_of(&amps) + (1.0 - kept).max(0.0);
    if tail > TAIL_TOL || kept == 0.0 {
        return Err(Error::InadequateCutoff { cutoff, tail });
    }
    amps.unscale_mut(kept.sqrt());
    Ok(FockState { amplitudes: amps })
}

/// Applies `exp(β a† - β* a)` by exponentiating the truncated generator.
pub fn displacement_apply(beta: Complex64, state: &FockState) -> Result<FockState> {
    if beta == Complex64::new(0.0, 0.0) {
        return Ok(state.clone());
    }
    let a = annihilation(state.cutoff());
    // D(β) = exp(-iK) with Hermitian K = i(β a† - β* a).
    let i = Complex64::new(0.0, 1.0);
    let k = (a.adjoint() * beta - &a * beta.conj()) * i;
    let generator = Operator::hermitian(k, vec![state.cutoff() + 1])?;
    let out = herm_eigen(&generator)?.evolve(&state.to_state_vector(), 1.0)?;
    let result = FockState { amplitudes: out.amplitudes().clone() };
    result.check_tail()?;
    Ok(result)
}

/// `𝒩 (|αe^{iφ}⟩ + |αe^{-iφ}⟩)` with `𝒩 = [2 + 2 Re⟨αe^{iφ}|αe^{-iφ}⟩]^{-1/2}`
/// from the exact coherent overlap.
pub fn cat_state(alpha: f64, phi: f64, cutoff: usize) -> Result<FockState> {
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::InvalidSpec(format!("cat amplitude must be non-negative, got {alpha}")));
    }
    let z1 = Complex64::from_polar(alpha, phi);
    let z2 = Complex64::from_polar(alpha, -phi);
    let n = cat_normalization(z1, z2);
    let b1 = coherent_state(z1, cutoff)?;
    let b2 = coherent_state(z2, cutoff)?;
    let amps = (b1.amplitudes + b2.amplitudes) * Complex64::new(n, 0.0);
    Ok(FockState { amplitudes: amps })
}

/// `[2 + 2 Re⟨z1|z2⟩]^{-1/2}`.
pub fn cat_normalization(z1: Complex64, z2: Complex64) -> f64 {
    (2.0 + 2.0 * coherent_overlap(z1, z2).re).sqrt().recip()
}
