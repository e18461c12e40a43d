//! Means of oscillatory sequences `cos(N f)` and finite-window time averages.

use num_complex::Complex64;

use crate::{Error, Result};

/// `|sin(f/2)|` at or below which `f` counts as a multiple of `2π`.
pub const RESONANCE_TOL: f64 = 1e-12;

/// Phase increment `f`, Cesàro truncation `m` and Abel parameter `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorySpec {
    f: f64,
    m: usize,
    r: f64,
}

impl OscillatorySpec {
    pub fn new(f: f64, m: usize, r: f64) -> Result<Self> {
        if !f.is_finite() {
            return Err(Error::InvalidSpec(format!("phase increment must be finite, got {f}")));
        }
        if m == 0 {
            return Err(Error::InvalidSpec("Cesàro truncation must be at least 1".into()));
        }
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidSpec(format!("Abel parameter must lie in (0, 1), got {r}")));
        }
        Ok(Self { f, m, r })
    }

    pub fn f(&self) -> f64 {
        self.f
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn is_resonant(&self) -> bool {
        (0.5 * self.f).sin().abs() <= RESONANCE_TOL
    }
}

/// A regularized mean; `resonant` marks `f ≡ 0 (mod 2π)`, where every term is 1
/// and nothing averages away.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mean {
    pub value: f64,
    pub resonant: bool,
}

/// `(1/M) Σ_{N=1}^{M} cos(N f)` by direct summation.
pub fn cesaro_mean(spec: &OscillatorySpec) -> Mean {
    if spec.is_resonant() {
        return Mean { value: 1.0, resonant: true };
    }
    let sum: f64 = (1..=spec.m).map(|n| (n as f64 * spec.f).cos()).sum();
    Mean { value: sum / spec.m as f64, resonant: false }
}

/// Dirichlet-kernel bound `1/(M |sin(f/2)|)` on the Cesàro mean.
pub fn cesaro_bound(spec: &OscillatorySpec) -> f64 {
    1.0 / (spec.m as f64 * (0.5 * spec.f).sin().abs())
}

/// `(1-r) Σ_{N≥1} rᴺ cos(N f) = (1-r)(r cos f - r²)/(1 - 2r cos f + r²)`.
///
/// At resonance the reported value is the `r → 1` limit, 1.
pub fn abel_mean(spec: &OscillatorySpec) -> Mean {
    if spec.is_resonant() {
        return Mean { value: 1.0, resonant: true };
    }
    let (r, c) = (spec.r, spec.f.cos());
    let value = (1.0 - r) * (r * c - r * r) / (1.0 - 2.0 * r * c + r * r);
    Mean { value, resonant: false }
}

/// Trapezoidal mean of samples on a uniform grid covering the whole window.
pub fn window_average(samples: &[Complex64]) -> Result<Complex64> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::EmptySeries(n));
    }
    let interior: Complex64 = samples[1..n - 1].iter().sum();
    let ends = (samples[0] + samples[n - 1]) * 0.5;
    Ok((interior + ends) / (n - 1) as f64)
}

/// Samples `e^{iΩt}` on `samples` uniform points of `[0, window]`.
pub fn phase_samples(omega: f64, window: f64, samples: usize) -> Vec<Complex64> {
    let h = if samples > 1 { window / (samples - 1) as f64 } else { 0.0 };
    (0..samples).map(|k| Complex64::from_polar(1.0, omega * k as f64 * h)).collect()
}

/// `2|sin(ΩT/2)|/(|Ω|T)`, the exact window mean magnitude of `e^{iΩt}`.
pub fn window_closed_form(omega: f64, window: f64) -> f64 {
    if omega == 0.0 {
        return 1.0;
    }
    2.0 * (0.5 * omega * window).sin().abs() / (omega.abs() * window)
}

/// `2/(|Ω|T) + Δt²Ω²/12`, bounding the trapezoidal mean of `e^{iΩt}`.
pub fn window_bound(omega: f64, window: f64, samples: usize) -> f64 {
    let dt = window / (samples.max(2) - 1) as f64;
    2.0 / (omega.abs() * window) + dt * dt * omega * omega / 12.0
}
