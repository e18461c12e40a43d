//! Collective observables of `N` independent subsystems.
//!
//! For `H = Σ H_i`, `A = Σ A_i` and a product initial state, every cross
//! term `⟨A_i(t) A_j(t)⟩ - ⟨A_i(t)⟩⟨A_j(t)⟩` with `i ≠ j` vanishes, so
//! the mean and the variance of `A(t)` are sums of single-subsystem
//! quantities. [`collective_stats_factorized`] uses that; it costs `O(N)`
//! for a heterogeneous list and `O(1)` for a replicated template.
//! [`collective_stats_bruteforce`] builds the full Kronecker sums instead
//! and serves as the oracle.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::hilbert::{expectation, herm_eigen, Operator, SpectralDecomp, StateVector};
use crate::{par, Error, Result};

/// Largest total Hilbert-space dimension the brute-force path accepts.
pub const BRUTE_FORCE_DIM_CAP: usize = 4096;
/// Per-subsystem variance below which a scaling fit is refused.
pub const DEGENERATE_VARIANCE: f64 = 1e-14;

/// One subsystem: Hamiltonian `H_i`, observable `A_i`, initial state `|ψ_i⟩`.
#[derive(Debug, Clone)]
pub struct SubsystemSpec {
    h: Operator,
    a: Operator,
    psi0: StateVector,
}

impl SubsystemSpec {
    pub fn new(h: Operator, a: Operator, psi0: StateVector) -> Result<Self> {
        if !h.is_hermitian() || !a.is_hermitian() {
            return Err(Error::InvalidSpec("subsystem H and A must be Hermitian".into()));
        }
        let dim = h.dim();
        for found in [a.dim(), psi0.dim()] {
            if found != dim {
                return Err(Error::DimensionMismatch { expected: dim, found });
            }
        }
        if h.dims().len() != 1 || a.dims().len() != 1 || psi0.dims().len() != 1 {
            return Err(Error::InvalidSpec("subsystem operators must be single-factor".into()));
        }
        Ok(Self { h, a, psi0 })
    }

    pub fn h(&self) -> &Operator {
        &self.h
    }

    pub fn a(&self) -> &Operator {
        &self.a
    }

    pub fn psi0(&self) -> &StateVector {
        &self.psi0
    }

    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    /// Mean and variance of `A_i` in `e^{-iH_i t}|ψ_i⟩`.
    pub fn moments(&self, t: f64) -> Result<Moments> {
        let psi_t = herm_eigen(&self.h)?.evolve(&self.psi0, t)?;
        Moments::of(&self.a, &psi_t)
    }
}

/// Mean and variance of one observable in one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
}

impl Moments {
    fn of(a: &Operator, psi: &StateVector) -> Result<Self> {
        let a_psi = a.apply(psi)?;
        let mean = psi.amplitudes().dotc(&a_psi).re;
        let second = a_psi.norm_squared();
        Ok(Self { mean, variance: second - mean * mean })
    }
}

/// `N` subsystems in a product state: either an explicit list or one
/// template replicated `n` times.
#[derive(Debug, Clone)]
pub enum EnsembleSpec {
    Heterogeneous(Vec<SubsystemSpec>),
    Replicated { template: SubsystemSpec, n: usize },
}

impl EnsembleSpec {
    pub fn heterogeneous(subsystems: Vec<SubsystemSpec>) -> Result<Self> {
        if subsystems.is_empty() {
            return Err(Error::InvalidSpec("ensemble needs at least one subsystem".into()));
        }
        Ok(Self::Heterogeneous(subsystems))
    }

    pub fn replicated(template: SubsystemSpec, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSpec("ensemble size n must be at least 1".into()));
        }
        Ok(Self::Replicated { template, n })
    }

    /// Number of subsystems `N`.
    pub fn len(&self) -> usize {
        match self {
            Self::Heterogeneous(list) => list.len(),
            Self::Replicated { n, .. } => *n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dims(&self) -> Vec<usize> {
        match self {
            Self::Heterogeneous(list) => list.iter().map(SubsystemSpec::dim).collect(),
            Self::Replicated { template, n } => vec![template.dim(); *n],
        }
    }

    /// Product of subsystem dimensions, `None` on overflow.
    pub fn total_dim(&self) -> Option<usize> {
        self.dims().iter().try_fold(1usize, |acc, &d| acc.checked_mul(d))
    }

    fn subsystem(&self, k: usize) -> &SubsystemSpec {
        match self {
            Self::Heterogeneous(list) => &list[k],
            Self::Replicated { template, .. } => template,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.is_empty() {
            return Err(Error::InvalidSpec("ensemble needs at least one subsystem".into()));
        }
        Ok(())
    }
}

/// Mean and variance of the collective observable at time `t`, with the
/// per-subsystem averages `Ā(t)` and `avg ΔA(t)²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollectiveStats {
    pub t: f64,
    pub mean: f64,
    pub variance: f64,
    pub mean_per: f64,
    pub variance_per: f64,
}

/// Mean and variance of `A(t) = Σ A_i(t)` computed subsystem by subsystem.
///
/// For a replicated template the single-subsystem moments are multiplied by
/// `n`, so `mean(n) = n · mean(1)` holds as a floating-point identity.
pub fn collective_stats_factorized(spec: &EnsembleSpec, t: f64) -> Result<CollectiveStats> {
    spec.validate()?;
    match spec {
        EnsembleSpec::Replicated { template, n } => {
            let m = template.moments(t)?;
            let n = *n as f64;
            Ok(CollectiveStats {
                t,
                mean: n * m.mean,
                variance: n * m.variance,
                mean_per: m.mean,
                variance_per: m.variance,
            })
        }
        EnsembleSpec::Heterogeneous(list) => {
            let moments = par::collect_ok(par::map(list, |s| s.moments(t)))?;
            let mean: f64 = moments.iter().map(|m| m.mean).sum();
            let variance: f64 = moments.iter().map(|m| m.variance).sum();
            let n = list.len() as f64;
            Ok(CollectiveStats { t, mean, variance, mean_per: mean / n, variance_per: variance / n })
        }
    }
}

/// The full-tensor-product problem, diagonalized once so it can be
/// evaluated on many times.
#[derive(Debug, Clone)]
pub struct BruteForceEnsemble {
    n: usize,
    spectrum: SpectralDecomp,
    observable: Operator,
    psi0: StateVector,
}

impl BruteForceEnsemble {
    /// Builds `H = Σ_i I⊗…⊗H_i⊗…⊗I`, `A` likewise, and `|ψ(0)⟩ = ⊗|ψ_i⟩`.
    pub fn new(spec: &EnsembleSpec) -> Result<Self> {
        spec.validate()?;
        let dims = spec.dims();
        let dim = spec.total_dim().unwrap_or(usize::MAX);
        if dim > BRUTE_FORCE_DIM_CAP {
            return Err(Error::TooLarge { dim, cap: BRUTE_FORCE_DIM_CAP });
        }
        let n = spec.len();
        let mut h = Operator::zeros(dim);
        let mut a = Operator::zeros(dim);
        let mut factors = Vec::with_capacity(n);
        for k in 0..n {
            let sub = spec.subsystem(k);
            h = h.add(&sub.h.embed(k, &dims)?)?;
            a = a.add(&sub.a.embed(k, &dims)?)?;
            factors.push(sub.psi0.clone());
        }
        let psi0 = StateVector::product(&factors)?;
        Ok(Self { n, spectrum: herm_eigen(&h)?, observable: a, psi0 })
    }

    pub fn stats(&self, t: f64) -> Result<CollectiveStats> {
        let psi_t = self.spectrum.evolve(&self.psi0, t)?;
        let m = Moments::of(&self.observable, &psi_t)?;
        let n = self.n as f64;
        Ok(CollectiveStats {
            t,
            mean: m.mean,
            variance: m.variance,
            mean_per: m.mean / n,
            variance_per: m.variance / n,
        })
    }

    /// Stats on every time of `times`, in order.
    pub fn stats_on_grid(&self, times: &[f64]) -> Result<Vec<CollectiveStats>> {
        par::collect_ok(par::map(times, |&t| self.stats(t)))
    }

    /// `⟨ψ(t)|A|ψ(t)⟩` as a complex number, for realness checks.
    pub fn raw_expectation(&self, t: f64) -> Result<Complex64> {
        let psi_t = self.spectrum.evolve(&self.psi0, t)?;
        expectation(&self.observable, &psi_t)
    }

    pub fn initial_state(&self) -> &DVector<Complex64> {
        self.psi0.amplitudes()
    }
}

/// Same quantities as [`collective_stats_factorized`], evaluated literally on
/// the full tensor product. Refuses total dimensions above
/// [`BRUTE_FORCE_DIM_CAP`].
pub fn collective_stats_bruteforce(spec: &EnsembleSpec, t: f64) -> Result<CollectiveStats> {
    BruteForceEnsemble::new(spec)?.stats(t)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingRow {
    pub n: usize,
    pub mean: f64,
    pub sqrt_variance: f64,
    /// `sqrt_variance / |mean|`; infinite when the mean vanishes.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingStudy {
    pub t: f64,
    pub rows: Vec<ScalingRow>,
    /// Least-squares slope of `ln sqrt_variance` against `ln n`.
    pub sqrt_variance_slope: f64,
    /// Slope of `ln ratio` against `ln n`; `None` if any mean is zero.
    pub ratio_slope: Option<f64>,
}

/// Fluctuation-to-mean scaling of a replicated template over `n_values`.
pub fn scaling_study(template: &SubsystemSpec, n_values: &[usize], t: f64) -> Result<ScalingStudy> {
    if n_values.len() < 2 {
        return Err(Error::InvalidSpec("scaling study needs at least two n values".into()));
    }
    if n_values.contains(&0) {
        return Err(Error::InvalidSpec("ensemble size n must be at least 1".into()));
    }
    let single = template.moments(t)?;
    if single.variance < DEGENERATE_VARIANCE {
        return Err(Error::DegenerateVariance { variance: single.variance });
    }
    let rows = par::collect_ok(par::map(n_values, |&n| {
        let spec = EnsembleSpec::replicated(template.clone(), n)?;
        let stats = collective_stats_factorized(&spec, t)?;
        let sqrt_variance = stats.variance.sqrt();
        Ok(ScalingRow { n, mean: stats.mean, sqrt_variance, ratio: sqrt_variance / stats.mean.abs() })
    }))?;

    let log_n: Vec<f64> = rows.iter().map(|r| (r.n as f64).ln()).collect();
    let log_sd: Vec<f64> = rows.iter().map(|r| r.sqrt_variance.ln()).collect();
    let sqrt_variance_slope = least_squares_slope(&log_n, &log_sd);
    let ratio_slope = rows.iter().all(|r| r.mean != 0.0).then(|| {
        let log_ratio: Vec<f64> = rows.iter().map(|r| r.ratio.ln()).collect();
        least_squares_slope(&log_n, &log_ratio)
    });
    Ok(ScalingStudy { t, rows, sqrt_variance_slope, ratio_slope })
}

/// Unweighted least-squares slope of `ys` against `xs`.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}
