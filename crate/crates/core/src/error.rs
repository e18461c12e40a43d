use thiserror::Error;

/// Errors raised by the simulation engines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("operator is not Hermitian: max |M - M^dagger| = {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("tensor factor index {index} out of range for {factors} factors")]
    BadFactorIndex { index: usize, factors: usize },

    #[error("state is not normalized: norm = {norm}")]
    NotNormalized { norm: f64 },

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("total dimension {dim} exceeds the cap of {cap}")]
    TooLarge { dim: usize, cap: usize },

    #[error("collective variance {variance:e} is too small for a scaling fit")]
    DegenerateVariance { variance: f64 },

    #[error("coupling operator has a degenerate spectrum (minimum gap {gap:e})")]
    DegenerateSpectrum { gap: f64 },

    #[error("decoherence time is undefined: {0}")]
    UndefinedTimescale(&'static str),

    #[error("bath value a[{index}] = {value} cannot be realized by a sigma_z qubit")]
    UnrealizableBathValues { index: usize, value: f64 },

    #[error("series needs at least two samples, got {0}")]
    EmptySeries(usize),

    #[error("Fock cutoff {cutoff} is inadequate (tail population {tail:e})")]
    InadequateCutoff { cutoff: usize, tail: f64 },

    #[error("separation ratio undefined: |beta(t)| = 0")]
    UndefinedRatio,
}

pub type Result<T> = std::result::Result<T, Error>;
