//! JSON run configuration. Every section has defaults, so
//! `{"experiment": "theorem1-scaling"}` is a complete config.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI};
use std::path::PathBuf;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thermolimit::hilbert::{Operator, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Theorem1Scaling,
    Theorem2Decoherence,
    Theorem3Cat,
    ValidateAll,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Self::Theorem1Scaling => "theorem1-scaling",
            Self::Theorem2Decoherence => "theorem2-decoherence",
            Self::Theorem3Cat => "theorem3-cat",
            Self::ValidateAll => "validate-all",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub parameters: Parameters,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default)]
    pub format: Format,
    #[serde(default)]
    pub seed: u64,
}

fn default_output() -> PathBuf {
    PathBuf::from("results")
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Parameters {
    pub theorem1: Theorem1Params,
    pub theorem2: Theorem2Params,
    pub theorem3: Theorem3Params,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PauliSpec {
    pub pauli: Pauli,
    #[serde(default = "one")]
    pub scale: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSpec {
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Option<Vec<Vec<f64>>>,
}

/// `{"pauli": "x", "scale": 0.5}` or `{"re": [[..]], "im": [[..]]}`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum OperatorSpec {
    Pauli(PauliSpec),
    Matrix(MatrixSpec),
}

fn one() -> f64 {
    1.0
}

impl OperatorSpec {
    pub fn pauli(pauli: Pauli, scale: f64) -> Self {
        Self::Pauli(PauliSpec { pauli, scale })
    }

    pub fn build(&self) -> Result<Operator, String> {
        match self {
            Self::Pauli(PauliSpec { pauli, scale }) => {
                if !scale.is_finite() {
                    return Err(format!("operator scale must be finite, got {scale}"));
                }
                let base = match pauli {
                    Pauli::I => Operator::identity(2),
                    Pauli::X => Operator::sigma_x(),
                    Pauli::Y => Operator::sigma_y(),
                    Pauli::Z => Operator::sigma_z(),
                };
                Ok(base.scale(*scale))
            }
            Self::Matrix(MatrixSpec { re, im }) => {
                let dim = re.len();
                if dim == 0 {
                    return Err("operator matrix is empty".into());
                }
                let zeros = vec![vec![0.0; dim]; dim];
                let im = im.as_ref().unwrap_or(&zeros);
                if im.len() != dim || re.iter().chain(im).any(|row| row.len() != dim) {
                    return Err(format!("operator matrix must be {dim}x{dim} in both parts"));
                }
                let m = nalgebra::DMatrix::from_fn(dim, dim, |i, j| Complex64::new(re[i][j], im[i][j]));
                Operator::hermitian(m, vec![dim]).map_err(|e| e.to_string())
            }
        }
    }
}

/// `{"angle": θ}` for `cos θ|0⟩ + sin θ|1⟩`, `{"basis": k, "dim": d}`, or
/// explicit normalized amplitudes `{"re": [..], "im": [..]}`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Angle(AngleSpec),
    Basis(BasisSpec),
    Amplitudes(AmplitudeSpec),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AngleSpec {
    pub angle: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisSpec {
    pub basis: usize,
    #[serde(default = "two")]
    pub dim: usize,
}

fn two() -> usize {
    2
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmplitudeSpec {
    pub re: Vec<f64>,
    #[serde(default)]
    pub im: Option<Vec<f64>>,
}

impl StateSpec {
    pub fn angle(angle: f64) -> Self {
        Self::Angle(AngleSpec { angle })
    }

    pub fn basis(basis: usize) -> Self {
        Self::Basis(BasisSpec { basis, dim: 2 })
    }

    pub fn build(&self) -> Result<StateVector, String> {
        match self {
            Self::Angle(AngleSpec { angle }) => {
                if !angle.is_finite() {
                    return Err(format!("state angle must be finite, got {angle}"));
                }
                Ok(StateVector::qubit_angle(*angle))
            }
            Self::Basis(BasisSpec { basis, dim }) => StateVector::basis(*dim, *basis).map_err(|e| e.to_string()),
            Self::Amplitudes(AmplitudeSpec { re, im }) => {
                let im = im.clone().unwrap_or_else(|| vec![0.0; re.len()]);
                if im.len() != re.len() {
                    return Err("state re and im parts differ in length".into());
                }
                let amps = re.iter().zip(&im).map(|(&a, &b)| Complex64::new(a, b)).collect();
                StateVector::new(amps, vec![re.len()]).map_err(|e| e.to_string())
            }
        }
    }
}

/// `count` evenly spaced times on `[start, end]`.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl TimeGrid {
    pub fn points(&self) -> Result<Vec<f64>, String> {
        if !(self.start.is_finite() && self.end.is_finite()) || self.end < self.start {
            return Err(format!("bad time grid [{}, {}]", self.start, self.end));
        }
        match self.count {
            0 => Err("time grid needs at least one point".into()),
            1 => Ok(vec![self.start]),
            n => {
                let h = (self.end - self.start) / (n - 1) as f64;
                Ok((0..n).map(|k| self.start + k as f64 * h).collect())
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Theorem1Params {
    pub h: OperatorSpec,
    pub a: OperatorSpec,
    pub psi0: StateSpec,
    pub n_values: Vec<usize>,
    pub t: f64,
    /// Replicated-template sizes checked against the full tensor product.
    pub oracle_sizes: Vec<usize>,
    /// Extra heterogeneous ensembles with random Hermitian `H_i`, `A_i`.
    pub random_ensembles: usize,
    pub oracle_times: TimeGrid,
}

impl Default for Theorem1Params {
    fn default() -> Self {
        Self {
            h: OperatorSpec::pauli(Pauli::Z, 1.0),
            a: OperatorSpec::pauli(Pauli::X, 1.0),
            psi0: StateSpec::angle(FRAC_PI_8),
            n_values: (0..=6).map(|k| 10usize.pow(k)).collect(),
            t: 0.3,
            oracle_sizes: vec![1, 2, 4, 6, 8, 10],
            random_ensembles: 3,
            oracle_times: TimeGrid { start: 0.0, end: 3.0, count: 16 },
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Theorem2Params {
    pub h_s: OperatorSpec,
    pub v0: OperatorSpec,
    pub n: usize,
    pub a_bar: f64,
    /// Per-site bath values; overrides `n` and `a_bar` when present.
    pub a_values: Option<Vec<f64>>,
    pub h_bath: Option<OperatorSpec>,
    pub psi0: StateSpec,
    pub g_values: Vec<f64>,
    pub times: TimeGrid,
    pub commuting: CommutingParams,
    pub averaging: AveragingParams,
}

impl Default for Theorem2Params {
    fn default() -> Self {
        Self {
            h_s: OperatorSpec::pauli(Pauli::Z, 0.5),
            v0: OperatorSpec::pauli(Pauli::X, 1.0),
            n: 4,
            a_bar: 1.0,
            a_values: None,
            h_bath: None,
            psi0: StateSpec::basis(0),
            g_values: vec![5.0, 20.0, 80.0],
            times: TimeGrid { start: 0.0, end: 0.5, count: 32 },
            commuting: CommutingParams::default(),
            averaging: AveragingParams::default(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CommutingParams {
    pub h_s: OperatorSpec,
    pub v0: OperatorSpec,
    pub psi0: StateSpec,
    pub g_values: Vec<f64>,
    pub times: TimeGrid,
}

impl Default for CommutingParams {
    fn default() -> Self {
        Self {
            h_s: OperatorSpec::pauli(Pauli::Z, 0.5),
            v0: OperatorSpec::pauli(Pauli::Z, 1.0),
            psi0: StateSpec::angle(FRAC_PI_4),
            g_values: vec![1.0, 10.0, 100.0],
            times: TimeGrid { start: 0.0, end: 2.0, count: 32 },
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AveragingParams {
    pub g: f64,
    /// Window length in units of the decoherence time.
    pub window_tau: f64,
    pub samples: usize,
}

impl Default for AveragingParams {
    fn default() -> Self {
        Self { g: 5.0, window_tau: 50.0, samples: 20001 }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexSpec {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WignerParams {
    pub n: usize,
    pub t: f64,
    pub x: AxisSpec,
    pub p: AxisSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Theorem3Params {
    pub omega: f64,
    pub gamma: ComplexSpec,
    pub alpha: f64,
    pub phi: f64,
    pub a_bar: f64,
    /// Fixed cutoff for every ensemble size; the cutoff rule when absent.
    pub cutoff: Option<usize>,
    pub n_values: Vec<usize>,
    pub times: TimeGrid,
    pub homogeneity_t: f64,
    pub homogeneity_n: Vec<usize>,
    pub wigner: Option<WignerParams>,
}

impl Default for Theorem3Params {
    fn default() -> Self {
        Self {
            omega: 1.0,
            gamma: ComplexSpec { re: 0.1, im: 0.0 },
            alpha: 1.0,
            phi: FRAC_PI_4,
            a_bar: 1.0,
            cutoff: None,
            n_values: vec![1, 2, 4, 8],
            times: TimeGrid { start: 0.0, end: 4.0 * PI, count: 16 },
            homogeneity_t: 1.0,
            homogeneity_n: vec![10, 20, 40],
            wigner: None,
        }
    }
}

impl Default for OperatorSpec {
    fn default() -> Self {
        Self::pauli(Pauli::Z, 1.0)
    }
}

impl Default for StateSpec {
    fn default() -> Self {
        Self::basis(0)
    }
}
