//! Validated experiment plans. `prepare` builds every model and checks every
//! cap; `execute` only computes. Nothing here touches the filesystem.

mod theorem1;
mod theorem2;
mod theorem3;
mod validate;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thermolimit::hilbert::{Operator, StateVector};

use crate::config::{Experiment, ExperimentConfig};
use crate::table::ResultTable;
use crate::RunError;

pub enum Plan {
    Theorem1(theorem1::Plan),
    Theorem2(theorem2::Plan),
    Theorem3(theorem3::Plan),
    ValidateAll(validate::Plan),
}

pub fn prepare(config: &ExperimentConfig) -> Result<Plan, RunError> {
    let p = &config.parameters;
    Ok(match config.experiment {
        Experiment::Theorem1Scaling => Plan::Theorem1(theorem1::Plan::new(&p.theorem1, config.seed)?),
        Experiment::Theorem2Decoherence => Plan::Theorem2(theorem2::Plan::new(&p.theorem2)?),
        Experiment::Theorem3Cat => Plan::Theorem3(theorem3::Plan::new(&p.theorem3)?),
        Experiment::ValidateAll => Plan::ValidateAll(validate::Plan::new(config.seed)),
    })
}

impl Plan {
    pub fn execute(&self) -> Result<Vec<ResultTable>, RunError> {
        match self {
            Self::Theorem1(p) => p.execute(),
            Self::Theorem2(p) => p.execute(),
            Self::Theorem3(p) => p.execute(),
            Self::ValidateAll(p) => p.execute(),
        }
    }
}

/// Seeded source of random Hermitian matrices and states.
pub(crate) struct Sampler(ChaCha8Rng);

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    fn complex(&mut self) -> Complex64 {
        Complex64::new(self.0.random_range(-1.0..1.0), self.0.random_range(-1.0..1.0))
    }

    pub fn hermitian(&mut self, dim: usize) -> Operator {
        let m = DMatrix::from_fn(dim, dim, |_, _| self.complex());
        let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        Operator::hermitian(h, vec![dim]).expect("symmetrized matrix is Hermitian")
    }

    pub fn state(&mut self, dim: usize) -> StateVector {
        let amps = (0..dim).map(|_| self.complex()).collect();
        StateVector::normalized(amps, vec![dim]).expect("random vector is nonzero")
    }

    pub fn range(&mut self, lo: usize, hi: usize) -> usize {
        self.0.random_range(lo..=hi)
    }
}

pub(crate) fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<(), RunError> {
    if cond {
        Ok(())
    } else {
        Err(crate::config_err(msg()))
    }
}
