#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use thermolimit::hilbert::{Operator, StateVector};

/// Hermitian matrix with entries uniform in the unit square, `(M + M†)/2`.
pub fn random_hermitian(dim: usize, seed: u64) -> Operator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = DMatrix::from_fn(dim, dim, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    Operator::hermitian(h, vec![dim]).unwrap()
}

pub fn random_state(dim: usize, seed: u64) -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let amps = (0..dim).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    StateVector::normalized(amps, vec![dim]).unwrap()
}

pub fn product_state(dims: &[usize], seed: u64) -> StateVector {
    let parts: Vec<StateVector> =
        dims.iter().enumerate().map(|(k, &d)| random_state(d, seed.wrapping_add(k as u64))).collect();
    StateVector::product(&parts).unwrap()
}

/// Normalized state on a multipartite space, generally entangled.
pub fn entangled_state(dims: &[usize], seed: u64) -> StateVector {
    let total: usize = dims.iter().product();
    let flat = random_state(total, seed);
    StateVector::new(flat.amplitudes().iter().copied().collect(), dims.to_vec()).unwrap()
}

pub fn small_dims() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(2usize..=3, 1..=3)
}
