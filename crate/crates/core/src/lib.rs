//! Exact finite-dimensional simulations of decoherence by large ensembles.
//!
//! The crate is organised around five engines:
//!
//! * [`hilbert`]: dense complex linear algebra for states, operators and
//!   density matrices. Every other module uses it as the brute-force oracle.
//! * [`ensemble`]: mean and variance of collective observables `A = Σ A_i`
//!   over `N` independent subsystems, both factorized (cost linear in `N`)
//!   and on the full tensor product.
//! * [`strongcoupling`]: the leading-order strong-coupling state of a system
//!   coupled through `V_0 ⊗ Σ A_i`, its pure-dephasing density matrix, the
//!   decoherence time and exact finite-coupling dynamics for comparison.
//! * [`catdynamics`]: truncated-Fock coherent and cat states evolving under a
//!   displaced-oscillator Hamiltonian, with Wigner functions and interference
//!   metrics.
//! * [`regularize`]: Cesàro, Abel and finite-window means of oscillatory
//!   sequences.
//!
//! Parameter sweeps run on rayon when the `parallel` feature is enabled
//! (the default) and sequentially otherwise. Results are identical either
//! way.

pub mod catdynamics;
pub mod ensemble;
mod error;
pub mod hilbert;
mod par;
pub mod regularize;
pub mod strongcoupling;

pub use error::{Error, Result};
pub use num_complex::Complex64;
