//! Statevector simulation and optimizers for variational quantum algorithms.
//!
//! The crate is organized bottom-up:
//!
//! - [`state`], [`gate`], [`pauli`]: dense statevectors, the gate set, and
//!   Pauli-sum observables with an exact-diagonalization oracle.
//! - [`ansatz`]: layered parameterized circuits and the cost `⟨ψ(θ)|H|ψ(θ)⟩`.
//! - [`diff`]: parameter-shift gradients, the quantum geometric tensor and
//!   Fubini-Study metric, damped pseudo-inverse, barren-plateau scan.
//! - [`optim`]: SGD, AdaGrad, Adam, QNG, Lookahead, LAWS and WS-SGD.
//! - [`classifier`], [`experiments`]: the random-circuit, H₂ and Iris
//!   pipelines.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ansatz;
pub mod classifier;
pub mod diff;
pub mod error;
pub mod experiments;
pub mod gate;
pub mod objective;
pub mod optim;
pub mod pauli;
pub mod state;

pub use ansatz::{CostFunction, Entangler, ParameterizedCircuit};
pub use diff::MetricTensor;
pub use error::{Error, Result};
pub use gate::{Gate, Pauli};
pub use objective::Objective;
pub use optim::{Optimizer, OptimizerConfig, OptimizerName, TraceRecord};
pub use pauli::{PauliString, PauliSumHamiltonian};
pub use state::{zero_state, StateVector};
