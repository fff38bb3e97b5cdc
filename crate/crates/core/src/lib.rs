//! Measurement-cost analysis for classically-boosted VQE.
//!
//! Given a qubit Hamiltonian, this crate computes how many Hadamard-test and
//! grouped Pauli measurements are needed to estimate the ground-state energy
//! to a target precision when a single computational basis state boosts the
//! quantum estimate, and compares against conventional VQE. Every analytic
//! variance formula is backed by Monte Carlo sampling of the same estimators.
//!
//! Module map:
//! - [`pauli`]: bit-mask Pauli strings, the Hamiltonian file format,
//!   qubitwise grouping.
//! - [`statevec`]: exact ground states, expectations, deflation, the
//!   number-conserving ansatz.
//! - [`hadamard`]: Hadamard-test outcome model, seeded Bernoulli sampling,
//!   controlled-gate cost.
//! - [`subspace`]: the 2x2 (general k x k) generalized eigenvalue problem and
//!   its sensitivities.
//! - [`shots`]: variance propagation, K-factors, optimal shot allocation,
//!   speedups.
//! - [`analysis`]: the end-to-end pipeline and the Monte Carlo validator.

pub mod analysis;
pub mod error;
pub mod hadamard;
pub mod pauli;
pub mod shots;
pub mod statevec;
pub mod subspace;

pub use analysis::{
    analyze, validate, AnalysisOptions, AnalysisReport, AnalysisStatus, ValidationOptions,
    ValidationSummary,
};
pub use error::{Error, Result};
pub use pauli::{BasisState, PauliSum, PauliTerm};
pub use statevec::Statevector;
