//! Hadamard-test outcome model and Bernoulli sampling simulator.
//!
//! A single Hadamard test estimates a real matrix element y in [-1, 1] via an
//! ancilla measurement with success probability p = (1 + y)/2. The simulator
//! samples exact Born probabilities; every stochastic entry point takes an
//! explicit seed and there is no hidden generator state.

use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::pauli::{connected_matrix_elements, BasisState, PauliSum};
use crate::statevec::Statevector;

/// What the test estimates: a bare overlap entry or a Hamiltonian cross term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObservableKind {
    Overlap,
    HamiltonianCrossTerm,
}

/// One Hadamard-test estimand with its exact value.
#[derive(Debug, Clone)]
pub struct HadamardObservable {
    pub kind: ObservableKind,
    /// The Re(<0|U_a^dag (h) U_b|0>) being estimated, in [-1, 1].
    pub true_value: f64,
    /// Identifies the basis state or matrix entry.
    pub label: String,
}

impl HadamardObservable {
    pub fn new(kind: ObservableKind, true_value: f64, label: impl Into<String>) -> Result<Self> {
        if !(-1.0 - 1e-12..=1.0 + 1e-12).contains(&true_value) || !true_value.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "Hadamard-test value {true_value} outside [-1, 1]"
            )));
        }
        Ok(Self {
            kind,
            true_value: true_value.clamp(-1.0, 1.0),
            label: label.into(),
        })
    }
}

/// Ancilla success probability Pr(+) = (1 + y)/2.
pub fn outcome_probability(observable: &HadamardObservable) -> f64 {
    (1.0 + observable.true_value) / 2.0
}

/// Sample M ancilla shots; returns (y_hat, p_hat) with y_hat = 2 p_hat - 1.
/// Deterministic for a fixed seed.
pub fn sample_estimator(
    observable: &HadamardObservable,
    shots: u64,
    seed: u64,
) -> Result<(f64, f64)> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shot count must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(sample_estimator_with(
        observable.true_value,
        shots,
        &mut rng,
    ))
}

/// Same as `sample_estimator` but drives a caller-owned generator, so Monte
/// Carlo loops can split one seed across replicas via `set_stream`.
pub fn sample_estimator_with<R: Rng>(true_value: f64, shots: u64, rng: &mut R) -> (f64, f64) {
    let p = ((1.0 + true_value) / 2.0).clamp(0.0, 1.0);
    let successes = if p <= 0.0 {
        0
    } else if p >= 1.0 {
        shots
    } else {
        Binomial::new(shots, p)
            .expect("p validated in [0, 1]")
            .sample(rng)
    };
    let p_hat = successes as f64 / shots as f64;
    (2.0 * p_hat - 1.0, p_hat)
}

/// Gate accounting for promoting the number-conserving ansatz blocks to their
/// controlled versions inside a Hadamard test.
#[derive(Debug, Clone, Copy)]
pub struct GateCostModel {
    /// Qubit count.
    pub n: usize,
    /// Brick layers of the ansatz.
    pub depth: usize,
    /// Per-block overhead of the controlled implementation; promoting each
    /// two-qubit gate to its Toffoli equivalent costs at most 3.
    pub controlled_factor: f64,
}

impl GateCostModel {
    pub fn new(n: usize, depth: usize, controlled_factor: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(
                "gate cost model needs n >= 2".into(),
            ));
        }
        if controlled_factor < 1.0 {
            return Err(Error::InvalidArgument(
                "controlled-block factor must be >= 1".into(),
            ));
        }
        Ok(Self {
            n,
            depth,
            controlled_factor,
        })
    }

    /// Defaults to depth D = N and Toffoli-style factor F = 3, the regime
    /// where the overhead reduces to 1 + 5/N.
    pub fn with_defaults(n: usize) -> Result<Self> {
        Self::new(n, n, 3.0)
    }
}

/// Factor increase in two-qubit gates from the controlled implementation:
/// (DN/2 + FD/2 + N) / (DN/2) = 1 + F/N + 2/D.
pub fn controlled_overhead(model: &GateCostModel) -> Result<f64> {
    if model.depth == 0 {
        return Err(Error::InvalidArgument(
            "controlled overhead undefined for zero-depth ansatz".into(),
        ));
    }
    Ok(1.0 + model.controlled_factor / model.n as f64 + 2.0 / model.depth as f64)
}

/// The overlap observables y_i needed by single-determinant boosting: one per
/// basis state in the coupling support of |i0> plus i0 itself (the overlap
/// matrix entry). Ordered by basis-state index.
pub fn build_observables(
    hamiltonian: &PauliSum,
    i0: BasisState,
    phi_q: &Statevector,
) -> Result<Vec<(BasisState, HadamardObservable)>> {
    if hamiltonian.dim() != phi_q.dim() {
        return Err(Error::DimensionMismatch(format!(
            "Hamiltonian on {} qubits, state on {}",
            hamiltonian.n_qubits, phi_q.n_qubits
        )));
    }
    let mut support: BTreeSet<BasisState> = connected_matrix_elements(hamiltonian, i0)
        .into_keys()
        .collect();
    support.insert(i0);
    support
        .into_iter()
        .map(|j| {
            let y = phi_q.overlap_with(j);
            let label = format!("y[{}]", j.to_bitstring(hamiltonian.n_qubits));
            HadamardObservable::new(ObservableKind::Overlap, y, label).map(|obs| (j, obs))
        })
        .collect()
}
