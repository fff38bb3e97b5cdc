use thiserror::Error;

/// Errors produced by Hamiltonian parsing and the analysis pipeline.
///
/// Variants are split along the CLI exit-code boundary: `Input*` variants map
/// to exit code 1, the numerical variants to exit code 2.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed Hamiltonian file: {0}")]
    InputFormat(String),

    #[error("term `{term}` references qubit {qubit} but the system declares {n_qubits} qubits")]
    QubitIndexOutOfRange {
        term: String,
        qubit: usize,
        n_qubits: usize,
    },

    #[error("non-real coefficient {coeff} on term `{term}` (Hermitian Hamiltonian required)")]
    NonHermitian { term: String, coeff: String },

    #[error("system size {n_qubits} exceeds the qubit cap {cap}")]
    QubitCapExceeded { n_qubits: usize, cap: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("eigensolver did not converge: {0}")]
    NonConvergence(String),

    #[error("ground state is degenerate (gap {gap:.3e} Ha); sensitivity analysis is undefined")]
    DegenerateGroundState { gap: f64 },

    #[error("degenerate eigenvalue (gap {gap:.3e}); sensitivities are undefined")]
    DegenerateEigenvalue { gap: f64 },

    #[error("overlap matrix is not positive definite (smallest eigenvalue {min_eig:.3e})")]
    OverlapNotPositiveDefinite { min_eig: f64 },

    #[error("overlap matrix is ill-conditioned (condition number {cond:.3e})")]
    IllConditionedOverlap { cond: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors caused by malformed or out-of-contract input (CLI exit 1),
    /// false for numerical failures such as degeneracy or conditioning (CLI exit 2).
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InputFormat(_)
                | Error::QubitIndexOutOfRange { .. }
                | Error::NonHermitian { .. }
                | Error::QubitCapExceeded { .. }
                | Error::DimensionMismatch(_)
                | Error::InvalidArgument(_)
        )
    }
}
