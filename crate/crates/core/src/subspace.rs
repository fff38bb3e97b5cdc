//! Subspace Hamiltonian/overlap matrices and the real generalized eigenvalue
//! problem they define.
//!
//! The main pipeline only ever solves real symmetric problems; dropping
//! imaginary parts keeps the estimate a valid upper bound on the ground
//! energy, which `verify_upper_bound` checks against a complex Hermitian
//! reference solve.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{connected_matrix_elements, BasisState, PauliSum};
use crate::statevec::{expectation, Statevector};

/// Condition-number limit on the overlap matrix.
const MAX_OVERLAP_CONDITION: f64 = 1e10;

/// Smallest admissible eigenvalue of the overlap matrix.
const MIN_OVERLAP_EIGENVALUE: f64 = 1e-10;

/// Gap below which an eigenvalue is treated as degenerate for sensitivities.
const SENSITIVITY_DEGENERACY_GAP: f64 = 1e-9;

/// Basis-vector provenance inside the subspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateLabel {
    Classical,
    Quantum,
}

/// A k-dimensional subspace problem: real symmetric H-bar, real symmetric
/// S-bar with unit diagonal, positive definite.
#[derive(Debug, Clone)]
pub struct SubspaceProblem {
    pub h_bar: DMatrix<f64>,
    pub s_bar: DMatrix<f64>,
    pub labels: Vec<StateLabel>,
}

impl SubspaceProblem {
    pub fn new(h_bar: DMatrix<f64>, s_bar: DMatrix<f64>, labels: Vec<StateLabel>) -> Result<Self> {
        let k = h_bar.nrows();
        if h_bar.ncols() != k || s_bar.nrows() != k || s_bar.ncols() != k || labels.len() != k {
            return Err(Error::DimensionMismatch(
                "subspace matrices and labels must share one dimension".into(),
            ));
        }
        let sym_tol = 1e-10;
        for i in 0..k {
            for j in (i + 1)..k {
                if (h_bar[(i, j)] - h_bar[(j, i)]).abs() > sym_tol
                    || (s_bar[(i, j)] - s_bar[(j, i)]).abs() > sym_tol
                {
                    return Err(Error::InvalidArgument(
                        "subspace matrices must be symmetric".into(),
                    ));
                }
            }
            if (s_bar[(i, i)] - 1.0).abs() > sym_tol {
                return Err(Error::InvalidArgument(
                    "overlap matrix must have unit diagonal".into(),
                ));
            }
        }
        let min_eig = smallest_eigenvalue(&s_bar);
        if min_eig <= MIN_OVERLAP_EIGENVALUE {
            return Err(Error::OverlapNotPositiveDefinite { min_eig });
        }
        Ok(Self {
            h_bar,
            s_bar,
            labels,
        })
    }

    pub fn dim(&self) -> usize {
        self.h_bar.nrows()
    }
}

fn smallest_eigenvalue(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |a, &b| a.min(b))
}

/// Solution of H-bar v = lambda S-bar v with v^T S-bar v = 1 per column.
#[derive(Debug, Clone)]
pub struct GevpSolution {
    /// Eigenvalues ascending, Hartree.
    pub eigenvalues: Vec<f64>,
    /// Matching eigenvectors as columns, sign-fixed so the first component
    /// of non-negligible magnitude is non-negative.
    pub eigenvectors: DMatrix<f64>,
    /// Distance between the two lowest eigenvalues (infinite for k = 1).
    pub gap: f64,
}

impl GevpSolution {
    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn ground_vector(&self) -> DVector<f64> {
        self.eigenvectors.column(0).into_owned()
    }
}

/// Assemble the 2x2 single-determinant problem from classical cross terms and
/// the orthogonal quantum state:
///   H11 = <i0|H|i0>, H12 = sum_i y_i <i|H|i0>, H22 = <phi_q|H|phi_q>,
///   S12 = y_{i0}.
pub fn build_two_state_problem(
    hamiltonian: &PauliSum,
    i0: BasisState,
    phi_q: &Statevector,
) -> Result<SubspaceProblem> {
    if hamiltonian.dim() != phi_q.dim() {
        return Err(Error::DimensionMismatch(format!(
            "Hamiltonian on {} qubits, state on {}",
            hamiltonian.n_qubits, phi_q.n_qubits
        )));
    }
    if (phi_q.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidArgument(
            "quantum state must be normalized".into(),
        ));
    }
    let cross = connected_matrix_elements(hamiltonian, i0);
    let h11 = cross
        .get(&i0)
        .copied()
        .unwrap_or(Complex64::new(0.0, 0.0))
        .re;
    let h12: f64 = cross
        .iter()
        .map(|(&j, elem)| phi_q.overlap_with(j) * elem.re)
        .sum();
    let h22 = expectation(hamiltonian, phi_q)?;
    let s12 = phi_q.overlap_with(i0);

    let h_bar = DMatrix::from_row_slice(2, 2, &[h11, h12, h12, h22]);
    let s_bar = DMatrix::from_row_slice(2, 2, &[1.0, s12, s12, 1.0]);
    SubspaceProblem::new(
        h_bar,
        s_bar,
        vec![StateLabel::Classical, StateLabel::Quantum],
    )
}

/// Solve a real symmetric GEVP via Cholesky reduction to a standard
/// symmetric problem.
pub fn solve_real_gevp(problem: &SubspaceProblem) -> Result<GevpSolution> {
    let (eigenvalues, eigenvectors) = solve_sym_gevp(&problem.h_bar, &problem.s_bar)?;
    let gap = if eigenvalues.len() > 1 {
        eigenvalues[1] - eigenvalues[0]
    } else {
        f64::INFINITY
    };
    Ok(GevpSolution {
        eigenvalues,
        eigenvectors,
        gap,
    })
}

fn solve_sym_gevp(h: &DMatrix<f64>, s: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let k = h.nrows();
    let s_eig = s.clone().symmetric_eigen();
    let (mut s_min, mut s_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for &e in s_eig.eigenvalues.iter() {
        s_min = s_min.min(e);
        s_max = s_max.max(e);
    }
    if s_min <= MIN_OVERLAP_EIGENVALUE {
        return Err(Error::OverlapNotPositiveDefinite { min_eig: s_min });
    }
    if s_max / s_min > MAX_OVERLAP_CONDITION {
        return Err(Error::IllConditionedOverlap {
            cond: s_max / s_min,
        });
    }

    let chol = s
        .clone()
        .cholesky()
        .ok_or(Error::OverlapNotPositiveDefinite { min_eig: s_min })?;
    let l = chol.l();
    // C = L^-1 H L^-T, restored to exact symmetry before decomposing.
    let linv_h = l
        .solve_lower_triangular(h)
        .ok_or_else(|| Error::Numerical("triangular solve failed".into()))?;
    let c_raw = l
        .solve_lower_triangular(&linv_h.transpose())
        .ok_or_else(|| Error::Numerical("triangular solve failed".into()))?;
    let c = (&c_raw + c_raw.transpose()) * 0.5;

    let eig = c.symmetric_eigen();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());

    let lt = l.transpose();
    let mut eigenvalues = Vec::with_capacity(k);
    let mut eigenvectors = DMatrix::zeros(k, k);
    for (dst, &src) in order.iter().enumerate() {
        eigenvalues.push(eig.eigenvalues[src]);
        let u = eig.eigenvectors.column(src).into_owned();
        let mut v = lt
            .solve_upper_triangular(&u)
            .ok_or_else(|| Error::Numerical("triangular solve failed".into()))?;
        // Renormalize against S and fix the overall sign.
        let s_norm = (v.dot(&(s * &v))).sqrt();
        v /= s_norm;
        if let Some(first) = v.iter().find(|c| c.abs() > 1e-12) {
            if *first < 0.0 {
                v = -v;
            }
        }
        eigenvectors.set_column(dst, &v);
    }
    Ok((eigenvalues, eigenvectors))
}

/// First-order sensitivities of one generalized eigenvalue to symmetric
/// perturbations of the matrix entries:
///   d lambda / d H_ab = v_a v_b (2 - delta_ab)
///   d lambda / d S_ab = -lambda v_a v_b (2 - delta_ab)
/// The factor of two reflects that an off-diagonal perturbation touches both
/// (a, b) and (b, a).
pub fn eigen_sensitivities(
    solution: &GevpSolution,
    which: usize,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let k = solution.eigenvalues.len();
    if which >= k {
        return Err(Error::InvalidArgument(format!(
            "eigenvalue index {which} out of range for k = {k}"
        )));
    }
    let lambda = solution.eigenvalues[which];
    let min_gap = solution
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != which)
        .map(|(_, &e)| (e - lambda).abs())
        .fold(f64::INFINITY, f64::min);
    if min_gap < SENSITIVITY_DEGENERACY_GAP {
        return Err(Error::DegenerateEigenvalue { gap: min_gap });
    }
    let v = solution.eigenvectors.column(which);
    let mut dh = DMatrix::zeros(k, k);
    let mut ds = DMatrix::zeros(k, k);
    for a in 0..k {
        for b in 0..k {
            let factor = if a == b { 1.0 } else { 2.0 };
            dh[(a, b)] = v[a] * v[b] * factor;
            ds[(a, b)] = -lambda * v[a] * v[b] * factor;
        }
    }
    Ok((dh, ds))
}

/// Rayleigh quotient (w^T H w)/(w^T S w) of a Hermitian pair at a real
/// vector; the imaginary components cannot contribute.
pub fn rayleigh_quotient(
    h: &DMatrix<Complex64>,
    s: &DMatrix<Complex64>,
    w: &DVector<f64>,
) -> Result<f64> {
    if w.iter().all(|&x| x == 0.0) {
        return Err(Error::InvalidArgument(
            "Rayleigh quotient needs w != 0".into(),
        ));
    }
    let wc = w.map(|x| Complex64::new(x, 0.0));
    let denom = (wc.adjoint() * s * &wc)[(0, 0)].re;
    if denom <= 0.0 {
        return Err(Error::Numerical(format!(
            "w^T S w = {denom:.3e} is not positive"
        )));
    }
    let numer = (wc.adjoint() * h * &wc)[(0, 0)].re;
    Ok(numer / denom)
}

/// Lowest eigenvalue of a complex Hermitian GEVP, solved by Cholesky
/// reduction. Used as the reference side of the real-part upper bound check.
pub fn solve_hermitian_gevp_lowest(h: &DMatrix<Complex64>, s: &DMatrix<Complex64>) -> Result<f64> {
    let chol = s
        .clone()
        .cholesky()
        .ok_or(Error::OverlapNotPositiveDefinite { min_eig: f64::NAN })?;
    let l = chol.l();
    let linv_h = l
        .solve_lower_triangular(h)
        .ok_or_else(|| Error::Numerical("triangular solve failed".into()))?;
    let c_raw = l
        .solve_lower_triangular(&linv_h.adjoint())
        .ok_or_else(|| Error::Numerical("triangular solve failed".into()))?;
    let c = (&c_raw + c_raw.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = c.symmetric_eigen();
    Ok(eig
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |acc, &e| acc.min(e)))
}

/// Compare the complex Hermitian ground eigenvalue against the real-part
/// problem's: dropping imaginary components can only raise the estimate, so
/// `holds` must come back true.
pub fn verify_upper_bound(
    h: &DMatrix<Complex64>,
    s: &DMatrix<Complex64>,
) -> Result<(f64, f64, bool)> {
    let lambda_complex = solve_hermitian_gevp_lowest(h, s)?;
    let h_real = h.map(|c| c.re);
    let s_real = s.map(|c| c.re);
    let (evals, _) = solve_sym_gevp(&h_real, &s_real)?;
    let lambda_real = evals[0];
    Ok((
        lambda_complex,
        lambda_real,
        lambda_complex <= lambda_real + 1e-12,
    ))
}
