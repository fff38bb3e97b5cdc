//! Shared oracles for the integration suites.
//!
//! The dense Kronecker-product construction below is deliberately independent
//! of the bit-mask term application in the library: it builds explicit 2x2
//! Pauli matrices and tensors them together, so agreement between the two
//! routes is a real check.
#![allow(dead_code)] // each test binary uses its own subset

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use cbvqe_core::pauli::{PauliSum, PauliTerm};
use cbvqe_core::statevec::Statevector;

pub fn fixture_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn load_fixture(name: &str) -> PauliSum {
    let text = std::fs::read_to_string(fixture_path(name)).expect("fixture readable");
    PauliSum::parse_hamiltonian(&text).expect("fixture parses")
}

fn single_qubit_matrix(x: bool, z: bool) -> DMatrix<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match (x, z) {
        (false, false) => DMatrix::from_row_slice(2, 2, &[one, zero, zero, one]),
        (true, false) => DMatrix::from_row_slice(2, 2, &[zero, one, one, zero]),
        (true, true) => DMatrix::from_row_slice(2, 2, &[zero, -i, i, zero]),
        (false, true) => DMatrix::from_row_slice(2, 2, &[one, zero, zero, -one]),
    }
}

fn kronecker(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    a.kronecker(b)
}

/// Dense matrix of one term via explicit tensor products. Qubit 0 is the
/// least-significant index bit, so it sits rightmost in the Kronecker chain.
pub fn kron_term_matrix(term: &PauliTerm, n_qubits: usize) -> DMatrix<Complex64> {
    let mut mat = DMatrix::from_element(1, 1, term.coefficient);
    for q in (0..n_qubits).rev() {
        let x = term.x_mask >> q & 1 == 1;
        let z = term.z_mask >> q & 1 == 1;
        mat = kronecker(&mat, &single_qubit_matrix(x, z));
    }
    mat
}

/// Dense matrix of a whole sum via the Kronecker route.
pub fn kron_matrix(sum: &PauliSum) -> DMatrix<Complex64> {
    let dim = sum.dim();
    let mut mat = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    for term in &sum.terms {
        mat += kron_term_matrix(term, sum.n_qubits);
    }
    mat
}

pub fn to_dvector(psi: &Statevector) -> DVector<Complex64> {
    DVector::from_vec(psi.amplitudes.clone())
}

/// Random Hermitian Pauli sum with real coefficients and arbitrary letters
/// (the dense matrix may be complex).
pub fn random_hermitian_sum<R: Rng>(rng: &mut R, n_qubits: usize, n_terms: usize) -> PauliSum {
    let mut terms = Vec::with_capacity(n_terms);
    for _ in 0..n_terms {
        let mut x_mask = 0u64;
        let mut z_mask = 0u64;
        for q in 0..n_qubits {
            match rng.gen_range(0..4) {
                1 => x_mask |= 1 << q,
                2 => z_mask |= 1 << q,
                3 => {
                    x_mask |= 1 << q;
                    z_mask |= 1 << q;
                }
                _ => {}
            }
        }
        let coeff = rng.gen_range(-1.0..1.0);
        terms.push(PauliTerm::new(x_mask, z_mask, Complex64::new(coeff, 0.0)));
    }
    PauliSum::new(n_qubits, terms).expect("valid random sum")
}

/// Random normalized complex statevector.
pub fn random_statevector<R: Rng>(rng: &mut R, n_qubits: usize) -> Statevector {
    let dim = 1usize << n_qubits;
    let amplitudes: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    Statevector {
        n_qubits,
        amplitudes,
    }
    .normalized()
}

/// Random real symmetric matrix with entries in [-1, 1].
pub fn random_symmetric<R: Rng>(rng: &mut R, k: usize) -> DMatrix<f64> {
    let mut m = DMatrix::from_fn(k, k, |_, _| rng.gen_range(-1.0..1.0));
    m = (&m + m.transpose()) * 0.5;
    m
}

/// Random symmetric positive definite matrix with unit diagonal,
/// comfortably conditioned.
pub fn random_spd_unit_diagonal<R: Rng>(rng: &mut R, k: usize) -> DMatrix<f64> {
    let b = DMatrix::from_fn(k, k, |_, _| rng.gen_range(-0.5..0.5));
    let mut s = &b * b.transpose() + DMatrix::identity(k, k) * (k as f64);
    // Congruence-scale to a correlation-like matrix with ones on the diagonal.
    let d: Vec<f64> = (0..k).map(|i| s[(i, i)].sqrt()).collect();
    for i in 0..k {
        for j in 0..k {
            s[(i, j)] /= d[i] * d[j];
        }
    }
    s
}

/// Random complex Hermitian matrix.
pub fn random_hermitian<R: Rng>(rng: &mut R, k: usize) -> DMatrix<Complex64> {
    let a = DMatrix::from_fn(k, k, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    (&a + a.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Random complex Hermitian positive definite matrix with unit diagonal.
pub fn random_hpd_unit_diagonal<R: Rng>(rng: &mut R, k: usize) -> DMatrix<Complex64> {
    let b = DMatrix::from_fn(k, k, |_, _| {
        Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5))
    });
    let mut s = &b * b.adjoint() + DMatrix::identity(k, k) * Complex64::new(k as f64, 0.0);
    let d: Vec<f64> = (0..k).map(|i| s[(i, i)].re.sqrt()).collect();
    for i in 0..k {
        for j in 0..k {
            s[(i, j)] /= Complex64::new(d[i] * d[j], 0.0);
        }
    }
    s
}
