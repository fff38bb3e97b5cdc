//! Dense statevector engine.
//!
//! Provides the exact ground states that anchor the whole cost analysis,
//! plus expectation values, per-term variances, basis overlaps, deflation of
//! the classical component, and the number-conserving brick-layer ansatz used
//! by the controlled-gate cost model.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pauli::{BasisState, PauliSum, PauliTerm};

/// Default cap on exact diagonalization; override via the CLI environment
/// variable or `exact_ground_state_with_cap`.
pub const DEFAULT_QUBIT_CAP: usize = 20;

/// Dimension boundary between the dense eigensolver and matrix-free Lanczos.
const DENSE_QUBIT_CUTOFF: usize = 9;

/// Two ground eigenvalues closer than this are reported as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-9;

/// A normalized complex amplitude vector over 2^n basis states,
/// qubit 0 = least-significant bit of the index.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    pub n_qubits: usize,
    pub amplitudes: Vec<Complex64>,
}

impl Statevector {
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm();
        if n > 0.0 {
            for a in &mut self.amplitudes {
                *a /= n;
            }
        }
        self
    }

    /// <self|other>.
    pub fn inner(&self, other: &Statevector) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Real part of <self|i> for every basis state, indexed by i.
    pub fn overlaps_with_basis(&self) -> Vec<f64> {
        // <psi|i> = conj(amplitude_i), whose real part equals Re(amplitude_i).
        self.amplitudes.iter().map(|a| a.re).collect()
    }

    /// Re(<self|i>) for a single basis state.
    pub fn overlap_with(&self, i: BasisState) -> f64 {
        self.amplitudes[i.0 as usize].re
    }

    /// Largest |Im(amplitude)|; zero for states real in the computational basis.
    pub fn max_imag(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.im.abs())
            .fold(0.0, f64::max)
    }
}

/// Unit vector on a single computational basis state.
pub fn basis_statevector(i: BasisState, n_qubits: usize) -> Result<Statevector> {
    let dim = 1usize << n_qubits;
    if i.0 as usize >= dim {
        return Err(Error::DimensionMismatch(format!(
            "basis state {} out of range for {} qubits",
            i.0, n_qubits
        )));
    }
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
    amplitudes[i.0 as usize] = Complex64::new(1.0, 0.0);
    Ok(Statevector {
        n_qubits,
        amplitudes,
    })
}

/// H|psi> by streaming every term over the amplitude vector.
pub fn apply_hamiltonian(hamiltonian: &PauliSum, psi: &Statevector) -> Statevector {
    let dim = psi.dim();
    let mut out = vec![Complex64::new(0.0, 0.0); dim];
    for term in &hamiltonian.terms {
        apply_term_into(term, &psi.amplitudes, &mut out);
    }
    Statevector {
        n_qubits: psi.n_qubits,
        amplitudes: out,
    }
}

fn apply_term_into(term: &PauliTerm, amps: &[Complex64], out: &mut [Complex64]) {
    for (b, &amp) in amps.iter().enumerate() {
        if amp == Complex64::new(0.0, 0.0) {
            continue;
        }
        let (phase, j) = term.apply_to_basis(BasisState(b as u64));
        out[j.0 as usize] += phase * amp;
    }
}

/// Exact lowest eigenpair of a qubit Hamiltonian.
#[derive(Debug, Clone)]
pub struct GroundStateResult {
    /// Lowest eigenvalue, Hartree.
    pub energy: f64,
    pub state: Statevector,
    /// True when the two lowest eigenvalues differ by less than the
    /// degeneracy threshold.
    pub degenerate: bool,
    /// Distance to the second eigenvalue.
    pub gap: f64,
}

/// Lowest eigenpair via dense diagonalization (small systems) or matrix-free
/// Lanczos with full reorthogonalization (large systems).
pub fn exact_ground_state(hamiltonian: &PauliSum) -> Result<GroundStateResult> {
    exact_ground_state_with_cap(hamiltonian, DEFAULT_QUBIT_CAP)
}

pub fn exact_ground_state_with_cap(
    hamiltonian: &PauliSum,
    cap: usize,
) -> Result<GroundStateResult> {
    if hamiltonian.n_qubits > cap {
        return Err(Error::QubitCapExceeded {
            n_qubits: hamiltonian.n_qubits,
            cap,
        });
    }
    if !hamiltonian.is_hermitian(1e-12) {
        return Err(Error::NonHermitian {
            term: "(sum)".into(),
            coeff: "complex".into(),
        });
    }
    let result = if hamiltonian.n_qubits <= DENSE_QUBIT_CUTOFF {
        dense_lowest_pair(hamiltonian)
    } else {
        lanczos_lowest_pair(hamiltonian)?
    };

    // Residual check backs the contract regardless of which path ran.
    let scale = hamiltonian.one_norm() + hamiltonian.identity_coefficient().norm();
    let h_psi = apply_hamiltonian(hamiltonian, &result.state);
    let residual: f64 = h_psi
        .amplitudes
        .iter()
        .zip(&result.state.amplitudes)
        .map(|(h, s)| (h - s * result.energy).norm_sqr())
        .sum::<f64>()
        .sqrt();
    if residual > 1e-8 * scale.max(1.0) {
        return Err(Error::NonConvergence(format!(
            "ground-state residual {residual:.3e} exceeds tolerance"
        )));
    }
    Ok(result)
}

/// Dense Hermitian matrix of the Hamiltonian, column by column.
pub fn dense_matrix(hamiltonian: &PauliSum) -> DMatrix<Complex64> {
    let dim = hamiltonian.dim();
    let mut mat = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    for term in &hamiltonian.terms {
        for col in 0..dim {
            let (phase, row) = term.apply_to_basis(BasisState(col as u64));
            mat[(row.0 as usize, col)] += phase;
        }
    }
    mat
}

fn dense_lowest_pair(hamiltonian: &PauliSum) -> GroundStateResult {
    let mat = dense_matrix(hamiltonian);
    let eig = mat.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let lowest = order[0];
    let energy = eig.eigenvalues[lowest];
    let gap = if order.len() > 1 {
        eig.eigenvalues[order[1]] - energy
    } else {
        f64::INFINITY
    };
    let state = Statevector {
        n_qubits: hamiltonian.n_qubits,
        amplitudes: eig.eigenvectors.column(lowest).iter().copied().collect(),
    }
    .normalized();
    GroundStateResult {
        energy,
        state,
        degenerate: gap < DEGENERACY_GAP,
        gap,
    }
}

/// Lanczos with full reorthogonalization: two passes, both from fixed-seed
/// start vectors so results are reproducible run to run. The first pass
/// converges the lowest eigenpair; the second runs in the orthogonal
/// complement of that eigenvector, which measures the gap correctly even
/// when the ground space is degenerate (a single Krylov sequence cannot see
/// multiplicity).
fn lanczos_lowest_pair(hamiltonian: &PauliSum) -> Result<GroundStateResult> {
    let (energy, ground) = lanczos_lowest_in_complement(hamiltonian, &[], 0x9e3779b97f4a7c15)?;
    let (second, _) = lanczos_lowest_in_complement(
        hamiltonian,
        std::slice::from_ref(&ground),
        0x6a09e667f3bcc908,
    )?;
    let gap = second - energy;
    Ok(GroundStateResult {
        energy,
        state: Statevector {
            n_qubits: hamiltonian.n_qubits,
            amplitudes: ground.iter().copied().collect(),
        },
        degenerate: gap < DEGENERACY_GAP,
        gap,
    })
}

/// Lowest eigenpair of the Hamiltonian restricted to the orthogonal
/// complement of `deflate`.
fn lanczos_lowest_in_complement(
    hamiltonian: &PauliSum,
    deflate: &[DVector<Complex64>],
    seed: u64,
) -> Result<(f64, DVector<Complex64>)> {
    let dim = hamiltonian.dim();
    let max_krylov = 400.min(dim);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let project_out = |w: &mut DVector<Complex64>, basis: &[DVector<Complex64>]| {
        for q in deflate.iter().chain(basis) {
            let overlap = q.dotc(&*w);
            *w -= q * overlap;
        }
    };

    let mut v = DVector::from_fn(dim, |_, _| {
        Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    });
    project_out(&mut v, &[]);
    let norm = v.norm();
    if norm < 1e-12 {
        return Err(Error::NonConvergence(
            "deflated start vector collapsed".into(),
        ));
    }
    v /= Complex64::new(norm, 0.0);

    let mut basis: Vec<DVector<Complex64>> = vec![v];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();

    let matvec = |x: &DVector<Complex64>| -> DVector<Complex64> {
        let psi = Statevector {
            n_qubits: hamiltonian.n_qubits,
            amplitudes: x.iter().copied().collect(),
        };
        DVector::from_vec(apply_hamiltonian(hamiltonian, &psi).amplitudes)
    };

    let mut converged: Option<(Vec<f64>, DMatrix<f64>)> = None;
    for step in 0..max_krylov {
        let mut w = matvec(&basis[step]);
        if step > 0 {
            w -= &basis[step - 1] * Complex64::new(betas[step - 1], 0.0);
        }
        let alpha = basis[step].dotc(&w).re;
        alphas.push(alpha);
        w -= &basis[step] * Complex64::new(alpha, 0.0);
        // Full reorthogonalization, applied twice to scrub rounding drift.
        for _ in 0..2 {
            project_out(&mut w, &basis);
        }
        let beta = w.norm();

        let check_now = beta < 1e-13 || step + 1 == max_krylov || (step >= 12 && step % 4 == 0);
        if check_now {
            let (evals, evecs) = tridiagonal_eigen(&alphas, &betas);
            let resid0 = beta * evecs[(step, 0)].abs();
            if beta < 1e-13 || resid0 < 1e-11 || step + 1 == max_krylov {
                converged = Some((evals, evecs));
                break;
            }
        }
        betas.push(beta);
        basis.push(&w / Complex64::new(beta, 0.0));
    }

    let (evals, evecs) = converged.ok_or_else(|| {
        Error::NonConvergence("Lanczos failed to produce a Ritz decomposition".into())
    })?;
    let mut lowest = DVector::from_element(dim, Complex64::new(0.0, 0.0));
    for (j, q) in basis.iter().enumerate().take(evecs.nrows()) {
        lowest += q * Complex64::new(evecs[(j, 0)], 0.0);
    }
    lowest /= Complex64::new(lowest.norm(), 0.0);
    Ok((evals[0], lowest))
}

/// Eigen-decomposition of the Lanczos tridiagonal matrix, eigenvalues
/// ascending, eigenvectors in matching columns.
fn tridiagonal_eigen(alphas: &[f64], betas: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
    let m = alphas.len();
    let mut t = DMatrix::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alphas[i];
        if i + 1 < m {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    let eig = t.symmetric_eigen();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let evals: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut evecs = DMatrix::zeros(m, m);
    for (dst, &src) in order.iter().enumerate() {
        evecs.set_column(dst, &eig.eigenvectors.column(src));
    }
    (evals, evecs)
}

/// Real expectation value <psi|H|psi> of a Hermitian sum.
pub fn expectation(hamiltonian: &PauliSum, psi: &Statevector) -> Result<f64> {
    if hamiltonian.dim() != psi.dim() {
        return Err(Error::DimensionMismatch(format!(
            "Hamiltonian on {} qubits, state on {}",
            hamiltonian.n_qubits, psi.n_qubits
        )));
    }
    let h_psi = apply_hamiltonian(hamiltonian, psi);
    Ok(psi.inner(&h_psi).re)
}

/// <psi|P|psi> for a bare Pauli string (coefficient ignored).
pub fn pauli_expectation(term: &PauliTerm, psi: &Statevector) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    let unit = PauliTerm::new(term.x_mask, term.z_mask, Complex64::new(1.0, 0.0));
    for (b, &amp) in psi.amplitudes.iter().enumerate() {
        if amp == Complex64::new(0.0, 0.0) {
            continue;
        }
        let (phase, j) = unit.apply_to_basis(BasisState(b as u64));
        acc += psi.amplitudes[j.0 as usize].conj() * phase * amp;
    }
    acc.re
}

/// Per-shot variance 1 - <P>^2 of a unit-coefficient Pauli estimator.
pub fn term_variance(term: &PauliTerm, psi: &Statevector) -> f64 {
    let mean = pauli_expectation(term, psi);
    (1.0 - mean * mean).clamp(0.0, 1.0)
}

/// Outcome of removing the classical basis-state component from a ground state.
#[derive(Debug, Clone)]
pub enum Deflation {
    /// |<i0|gs>| is within 1e-12 of unity: the basis state already is the
    /// ground state and no quantum measurements are needed.
    ClassicallySolved,
    Boosted {
        /// alpha = <i0|gs> after the global phase is fixed real non-negative.
        alpha: f64,
        /// Unit-norm state orthogonal to |i0>.
        phi_q: Statevector,
    },
}

/// Split `gs = alpha |i0> + sqrt(1-alpha^2) |phi_q>` with phi_q ⟂ |i0>.
///
/// The global phase of `gs` is rotated so that <i0|gs> is real non-negative
/// before deflating.
pub fn deflate_quantum_state(gs: &Statevector, i0: BasisState) -> Result<Deflation> {
    let idx = i0.0 as usize;
    if idx >= gs.dim() {
        return Err(Error::DimensionMismatch(format!(
            "basis state {} out of range for {} qubits",
            i0.0, gs.n_qubits
        )));
    }
    let a = gs.amplitudes[idx];
    let alpha = a.norm();
    if alpha >= 1.0 - 1e-12 {
        return Ok(Deflation::ClassicallySolved);
    }
    let rotation = if alpha > 0.0 {
        a.conj() / alpha
    } else {
        Complex64::new(1.0, 0.0)
    };
    let mut amplitudes: Vec<Complex64> = gs.amplitudes.iter().map(|&c| rotation * c).collect();
    amplitudes[idx] = Complex64::new(0.0, 0.0);
    let phi_q = Statevector {
        n_qubits: gs.n_qubits,
        amplitudes,
    }
    .normalized();
    Ok(Deflation::Boosted { alpha, phi_q })
}

/// Brick-layer ansatz of two-qubit number-conserving blocks on top of a
/// basis-state preparation.
#[derive(Debug, Clone)]
pub struct AnsatzSpec {
    pub n_qubits: usize,
    /// Number of brick layers D.
    pub layers: usize,
    /// One (theta, phi) pair per block, layer by layer, lower qubit first.
    pub block_params: Vec<(f64, f64)>,
    /// Initial bitstring prepared by the X layer.
    pub initial_state: BasisState,
}

impl AnsatzSpec {
    /// Qubit pairs of one brick layer: even layers start at qubit 0,
    /// odd layers at qubit 1.
    pub fn layer_pairs(n_qubits: usize, layer: usize) -> Vec<(usize, usize)> {
        let start = layer % 2;
        (start..n_qubits.saturating_sub(1))
            .step_by(2)
            .map(|q| (q, q + 1))
            .collect()
    }

    pub fn total_blocks(&self) -> usize {
        (0..self.layers)
            .map(|l| Self::layer_pairs(self.n_qubits, l).len())
            .sum()
    }
}

/// Apply the ansatz to |initial_state>. Each block is a Givens-style rotation
/// with phase in the {|01>, |10>} subspace, so Hamming weight is conserved.
pub fn apply_ansatz(spec: &AnsatzSpec) -> Result<Statevector> {
    if spec.block_params.len() != spec.total_blocks() {
        return Err(Error::InvalidArgument(format!(
            "expected {} block parameter pairs, got {}",
            spec.total_blocks(),
            spec.block_params.len()
        )));
    }
    let mut psi = basis_statevector(spec.initial_state, spec.n_qubits)?;
    let mut params = spec.block_params.iter();
    for layer in 0..spec.layers {
        for (lo, hi) in AnsatzSpec::layer_pairs(spec.n_qubits, layer) {
            let &(theta, phi) = params.next().expect("parameter count checked above");
            apply_givens_block(&mut psi, lo, hi, theta, phi);
        }
    }
    Ok(psi)
}

/// Rotation in the single-excitation subspace of qubits (lo, hi):
///   |01> -> cos(theta)|01> + e^{i phi} sin(theta)|10>
///   |10> -> -e^{-i phi} sin(theta)|01> + cos(theta)|10>
/// and identity on |00>, |11>. Identity at theta = 0.
fn apply_givens_block(psi: &mut Statevector, lo: usize, hi: usize, theta: f64, phi: f64) {
    let (cos, sin) = (theta.cos(), theta.sin());
    let phase = Complex64::from_polar(1.0, phi);
    let bit_lo = 1usize << lo;
    let bit_hi = 1usize << hi;
    for b in 0..psi.dim() {
        // Visit each {|01>, |10>} pair once via its |01> member
        // (lo bit set, hi bit clear).
        if b & bit_lo != 0 && b & bit_hi == 0 {
            let partner = (b & !bit_lo) | bit_hi;
            let a01 = psi.amplitudes[b];
            let a10 = psi.amplitudes[partner];
            psi.amplitudes[b] = cos * a01 - phase.conj() * sin * a10;
            psi.amplitudes[partner] = phase * sin * a01 + cos * a10;
        }
    }
}

/// Counts for the controlled-gate cost model: total brick-layer blocks and
/// the blocks that straddle the filled/unfilled boundary of the initial
/// state |0^(N-k) 1^k>. Only the straddling blocks need controlled versions
/// inside a Hadamard test.
pub fn count_coupling_blocks(spec: &AnsatzSpec) -> Result<(usize, usize)> {
    let k = spec.initial_state.popcount() as usize;
    let expected = if k == 0 { 0 } else { (1u64 << k) - 1 };
    if spec.initial_state.0 != expected {
        return Err(Error::InvalidArgument(format!(
            "coupling-block count requires the filled-prefix state |0^(N-k) 1^k>, got {}",
            spec.initial_state.to_bitstring(spec.n_qubits)
        )));
    }
    let total = spec.total_blocks();
    let mut coupling = 0;
    if k > 0 && k < spec.n_qubits {
        for layer in 0..spec.layers {
            if AnsatzSpec::layer_pairs(spec.n_qubits, layer).contains(&(k - 1, k)) {
                coupling += 1;
            }
        }
    }
    Ok((total, coupling))
}
