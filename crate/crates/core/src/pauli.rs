//! Pauli-string algebra on bit masks.
//!
//! A Pauli string over N qubits is stored as a pair of masks: `x_mask` has a
//! bit set on every qubit where X or Y acts, `z_mask` on every qubit where Z
//! or Y acts. Qubit 0 is the least-significant bit everywhere. A string maps
//! each computational basis state to exactly one basis state with a
//! unit-magnitude phase, which is what makes the classical cross-term
//! evaluation cheap.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{Error, Result};

/// Default threshold below which parsed coefficients are dropped.
/// Chemistry-exported files routinely carry terms at the 1e-16 level.
pub const DEFAULT_DROP_THRESHOLD: f64 = 1e-12;

/// A computational basis state of N qubits, qubit 0 = least-significant bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisState(pub u64);

impl BasisState {
    /// Parse a bitstring such as "0011" (qubit 0 is the rightmost character).
    pub fn from_bitstring(s: &str) -> Result<Self> {
        let mut value = 0u64;
        for (k, c) in s.chars().rev().enumerate() {
            match c {
                '0' => {}
                '1' => {
                    if k >= 64 {
                        return Err(Error::InputFormat(format!("bitstring too long: {s}")));
                    }
                    value |= 1 << k;
                }
                _ => {
                    return Err(Error::InputFormat(format!(
                        "invalid character '{c}' in bitstring {s}"
                    )))
                }
            }
        }
        Ok(BasisState(value))
    }

    /// Render as an n-qubit bitstring, qubit 0 rightmost.
    pub fn to_bitstring(self, n_qubits: usize) -> String {
        (0..n_qubits)
            .rev()
            .map(|q| if self.0 >> q & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    pub fn popcount(self) -> u32 {
        self.0.count_ones()
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliOp {
    X,
    Y,
    Z,
}

/// One weighted Pauli string.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliTerm {
    /// Bit set on every qubit where X or Y acts.
    pub x_mask: u64,
    /// Bit set on every qubit where Z or Y acts.
    pub z_mask: u64,
    /// Weight, Hartree for Hamiltonian terms. Real for Hermitian sums.
    pub coefficient: Complex64,
}

impl PauliTerm {
    pub fn new(x_mask: u64, z_mask: u64, coefficient: Complex64) -> Self {
        Self {
            x_mask,
            z_mask,
            coefficient,
        }
    }

    /// The identity term: both masks zero.
    pub fn identity(coefficient: f64) -> Self {
        Self::new(0, 0, Complex64::new(coefficient, 0.0))
    }

    pub fn from_ops(ops: &[(usize, PauliOp)], coefficient: f64) -> Self {
        let mut x_mask = 0u64;
        let mut z_mask = 0u64;
        for &(qubit, op) in ops {
            match op {
                PauliOp::X => x_mask |= 1 << qubit,
                PauliOp::Y => {
                    x_mask |= 1 << qubit;
                    z_mask |= 1 << qubit;
                }
                PauliOp::Z => z_mask |= 1 << qubit,
            }
        }
        Self::new(x_mask, z_mask, Complex64::new(coefficient, 0.0))
    }

    pub fn is_identity(&self) -> bool {
        self.x_mask == 0 && self.z_mask == 0
    }

    /// Number of qubits on which Y acts.
    pub fn y_count(&self) -> u32 {
        (self.x_mask & self.z_mask).count_ones()
    }

    /// Largest qubit index touched by the string, or None for the identity.
    pub fn max_qubit(&self) -> Option<usize> {
        let support = self.x_mask | self.z_mask;
        if support == 0 {
            None
        } else {
            Some(63 - support.leading_zeros() as usize)
        }
    }

    /// Apply the term to a basis state: `P|i> = phase |i XOR x_mask>`.
    ///
    /// The phase is `coefficient * i^(#Y) * (-1)^popcount(z_mask & i)`, which
    /// fixes the convention Y|0> = i|1>, Y|1> = -i|0>.
    pub fn apply_to_basis(&self, state: BasisState) -> (Complex64, BasisState) {
        let target = BasisState(state.0 ^ self.x_mask);
        let i_pow = match self.y_count() % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        let z_sign = if (self.z_mask & state.0).count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        (self.coefficient * i_pow * z_sign, target)
    }

    /// Render the string part as space-separated tokens, e.g. "X0 Y2 Z5".
    pub fn pauli_string(&self) -> String {
        let mut tokens = Vec::new();
        let support = self.x_mask | self.z_mask;
        for q in 0..64 {
            if support >> q & 1 == 0 {
                continue;
            }
            let x = self.x_mask >> q & 1 == 1;
            let z = self.z_mask >> q & 1 == 1;
            let letter = match (x, z) {
                (true, false) => 'X',
                (true, true) => 'Y',
                (false, true) => 'Z',
                (false, false) => unreachable!(),
            };
            tokens.push(format!("{letter}{q}"));
        }
        tokens.join(" ")
    }
}

/// A weighted sum of Pauli strings over a fixed qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    pub n_qubits: usize,
    pub terms: Vec<PauliTerm>,
    pub n_electrons: Option<u32>,
    pub label: Option<String>,
}

#[derive(Deserialize)]
struct RawHamiltonian {
    n_qubits: usize,
    #[serde(default)]
    n_electrons: Option<u32>,
    #[serde(default)]
    label: Option<String>,
    terms: Vec<RawTerm>,
}

#[derive(Deserialize)]
struct RawTerm {
    pauli: String,
    coeff: RawCoeff,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawCoeff {
    Real(f64),
    Complex([f64; 2]),
}

fn parse_pauli_tokens(s: &str, n_qubits: usize) -> Result<(u64, u64)> {
    let mut x_mask = 0u64;
    let mut z_mask = 0u64;
    for token in s.split_whitespace() {
        let mut chars = token.chars();
        let letter = chars.next().unwrap();
        let index: usize = chars
            .as_str()
            .parse()
            .map_err(|_| Error::InputFormat(format!("malformed Pauli token `{token}` in `{s}`")))?;
        if index >= n_qubits {
            return Err(Error::QubitIndexOutOfRange {
                term: s.to_string(),
                qubit: index,
                n_qubits,
            });
        }
        let (x, z) = match letter {
            'X' => (true, false),
            'Y' => (true, true),
            'Z' => (false, true),
            _ => {
                return Err(Error::InputFormat(format!(
                    "unknown Pauli letter `{letter}` in token `{token}`"
                )))
            }
        };
        let bit = 1u64 << index;
        if (x_mask | z_mask) & bit != 0 {
            return Err(Error::InputFormat(format!(
                "qubit {index} appears twice in `{s}`"
            )));
        }
        if x {
            x_mask |= bit;
        }
        if z {
            z_mask |= bit;
        }
    }
    Ok((x_mask, z_mask))
}

impl PauliSum {
    /// Build from explicit terms, merging duplicates and dropping negligible
    /// coefficients.
    pub fn new(n_qubits: usize, terms: Vec<PauliTerm>) -> Result<Self> {
        let mut sum = Self {
            n_qubits,
            terms,
            n_electrons: None,
            label: None,
        };
        sum.canonicalize(DEFAULT_DROP_THRESHOLD)?;
        Ok(sum)
    }

    /// Parse the JSON interchange format with the Hermitian-Hamiltonian role:
    /// all coefficients must be real after canonicalization.
    pub fn parse_hamiltonian(text: &str) -> Result<Self> {
        Self::parse_hamiltonian_with_threshold(text, DEFAULT_DROP_THRESHOLD)
    }

    pub fn parse_hamiltonian_with_threshold(text: &str, drop_threshold: f64) -> Result<Self> {
        let raw: RawHamiltonian = serde_json::from_str(text)
            .map_err(|e| Error::InputFormat(format!("JSON parse error: {e}")))?;
        if raw.n_qubits == 0 || raw.n_qubits > 64 {
            return Err(Error::InputFormat(format!(
                "n_qubits must be in 1..=64, got {}",
                raw.n_qubits
            )));
        }
        let mut terms = Vec::with_capacity(raw.terms.len());
        for t in &raw.terms {
            let (x_mask, z_mask) = parse_pauli_tokens(&t.pauli, raw.n_qubits)?;
            let coefficient = match t.coeff {
                RawCoeff::Real(re) => Complex64::new(re, 0.0),
                RawCoeff::Complex([re, im]) => Complex64::new(re, im),
            };
            terms.push(PauliTerm {
                x_mask,
                z_mask,
                coefficient,
            });
        }
        let mut sum = Self {
            n_qubits: raw.n_qubits,
            terms,
            n_electrons: raw.n_electrons,
            label: raw.label,
        };
        sum.canonicalize(drop_threshold)?;
        sum.require_hermitian(drop_threshold)?;
        Ok(sum)
    }

    /// Merge duplicate (x_mask, z_mask) pairs by coefficient addition and drop
    /// terms below the threshold. Surviving terms keep first-appearance order.
    fn canonicalize(&mut self, drop_threshold: f64) -> Result<()> {
        for term in &self.terms {
            if let Some(q) = term.max_qubit() {
                if q >= self.n_qubits {
                    return Err(Error::QubitIndexOutOfRange {
                        term: term.pauli_string(),
                        qubit: q,
                        n_qubits: self.n_qubits,
                    });
                }
            }
        }
        let mut order: Vec<(u64, u64)> = Vec::new();
        let mut merged: BTreeMap<(u64, u64), Complex64> = BTreeMap::new();
        for term in &self.terms {
            let key = (term.x_mask, term.z_mask);
            match merged.get_mut(&key) {
                Some(c) => *c += term.coefficient,
                None => {
                    merged.insert(key, term.coefficient);
                    order.push(key);
                }
            }
        }
        self.terms = order
            .into_iter()
            .filter_map(|key| {
                let c = merged[&key];
                (c.norm() >= drop_threshold).then_some(PauliTerm {
                    x_mask: key.0,
                    z_mask: key.1,
                    coefficient: c,
                })
            })
            .collect();
        Ok(())
    }

    /// Pauli strings are Hermitian, so a Hermitian sum needs real coefficients.
    fn require_hermitian(&self, tol: f64) -> Result<()> {
        for term in &self.terms {
            if term.coefficient.im.abs() > tol {
                return Err(Error::NonHermitian {
                    term: term.pauli_string(),
                    coeff: format!("{}", term.coefficient),
                });
            }
        }
        Ok(())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.require_hermitian(tol).is_ok()
    }

    pub fn dim(&self) -> usize {
        1usize << self.n_qubits
    }

    /// Coefficient of the identity term, zero if absent.
    pub fn identity_coefficient(&self) -> Complex64 {
        self.terms
            .iter()
            .filter(|t| t.is_identity())
            .map(|t| t.coefficient)
            .sum()
    }

    /// Split off the identity: returns the non-identity part and the identity
    /// coefficient. The identity shifts every eigenvalue deterministically and
    /// needs no measurement, so the cost analysis works on the remainder.
    pub fn split_identity(&self) -> (PauliSum, f64) {
        let shift = self.identity_coefficient().re;
        let rest = PauliSum {
            n_qubits: self.n_qubits,
            terms: self
                .terms
                .iter()
                .filter(|t| !t.is_identity())
                .copied()
                .collect(),
            n_electrons: self.n_electrons,
            label: self.label.clone(),
        };
        (rest, shift)
    }

    /// Sum of |coefficient| over non-identity terms.
    pub fn one_norm(&self) -> f64 {
        self.terms
            .iter()
            .filter(|t| !t.is_identity())
            .map(|t| t.coefficient.norm())
            .sum()
    }
}

/// All nonzero matrix elements <j|H|i0> in column i0, keyed by j.
///
/// Each term maps |i0> to exactly one |j>, so the support has at most one
/// entry per distinct x_mask.
pub fn connected_matrix_elements(
    hamiltonian: &PauliSum,
    i0: BasisState,
) -> BTreeMap<BasisState, Complex64> {
    let mut elements: BTreeMap<BasisState, Complex64> = BTreeMap::new();
    for term in &hamiltonian.terms {
        let (phase, j) = term.apply_to_basis(i0);
        *elements.entry(j).or_insert(Complex64::new(0.0, 0.0)) += phase;
    }
    elements.retain(|_, c| c.norm() > 0.0);
    elements
}

/// Qubitwise commutation: on every qubit the two letters are equal or at
/// least one is the identity. This is the co-measurability criterion for
/// shared-shot grouping.
pub fn qubitwise_commute(a: &PauliTerm, b: &PauliTerm) -> bool {
    let support_a = a.x_mask | a.z_mask;
    let support_b = b.x_mask | b.z_mask;
    let both = support_a & support_b;
    let differ = (a.x_mask ^ b.x_mask) | (a.z_mask ^ b.z_mask);
    both & differ == 0
}

/// Greedy first-fit grouping of co-measurable terms.
///
/// Terms are visited in descending |coefficient| (stable sort, so ties keep
/// file order) and placed into the first existing group whose members all
/// qubitwise-commute with them. The identity term is never grouped; it is
/// measured for free. Returns groups of indices into `hamiltonian.terms`.
pub fn greedy_grouping(hamiltonian: &PauliSum) -> Vec<Vec<usize>> {
    let mut indices: Vec<usize> = (0..hamiltonian.terms.len())
        .filter(|&i| !hamiltonian.terms[i].is_identity())
        .collect();
    indices.sort_by(|&a, &b| {
        let ca = hamiltonian.terms[a].coefficient.norm();
        let cb = hamiltonian.terms[b].coefficient.norm();
        cb.partial_cmp(&ca).unwrap()
    });

    let mut groups: Vec<Vec<usize>> = Vec::new();
    for idx in indices {
        let term = &hamiltonian.terms[idx];
        let slot = groups.iter_mut().find(|group| {
            group
                .iter()
                .all(|&other| qubitwise_commute(term, &hamiltonian.terms[other]))
        });
        match slot {
            Some(group) => group.push(idx),
            None => groups.push(vec![idx]),
        }
    }
    groups
}

/// The set T of terms contributing to some <j|H|i0>, with its one-norm.
///
/// A Pauli string never annihilates a basis state, so T is all non-identity
/// terms; the one-norm bounds sum_j |<j|H|i0>| from above for the asymptotic
/// speedup estimate.
pub fn terms_coupling_to(hamiltonian: &PauliSum, _i0: BasisState) -> (Vec<usize>, f64) {
    let indices: Vec<usize> = (0..hamiltonian.terms.len())
        .filter(|&i| !hamiltonian.terms[i].is_identity())
        .collect();
    let norm = indices
        .iter()
        .map(|&i| hamiltonian.terms[i].coefficient.norm())
        .sum();
    (indices, norm)
}
