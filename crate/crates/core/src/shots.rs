//! Measurement-cost engine: variance propagation, K-factors, optimal shot
//! allocation, and measurement speedups.
//!
//! Everything funnels through one relation: an estimator assembled from
//! independent channels with per-shot deviations sigma_j and sensitivities
//! a_j reaches, under optimal allocation of N total shots,
//!   Var = (sum_j |a_j| sigma_j)^2 / N,
//! with shots proportional to |a_j| sigma_j. The squared prefactor is the
//! K-factor: shots to precision eps is K / eps^2.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::pauli::{BasisState, PauliSum};
use crate::statevec::{term_variance, Statevector};

/// One independently-measured channel of a compound estimator.
#[derive(Debug, Clone)]
pub struct VarianceTerm {
    pub label: String,
    /// Sensitivity a = d(lambda)/d(channel mean).
    pub sensitivity: f64,
    /// Per-shot variance sigma^2; the channel estimator has Var = sigma^2/M.
    pub sigma_sq: f64,
    /// Filled in by allocation.
    pub shots: u64,
}

impl VarianceTerm {
    pub fn new(label: impl Into<String>, sensitivity: f64, sigma_sq: f64) -> Self {
        Self {
            label: label.into(),
            sensitivity,
            sigma_sq,
            shots: 0,
        }
    }

    /// |a| * sigma, the optimal-allocation weight.
    pub fn weight(&self) -> f64 {
        self.sensitivity.abs() * self.sigma_sq.max(0.0).sqrt()
    }
}

/// Shot distribution over channels with predicted variances.
#[derive(Debug, Clone)]
pub struct ShotPlan {
    pub total_shots: u64,
    pub terms: Vec<VarianceTerm>,
    /// (sum |a| sigma)^2 / N, the idealized continuum optimum.
    pub continuum_variance: f64,
    /// sum a^2 sigma^2 / M_j over the integer allocation actually returned.
    pub achieved_variance: f64,
}

impl ShotPlan {
    /// The K-factor of this channel set: predicted Var = K / N.
    pub fn k_factor(&self) -> f64 {
        let w: f64 = self.terms.iter().map(VarianceTerm::weight).sum();
        w * w
    }
}

/// K-factors of one analysis, Var(E-hat) = K / M.
#[derive(Debug, Clone, serde::Serialize)]
pub struct KFactors {
    /// Boosted estimator.
    pub k_hf: f64,
    /// Conventional VQE on the reference state.
    pub k_vqe: f64,
    /// The H22 sub-estimator on the orthogonal quantum state.
    pub k_prime: f64,
    pub alpha: f64,
    /// Ground energy entering the delta-term, Hartree.
    pub energy: f64,
}

/// Variance (1 - y^2)/M of the Hadamard-test overlap estimator.
pub fn overlap_variance(y: f64, shots: u64) -> Result<f64> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shot count must be positive".into()));
    }
    if y.abs() > 1.0 + 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "overlap {y} outside [-1, 1]"
        )));
    }
    Ok((1.0 - (y * y).min(1.0)) / shots as f64)
}

/// First-order variance of the boosted eigenvalue estimator:
///   Var(lambda-hat) = 4 v1^2 v2^2 sum_i (<i|H|i0> - E delta_{i,i0})^2 Var(y_i)
///                   + v2^4 Var(H22),
/// with v1 = alpha and v2 = sqrt(1 - alpha^2). Exact boosting (|alpha| = 1)
/// returns zero.
pub fn propagate_eigenvalue_variance(
    alpha: f64,
    energy: f64,
    cross_elements: &BTreeMap<BasisState, f64>,
    overlap_variances: &BTreeMap<BasisState, f64>,
    var_h22: f64,
    i0: BasisState,
) -> f64 {
    if alpha.abs() >= 1.0 {
        return 0.0;
    }
    let v1_sq = alpha * alpha;
    let v2_sq = 1.0 - v1_sq;
    let mut sum = 0.0;
    for (&state, &var_y) in overlap_variances {
        let element = cross_elements.get(&state).copied().unwrap_or(0.0);
        let shifted = if state == i0 {
            element - energy
        } else {
            element
        };
        sum += shifted * shifted * var_y;
    }
    4.0 * v1_sq * v2_sq * sum + v2_sq * v2_sq * var_h22
}

/// Distribute N shots over channels proportionally to |a_j| sigma_j, with
/// largest-remainder rounding followed by single-shot exchanges until no
/// further improvement, so the plan is a local optimum of the achieved
/// variance.
pub fn optimal_allocation(terms: Vec<VarianceTerm>, total_shots: u64) -> Result<ShotPlan> {
    let weights: Vec<f64> = terms.iter().map(VarianceTerm::weight).collect();
    let weight_sum: f64 = weights.iter().sum();
    if weight_sum <= 0.0 || !weight_sum.is_finite() {
        return Err(Error::InvalidArgument(
            "allocation needs at least one channel with |a| sigma > 0".into(),
        ));
    }
    let active = weights.iter().filter(|&&w| w > 0.0).count() as u64;
    if total_shots < active {
        return Err(Error::InvalidArgument(format!(
            "{total_shots} shots cannot cover {active} channels with at least one shot each"
        )));
    }

    // Largest-remainder rounding of the continuum optimum.
    let ideal: Vec<f64> = weights
        .iter()
        .map(|w| total_shots as f64 * w / weight_sum)
        .collect();
    let mut shots: Vec<u64> = ideal.iter().map(|x| x.floor() as u64).collect();
    let mut leftover = total_shots - shots.iter().sum::<u64>();
    let mut by_remainder: Vec<usize> = (0..terms.len()).filter(|&j| weights[j] > 0.0).collect();
    by_remainder.sort_by(|&a, &b| {
        let ra = ideal[a] - ideal[a].floor();
        let rb = ideal[b] - ideal[b].floor();
        rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
    });
    for &j in by_remainder.iter().cycle() {
        if leftover == 0 {
            break;
        }
        shots[j] += 1;
        leftover -= 1;
    }
    // Every active channel needs at least one shot; pull from the largest.
    for j in 0..terms.len() {
        if weights[j] > 0.0 && shots[j] == 0 {
            let donor = (0..terms.len())
                .filter(|&m| shots[m] > 1)
                .max_by(|&a, &b| shots[a].cmp(&shots[b]))
                .expect("total_shots >= active guarantees a donor");
            shots[donor] -= 1;
            shots[j] += 1;
        }
    }

    let cost = |j: usize, m: u64| -> f64 {
        if weights[j] == 0.0 {
            0.0
        } else {
            let c = terms[j].sensitivity * terms[j].sensitivity * terms[j].sigma_sq;
            if m == 0 {
                f64::INFINITY
            } else {
                c / m as f64
            }
        }
    };

    // Exchange refinement: move single shots while any move lowers the
    // achieved variance.
    loop {
        let mut best: Option<(usize, usize, f64)> = None;
        for from in 0..terms.len() {
            if shots[from] <= 1 && weights[from] > 0.0 {
                continue;
            }
            if shots[from] == 0 {
                continue;
            }
            let release = cost(from, shots[from] - 1) - cost(from, shots[from]);
            for to in 0..terms.len() {
                if to == from || weights[to] == 0.0 {
                    continue;
                }
                let gain = cost(to, shots[to]) - cost(to, shots[to] + 1);
                let delta = release - gain;
                if delta < -1e-18 && best.is_none_or(|(_, _, d)| delta < d) {
                    best = Some((from, to, delta));
                }
            }
        }
        match best {
            Some((from, to, _)) => {
                shots[from] -= 1;
                shots[to] += 1;
            }
            None => break,
        }
    }

    let achieved_variance: f64 = (0..terms.len()).map(|j| cost(j, shots[j])).sum();
    let continuum_variance = weight_sum * weight_sum / total_shots as f64;
    let mut terms = terms;
    for (term, &m) in terms.iter_mut().zip(&shots) {
        term.shots = m;
    }
    Ok(ShotPlan {
        total_shots,
        terms,
        continuum_variance,
        achieved_variance,
    })
}

/// The boosted-estimator K-factor:
///   K = ( 2 alpha sqrt(1-alpha^2) sum_i |<i|H|i0> - E delta_{i,i0}| sqrt(1-y_i^2)
///       + (1-alpha^2) sqrt(K') )^2.
/// The i = i0 channel carries the -E from the overlap-matrix entry; it is the
/// only coupling between Hamiltonian and overlap errors in the two-state case.
pub fn k_factor_hf_vqe(
    alpha: f64,
    energy: f64,
    cross_elements: &BTreeMap<BasisState, f64>,
    overlaps: &BTreeMap<BasisState, f64>,
    k_prime: f64,
    i0: BasisState,
) -> Result<f64> {
    if alpha.abs() > 1.0 + 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "alpha {alpha} outside [-1, 1]"
        )));
    }
    let alpha = alpha.clamp(-1.0, 1.0);
    let v2_sq = 1.0 - alpha * alpha;
    let mut overlap_sum = 0.0;
    for (&state, &y) in overlaps {
        if y.abs() > 1.0 + 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "overlap {y} outside [-1, 1]"
            )));
        }
        let element = cross_elements.get(&state).copied().unwrap_or(0.0);
        let shifted = if state == i0 {
            element - energy
        } else {
            element
        };
        overlap_sum += shifted.abs() * (1.0 - (y * y).min(1.0)).sqrt();
    }
    let root =
        2.0 * alpha.abs() * v2_sq.max(0.0).sqrt() * overlap_sum + v2_sq * k_prime.max(0.0).sqrt();
    Ok(root * root)
}

/// Per-shot deviation of one co-measured group: with covariances neglected,
/// sigma_g = sqrt(sum over the group of h^2 (1 - <P>^2)).
fn group_sigmas(hamiltonian: &PauliSum, psi: &Statevector, groups: &[Vec<usize>]) -> Vec<f64> {
    groups
        .iter()
        .map(|group| {
            group
                .iter()
                .map(|&idx| {
                    let term = &hamiltonian.terms[idx];
                    let h = term.coefficient.norm();
                    h * h * term_variance(term, psi)
                })
                .sum::<f64>()
                .sqrt()
        })
        .collect()
}

/// Conventional-VQE K-factor with qubitwise grouping:
///   K = (sum_g sigma_g)^2,
/// where each group is one allocation channel with unit sensitivity. With
/// singleton groups this reduces to (sum_i |h_i| sqrt(Var(P_i)))^2.
pub fn k_factor_conventional_vqe(
    hamiltonian: &PauliSum,
    psi: &Statevector,
    groups: &[Vec<usize>],
) -> Result<f64> {
    if hamiltonian.dim() != psi.dim() {
        return Err(Error::DimensionMismatch(format!(
            "Hamiltonian on {} qubits, state on {}",
            hamiltonian.n_qubits, psi.n_qubits
        )));
    }
    let total: f64 = group_sigmas(hamiltonian, psi, groups).iter().sum();
    Ok(total * total)
}

/// K' of the H22 estimator: the conventional-VQE machinery evaluated on the
/// orthogonal quantum state.
pub fn k_prime_for_h22(
    hamiltonian: &PauliSum,
    phi_q: &Statevector,
    groups: &[Vec<usize>],
) -> Result<f64> {
    k_factor_conventional_vqe(hamiltonian, phi_q, groups)
}

/// Allocation channels of the boosted estimator: one overlap channel per
/// coupled basis state and one channel per co-measured group of the H22
/// estimator. Flat optimal allocation over these channels realizes the
/// K-factor of `k_factor_hf_vqe` exactly, since v2^2 sqrt(K') decomposes as
/// sum_g v2^2 sigma_g.
#[allow(clippy::too_many_arguments)]
pub fn boosted_variance_terms(
    alpha: f64,
    energy: f64,
    cross_elements: &BTreeMap<BasisState, f64>,
    overlaps: &BTreeMap<BasisState, f64>,
    hamiltonian: &PauliSum,
    phi_q: &Statevector,
    groups: &[Vec<usize>],
    i0: BasisState,
) -> Vec<VarianceTerm> {
    let v1 = alpha;
    let v2_sq = 1.0 - alpha * alpha;
    let v2 = v2_sq.max(0.0).sqrt();
    let mut terms = Vec::new();
    for (&state, &y) in overlaps {
        let element = cross_elements.get(&state).copied().unwrap_or(0.0);
        let shifted = if state == i0 {
            element - energy
        } else {
            element
        };
        terms.push(VarianceTerm::new(
            format!("y[{}]", state.to_bitstring(hamiltonian.n_qubits)),
            2.0 * v1 * v2 * shifted,
            (1.0 - (y * y).min(1.0)).max(0.0),
        ));
    }
    for (g, sigma) in group_sigmas(hamiltonian, phi_q, groups).iter().enumerate() {
        terms.push(VarianceTerm::new(
            format!("H22/group{g}"),
            v2_sq,
            sigma * sigma,
        ));
    }
    terms
}

/// Shots needed for Var = K/M to reach precision eps: ceil(K / eps^2).
pub fn shots_for_precision(k: f64, epsilon: f64) -> Result<u64> {
    if epsilon <= 0.0 {
        return Err(Error::InvalidArgument("precision must be positive".into()));
    }
    if k < 0.0 {
        return Err(Error::InvalidArgument(
            "K-factor must be non-negative".into(),
        ));
    }
    Ok((k / (epsilon * epsilon)).ceil() as u64)
}

/// Measurement speedup K_vqe / K_hf; infinite when the boosted estimator is
/// exact (K_hf = 0).
pub fn speedup(k_vqe: f64, k_hf: f64) -> f64 {
    if k_hf == 0.0 {
        f64::INFINITY
    } else {
        k_vqe / k_hf
    }
}

/// Large-basis speedup approximation 1/(1 - alpha^2)^2, valid for |alpha| < 1.
pub fn asymptotic_speedup(alpha: f64) -> Result<f64> {
    if alpha.abs() >= 1.0 {
        return Err(Error::InvalidArgument(
            "asymptotic speedup diverges at |alpha| = 1".into(),
        ));
    }
    let denom = 1.0 - alpha * alpha;
    Ok(1.0 / (denom * denom))
}

/// Observed speedup relative to the asymptotic approximation:
/// S (1 - alpha^2)^2.
pub fn asymptotic_ratio(exact_speedup: f64, alpha: f64) -> f64 {
    let denom = 1.0 - alpha * alpha;
    exact_speedup * denom * denom
}
