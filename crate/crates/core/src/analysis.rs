//! End-to-end analysis pipeline: from a parsed Hamiltonian to the
//! measurement-cost report, plus the Monte Carlo validation of the variance
//! model.
//!
//! True values (the overlap alpha, the energy, each y_i, and the per-term
//! variances) come from exact diagonalization. The identity component of the
//! Hamiltonian is split off up front: it shifts every energy deterministically
//! and never needs measurement, and all cost formulas are invariant under
//! that split as long as the delta-term uses the matching eigenvalue.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hadamard::{build_observables, sample_estimator_with, GateCostModel};
use crate::pauli::{connected_matrix_elements, greedy_grouping, BasisState, PauliSum};
use crate::shots::{
    asymptotic_ratio, asymptotic_speedup, boosted_variance_terms, k_factor_conventional_vqe,
    k_factor_hf_vqe, k_prime_for_h22, optimal_allocation, shots_for_precision, speedup, KFactors,
    ShotPlan,
};
use crate::statevec::{
    deflate_quantum_state, exact_ground_state_with_cap, pauli_expectation, Deflation,
    GroundStateResult, Statevector, DEFAULT_QUBIT_CAP,
};
use crate::subspace::{build_two_state_problem, solve_real_gevp, SubspaceProblem};

/// Largest imaginary component tolerated in states and cross terms; the
/// measurement model estimates real parts only, which is exact for
/// time-reversal-symmetric Hamiltonians.
const REALNESS_TOL: f64 = 1e-8;

/// Replica count below which the validator refuses to grade pass/fail.
const MIN_REPLICAS_FOR_VERDICT: u64 = 10;

/// Replica resampling cost caps the validator well below the analysis cap.
const MAX_VALIDATION_QUBITS: usize = 12;

#[derive(Debug, Clone)]
pub struct AnalysisOptions {
    /// Target energy precision, Hartree.
    pub epsilon: f64,
    /// Boosting determinant override; default is the dominant basis state of
    /// the ground state within the declared particle sector.
    pub hf_state: Option<BasisState>,
    pub qubit_cap: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            epsilon: 1e-3,
            hf_state: None,
            qubit_cap: DEFAULT_QUBIT_CAP,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AnalysisStatus {
    /// Single-determinant boosting applies.
    Boosted,
    /// The ground state is (numerically) a basis state; nothing to measure.
    ClassicallySolved,
}

/// One molecule's measurement-cost summary.
#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub label: String,
    pub n_qubits: usize,
    pub status: AnalysisStatus,
    /// Boosting determinant as a bitstring, qubit 0 rightmost.
    pub hf_state: String,
    /// Overlap <i0|gs>.
    pub alpha: f64,
    /// Exact ground energy, Hartree.
    pub e_exact: f64,
    /// Shots for conventional VQE at precision epsilon.
    pub m_vqe: u64,
    /// Shots for the boosted estimator at precision epsilon.
    pub m_hfvqe: u64,
    /// K_vqe / K_hf; infinite when classically solved.
    pub speedup: f64,
    /// 1/(1-alpha^2)^2.
    pub asymptotic_speedup: f64,
    /// speedup * (1-alpha^2)^2.
    pub asymptotic_ratio: f64,
    pub epsilon: f64,
    pub k_factors: KFactors,
    /// Non-identity term count and co-measurable group count.
    pub n_terms: usize,
    pub n_groups: usize,
    /// Two-qubit-gate factor of the controlled ansatz at D = N, F = 3.
    pub controlled_overhead: f64,
}

/// Everything the validator and report builder share: exact quantities plus
/// the derived measurement channels.
pub struct Pipeline {
    pub hamiltonian: PauliSum,
    pub stripped: PauliSum,
    pub identity_shift: f64,
    pub ground: GroundStateResult,
    pub i0: BasisState,
    pub alpha: f64,
    pub phi_q: Option<Statevector>,
    /// Real cross elements <j|H'|i0> of the identity-free Hamiltonian.
    pub cross: BTreeMap<BasisState, f64>,
    /// y_j = Re<phi_q|j> on the coupling support plus i0.
    pub overlaps: BTreeMap<BasisState, f64>,
    pub groups: Vec<Vec<usize>>,
    pub problem: Option<SubspaceProblem>,
    pub k_factors: KFactors,
}

/// Pick the boosting determinant: dominant |<i|gs>| within the declared
/// particle sector, falling back to the global maximum.
pub fn select_hf_state(ground: &Statevector, n_electrons: Option<u32>) -> BasisState {
    let best_in = |pred: &dyn Fn(usize) -> bool| -> Option<(usize, f64)> {
        ground
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| pred(*i))
            .map(|(i, a)| (i, a.norm()))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(b.0.cmp(&a.0)))
    };
    if let Some(k) = n_electrons {
        if let Some((idx, weight)) = best_in(&|i: usize| (i as u64).count_ones() == k) {
            if weight > 0.0 {
                return BasisState(idx as u64);
            }
        }
    }
    let (idx, _) = best_in(&|_| true).expect("statevector is non-empty");
    BasisState(idx as u64)
}

fn real_cross_elements(
    hamiltonian: &PauliSum,
    i0: BasisState,
) -> Result<BTreeMap<BasisState, f64>> {
    let mut out = BTreeMap::new();
    for (state, value) in connected_matrix_elements(hamiltonian, i0) {
        if value.im.abs() > REALNESS_TOL * (1.0 + value.re.abs()) {
            return Err(Error::Numerical(format!(
                "complex cross term <{}|H|{}> = {}; real-part estimation does not apply",
                state, i0, value
            )));
        }
        out.insert(state, value.re);
    }
    Ok(out)
}

/// Run the full cost analysis for one Hamiltonian.
pub fn run_pipeline(hamiltonian: &PauliSum, options: &AnalysisOptions) -> Result<Pipeline> {
    let (stripped, identity_shift) = hamiltonian.split_identity();
    let ground = exact_ground_state_with_cap(hamiltonian, options.qubit_cap)?;
    if ground.degenerate {
        return Err(Error::DegenerateGroundState { gap: ground.gap });
    }
    let i0 = options
        .hf_state
        .unwrap_or_else(|| select_hf_state(&ground.state, hamiltonian.n_electrons));
    if i0.0 as usize >= hamiltonian.dim() {
        return Err(Error::InvalidArgument(format!(
            "boosting state {} out of range for {} qubits",
            i0.0, hamiltonian.n_qubits
        )));
    }

    let groups = greedy_grouping(&stripped);
    let cross = real_cross_elements(&stripped, i0)?;
    let shifted_energy = ground.energy - identity_shift;
    let k_vqe = k_factor_conventional_vqe(&stripped, &ground.state, &groups)?;

    match deflate_quantum_state(&ground.state, i0)? {
        Deflation::ClassicallySolved => {
            let k_factors = KFactors {
                k_hf: 0.0,
                k_vqe,
                k_prime: 0.0,
                alpha: 1.0,
                energy: ground.energy,
            };
            Ok(Pipeline {
                hamiltonian: hamiltonian.clone(),
                stripped,
                identity_shift,
                ground,
                i0,
                alpha: 1.0,
                phi_q: None,
                cross,
                overlaps: BTreeMap::new(),
                groups,
                problem: None,
                k_factors,
            })
        }
        Deflation::Boosted { alpha, phi_q } => {
            if phi_q.max_imag() > REALNESS_TOL {
                return Err(Error::Numerical(
                    "ground state is complex in the computational basis; \
                     real-part estimation does not apply"
                        .into(),
                ));
            }
            let observables = build_observables(&stripped, i0, &phi_q)?;
            let overlaps: BTreeMap<BasisState, f64> = observables
                .iter()
                .map(|(state, obs)| (*state, obs.true_value))
                .collect();
            let k_prime = k_prime_for_h22(&stripped, &phi_q, &groups)?;
            let k_hf = k_factor_hf_vqe(alpha, shifted_energy, &cross, &overlaps, k_prime, i0)?;
            let problem = build_two_state_problem(&stripped, i0, &phi_q)?;
            let k_factors = KFactors {
                k_hf,
                k_vqe,
                k_prime,
                alpha,
                energy: ground.energy,
            };
            Ok(Pipeline {
                hamiltonian: hamiltonian.clone(),
                stripped,
                identity_shift,
                ground,
                i0,
                alpha,
                phi_q: Some(phi_q),
                cross,
                overlaps,
                groups,
                problem: Some(problem),
                k_factors,
            })
        }
    }
}

impl Pipeline {
    /// The flat allocation channels of the boosted estimator.
    pub fn variance_terms(&self) -> Vec<crate::shots::VarianceTerm> {
        match &self.phi_q {
            Some(phi_q) => boosted_variance_terms(
                self.alpha,
                self.ground.energy - self.identity_shift,
                &self.cross,
                &self.overlaps,
                &self.stripped,
                phi_q,
                &self.groups,
                self.i0,
            ),
            None => Vec::new(),
        }
    }

    pub fn report(&self, options: &AnalysisOptions) -> Result<AnalysisReport> {
        let k = &self.k_factors;
        let m_vqe = shots_for_precision(k.k_vqe, options.epsilon)?;
        let m_hfvqe = shots_for_precision(k.k_hf, options.epsilon)?;
        let speedup = speedup(k.k_vqe, k.k_hf);
        let asymptotic = if self.alpha.abs() < 1.0 {
            asymptotic_speedup(self.alpha)?
        } else {
            f64::INFINITY
        };
        let overhead = GateCostModel::with_defaults(self.hamiltonian.n_qubits)
            .and_then(|m| crate::hadamard::controlled_overhead(&m))
            .unwrap_or(f64::NAN);
        Ok(AnalysisReport {
            label: self
                .hamiltonian
                .label
                .clone()
                .unwrap_or_else(|| "unlabeled".into()),
            n_qubits: self.hamiltonian.n_qubits,
            status: if self.phi_q.is_some() {
                AnalysisStatus::Boosted
            } else {
                AnalysisStatus::ClassicallySolved
            },
            hf_state: self.i0.to_bitstring(self.hamiltonian.n_qubits),
            alpha: self.alpha,
            e_exact: self.ground.energy,
            m_vqe,
            m_hfvqe,
            speedup,
            asymptotic_speedup: asymptotic,
            asymptotic_ratio: asymptotic_ratio(speedup, self.alpha),
            epsilon: options.epsilon,
            k_factors: k.clone(),
            n_terms: self.stripped.terms.len(),
            n_groups: self.groups.len(),
            controlled_overhead: overhead,
        })
    }
}

/// Convenience wrapper: pipeline + report in one call.
pub fn analyze(hamiltonian: &PauliSum, options: &AnalysisOptions) -> Result<AnalysisReport> {
    run_pipeline(hamiltonian, options)?.report(options)
}

#[derive(Debug, Clone)]
pub struct ValidationOptions {
    /// Total shots per replica, split over all channels.
    pub shots: u64,
    pub replicas: u64,
    pub seed: u64,
    pub qubit_cap: usize,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self {
            shots: 100_000,
            replicas: 10_000,
            seed: 2024,
            qubit_cap: DEFAULT_QUBIT_CAP,
        }
    }
}

/// Predicted-versus-empirical variance of one estimator.
#[derive(Debug, Clone, Serialize)]
pub struct VarianceCheck {
    pub label: String,
    pub shots: u64,
    pub predicted: f64,
    pub empirical: f64,
    /// Deviation in units of the variance estimator's standard error.
    pub z_score: f64,
    /// None when the replica count is too small to grade.
    pub pass: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationSummary {
    pub label: String,
    pub n_qubits: usize,
    pub alpha: f64,
    pub e_exact: f64,
    pub shots: u64,
    pub replicas: u64,
    pub seed: u64,
    /// Overlap estimators, graded at 3 standard errors.
    pub observable_checks: Vec<VarianceCheck>,
    /// The H22 estimator, graded at 3 standard errors.
    pub h22_check: Option<VarianceCheck>,
    /// Predicted K/M for the eigenvalue estimator.
    pub predicted_lambda_variance: f64,
    /// Monte Carlo variance of the re-solved eigenvalue.
    pub empirical_lambda_variance: f64,
    /// empirical / predicted; graded within 20%.
    pub lambda_ratio: f64,
    pub lambda_pass: Option<bool>,
    pub failed_replicas: u64,
    pub warnings: Vec<String>,
}

fn sample_variance(samples: &[f64]) -> f64 {
    let n = samples.len();
    if n < 2 {
        return 0.0;
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64
}

fn grade(predicted: f64, empirical: f64, replicas: u64) -> (f64, Option<bool>) {
    if replicas < MIN_REPLICAS_FOR_VERDICT {
        return (0.0, None);
    }
    if predicted == 0.0 {
        return (0.0, Some(empirical == 0.0));
    }
    // Near-normal estimators: SE(s^2) ~ sigma^2 sqrt(2/(R-1)).
    let se = predicted * (2.0 / (replicas as f64 - 1.0)).sqrt();
    let z = (empirical - predicted) / se;
    (z, Some(z.abs() <= 3.0))
}

/// Monte Carlo check of the variance model: re-sample every measurement
/// channel, re-solve the subspace problem per replica, and compare empirical
/// variances against the analytic predictions. Deterministic for a fixed
/// seed; replicas use per-replica ChaCha streams.
pub fn validate(hamiltonian: &PauliSum, options: &ValidationOptions) -> Result<ValidationSummary> {
    if hamiltonian.n_qubits > MAX_VALIDATION_QUBITS {
        return Err(Error::InvalidArgument(format!(
            "validation is limited to {MAX_VALIDATION_QUBITS} qubits (got {})",
            hamiltonian.n_qubits
        )));
    }
    let analysis_opts = AnalysisOptions {
        qubit_cap: options.qubit_cap,
        ..AnalysisOptions::default()
    };
    let pipeline = run_pipeline(hamiltonian, &analysis_opts)?;
    let mut warnings = Vec::new();

    let phi_q = match &pipeline.phi_q {
        Some(phi_q) => phi_q.clone(),
        None => {
            return Err(Error::Numerical(
                "ground state is a basis state; there is no sampling model to validate".into(),
            ))
        }
    };
    if options.replicas == 0 {
        return Err(Error::InvalidArgument(
            "replica count must be positive".into(),
        ));
    }
    if options.replicas < MIN_REPLICAS_FOR_VERDICT {
        warnings.push(format!(
            "insufficient replicas ({}) for pass/fail grading; reporting raw numbers only",
            options.replicas
        ));
    }

    let plan: ShotPlan = optimal_allocation(pipeline.variance_terms(), options.shots)?;
    let n_overlap = pipeline.overlaps.len();
    let overlap_channels: Vec<(BasisState, f64, u64)> = pipeline
        .overlaps
        .iter()
        .zip(&plan.terms)
        .map(|((&state, &y), term)| (state, y, term.shots))
        .collect();
    let group_channels: Vec<(Vec<usize>, u64)> = pipeline
        .groups
        .iter()
        .cloned()
        .zip(plan.terms[n_overlap..].iter().map(|t| t.shots))
        .collect();

    // Exact per-term means for the H22 sampler.
    let term_means: Vec<f64> = pipeline
        .stripped
        .terms
        .iter()
        .map(|t| pauli_expectation(t, &phi_q))
        .collect();

    let h11 = pipeline.cross.get(&pipeline.i0).copied().unwrap_or(0.0);
    let cross_vec: Vec<(BasisState, f64)> = pipeline.cross.iter().map(|(&s, &v)| (s, v)).collect();

    let mut lambda_samples = Vec::with_capacity(options.replicas as usize);
    let mut h22_samples = Vec::with_capacity(options.replicas as usize);
    let mut y_samples: Vec<Vec<f64>> =
        vec![Vec::with_capacity(options.replicas as usize); overlap_channels.len()];
    let mut failed_replicas = 0u64;

    for replica in 0..options.replicas {
        let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
        rng.set_stream(replica + 1);

        let mut y_hat = BTreeMap::new();
        for (idx, &(state, y, shots)) in overlap_channels.iter().enumerate() {
            let sample = if shots == 0 {
                y
            } else {
                sample_estimator_with(y, shots, &mut rng).0
            };
            y_samples[idx].push(sample);
            y_hat.insert(state, sample);
        }

        let mut h22_hat = 0.0;
        for (group, shots) in &group_channels {
            for &term_idx in group {
                let mean = term_means[term_idx];
                let sampled = if *shots == 0 {
                    mean
                } else {
                    sample_estimator_with(mean, *shots, &mut rng).0
                };
                h22_hat += pipeline.stripped.terms[term_idx].coefficient.re * sampled;
            }
        }
        h22_samples.push(h22_hat);

        let h12: f64 = cross_vec
            .iter()
            .map(|&(state, elem)| y_hat.get(&state).copied().unwrap_or(0.0) * elem)
            .sum();
        let s12 = y_hat.get(&pipeline.i0).copied().unwrap_or(0.0);
        let h_bar = DMatrix::from_row_slice(2, 2, &[h11, h12, h12, h22_hat]);
        let s_bar = DMatrix::from_row_slice(2, 2, &[1.0, s12, s12, 1.0]);
        match SubspaceProblem::new(
            h_bar,
            s_bar,
            vec![
                crate::subspace::StateLabel::Classical,
                crate::subspace::StateLabel::Quantum,
            ],
        )
        .and_then(|p| solve_real_gevp(&p))
        {
            Ok(sol) => lambda_samples.push(sol.eigenvalues[0]),
            Err(_) => failed_replicas += 1,
        }
    }
    if failed_replicas > 0 {
        warnings.push(format!(
            "{failed_replicas} replicas produced an unsolvable subspace problem and were skipped"
        ));
    }

    let observable_checks: Vec<VarianceCheck> = overlap_channels
        .iter()
        .enumerate()
        .map(|(idx, &(state, y, shots))| {
            let predicted = if shots == 0 {
                0.0
            } else {
                (1.0 - (y * y).min(1.0)) / shots as f64
            };
            let empirical = sample_variance(&y_samples[idx]);
            let (z_score, pass) = grade(predicted, empirical, options.replicas);
            VarianceCheck {
                label: format!("y[{}]", state.to_bitstring(pipeline.hamiltonian.n_qubits)),
                shots,
                predicted,
                empirical,
                z_score,
                pass,
            }
        })
        .collect();

    let h22_predicted: f64 = group_channels
        .iter()
        .zip(plan.terms[n_overlap..].iter())
        .map(|((_, shots), term)| {
            if *shots == 0 {
                0.0
            } else {
                term.sigma_sq / *shots as f64
            }
        })
        .sum();
    let h22_empirical = sample_variance(&h22_samples);
    let (h22_z, h22_pass) = grade(h22_predicted, h22_empirical, options.replicas);
    let h22_shots: u64 = group_channels.iter().map(|(_, m)| m).sum();
    let h22_check = Some(VarianceCheck {
        label: "H22".into(),
        shots: h22_shots,
        predicted: h22_predicted,
        empirical: h22_empirical,
        z_score: h22_z,
        pass: h22_pass,
    });

    let predicted_lambda_variance = pipeline.k_factors.k_hf / options.shots as f64;
    let empirical_lambda_variance = sample_variance(&lambda_samples);
    let lambda_ratio = if predicted_lambda_variance > 0.0 {
        empirical_lambda_variance / predicted_lambda_variance
    } else {
        f64::NAN
    };
    let lambda_pass = if options.replicas < MIN_REPLICAS_FOR_VERDICT {
        None
    } else {
        Some((lambda_ratio - 1.0).abs() <= 0.2)
    };

    Ok(ValidationSummary {
        label: pipeline
            .hamiltonian
            .label
            .clone()
            .unwrap_or_else(|| "unlabeled".into()),
        n_qubits: pipeline.hamiltonian.n_qubits,
        alpha: pipeline.alpha,
        e_exact: pipeline.ground.energy,
        shots: options.shots,
        replicas: options.replicas,
        seed: options.seed,
        observable_checks,
        h22_check,
        predicted_lambda_variance,
        empirical_lambda_variance,
        lambda_ratio,
        lambda_pass,
        failed_replicas,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{PauliOp, PauliTerm};
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    fn polarized_two_qubit() -> PauliSum {
        // Dominant |00> ground state with a little X mixing.
        PauliSum::new(
            2,
            vec![
                PauliTerm::from_ops(&[(0, PauliOp::Z)], 0.9),
                PauliTerm::from_ops(&[(1, PauliOp::Z)], 0.7),
                PauliTerm::from_ops(&[(0, PauliOp::Z), (1, PauliOp::Z)], 0.4),
                PauliTerm::from_ops(&[(0, PauliOp::X)], 0.25),
                PauliTerm::from_ops(&[(0, PauliOp::X), (1, PauliOp::X)], 0.15),
            ],
        )
        .unwrap()
    }

    #[test]
    fn hf_state_selection_respects_sector() {
        let mut gs = crate::statevec::basis_statevector(BasisState(0), 2).unwrap();
        gs.amplitudes[0] = Complex64::new(0.8, 0.0);
        gs.amplitudes[1] = Complex64::new(0.5, 0.0);
        gs.amplitudes[2] = Complex64::new(0.33, 0.0);
        let gs = gs.normalized();
        // Global max is |00>, but the one-electron sector peaks at |01>.
        assert_eq!(select_hf_state(&gs, None), BasisState(0));
        assert_eq!(select_hf_state(&gs, Some(1)), BasisState(1));
    }

    #[test]
    fn pipeline_reproduces_exact_energy() {
        let h = polarized_two_qubit();
        let pipeline = run_pipeline(&h, &AnalysisOptions::default()).unwrap();
        let problem = pipeline.problem.as_ref().unwrap();
        let sol = solve_real_gevp(problem).unwrap();
        assert_abs_diff_eq!(
            sol.eigenvalues[0] + pipeline.identity_shift,
            pipeline.ground.energy,
            epsilon = 1e-10
        );
        // Ground weights are (alpha, sqrt(1 - alpha^2)) up to sign convention.
        let v = sol.ground_vector();
        assert_abs_diff_eq!(v[0].abs(), pipeline.alpha, epsilon = 1e-9);
        assert_abs_diff_eq!(
            v[1].abs(),
            (1.0 - pipeline.alpha * pipeline.alpha).sqrt(),
            epsilon = 1e-9
        );
    }

    #[test]
    fn classically_solved_diagonal_hamiltonian() {
        let h = PauliSum::new(
            2,
            vec![
                PauliTerm::from_ops(&[(0, PauliOp::Z)], 1.0),
                PauliTerm::from_ops(&[(1, PauliOp::Z)], 0.5),
            ],
        )
        .unwrap();
        let report = analyze(&h, &AnalysisOptions::default()).unwrap();
        assert_eq!(report.status, AnalysisStatus::ClassicallySolved);
        assert_eq!(report.m_hfvqe, 0);
        assert_eq!(report.alpha, 1.0);
        assert!(report.speedup.is_infinite());
    }

    #[test]
    fn degenerate_ground_state_is_refused() {
        // Z0 Z1 has a doubly-degenerate ground space.
        let h = PauliSum::new(
            2,
            vec![PauliTerm::from_ops(
                &[(0, PauliOp::Z), (1, PauliOp::Z)],
                1.0,
            )],
        )
        .unwrap();
        let err = analyze(&h, &AnalysisOptions::default()).unwrap_err();
        assert!(matches!(err, Error::DegenerateGroundState { .. }));
    }

    #[test]
    fn report_columns_are_consistent() {
        let h = polarized_two_qubit();
        let report = analyze(&h, &AnalysisOptions::default()).unwrap();
        assert_eq!(report.status, AnalysisStatus::Boosted);
        assert!(report.speedup > 0.0);
        assert_abs_diff_eq!(
            report.asymptotic_ratio,
            report.speedup * (1.0 - report.alpha * report.alpha).powi(2),
            epsilon = 1e-12
        );
        // Plugging the shot counts back predicts variance within precision.
        assert!(
            report.k_factors.k_hf / report.m_hfvqe as f64 <= report.epsilon.powi(2) * (1.0 + 1e-9)
        );
        assert!(
            report.k_factors.k_vqe / report.m_vqe as f64 <= report.epsilon.powi(2) * (1.0 + 1e-9)
        );
    }

    #[test]
    fn validation_refuses_large_systems() {
        let mut terms = Vec::new();
        for q in 0..13 {
            terms.push(PauliTerm::from_ops(
                &[(q, PauliOp::Z)],
                1.0 + q as f64 * 0.1,
            ));
        }
        terms.push(PauliTerm::from_ops(&[(0, PauliOp::X)], 0.2));
        let h = PauliSum::new(13, terms).unwrap();
        let err = validate(&h, &ValidationOptions::default()).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
    }

    #[test]
    fn validation_with_few_replicas_warns_without_verdict() {
        let h = polarized_two_qubit();
        let summary = validate(
            &h,
            &ValidationOptions {
                shots: 1000,
                replicas: 1,
                seed: 7,
                ..ValidationOptions::default()
            },
        )
        .unwrap();
        assert!(summary.lambda_pass.is_none());
        assert!(summary
            .warnings
            .iter()
            .any(|w| w.contains("insufficient replicas")));
    }
}
