//! Property tests for the Pauli algebra and file format.

use num_complex::Complex64;
use proptest::prelude::*;

use cbvqe_core::pauli::{qubitwise_commute, BasisState, PauliSum, PauliTerm};

fn arb_term(n_qubits: usize) -> impl Strategy<Value = PauliTerm> {
    let mask = 0u64..(1u64 << n_qubits);
    (mask.clone(), mask)
        .prop_map(|(x_mask, z_mask)| PauliTerm::new(x_mask, z_mask, Complex64::new(1.0, 0.0)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// Pauli strings are involutions: applying the same unit-coefficient term
    /// twice returns the original basis state with phase product one.
    #[test]
    fn double_application_is_identity(
        term in arb_term(6),
        state in 0u64..64,
    ) {
        let (p1, mid) = term.apply_to_basis(BasisState(state));
        let (p2, back) = term.apply_to_basis(mid);
        prop_assert_eq!(back, BasisState(state));
        prop_assert!((p1 * p2 - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }

    /// The phase returned for a basis state always has unit magnitude.
    #[test]
    fn basis_phases_have_unit_magnitude(
        term in arb_term(6),
        state in 0u64..64,
    ) {
        let (phase, _) = term.apply_to_basis(BasisState(state));
        prop_assert!((phase.norm() - 1.0).abs() < 1e-14);
    }

    /// Qubitwise commutation is symmetric and implied by disjoint supports.
    #[test]
    fn commutation_is_symmetric(a in arb_term(6), b in arb_term(6)) {
        prop_assert_eq!(qubitwise_commute(&a, &b), qubitwise_commute(&b, &a));
        if (a.x_mask | a.z_mask) & (b.x_mask | b.z_mask) == 0 {
            prop_assert!(qubitwise_commute(&a, &b));
        }
    }

    /// The interchange format round-trips: rendering a canonical sum back to
    /// JSON and reparsing reproduces it exactly.
    #[test]
    fn interchange_format_round_trips(
        terms in proptest::collection::vec((arb_term(4), -2.0f64..2.0), 1..12),
    ) {
        let sum = PauliSum::new(
            4,
            terms
                .into_iter()
                .map(|(t, c)| PauliTerm::new(t.x_mask, t.z_mask, Complex64::new(c, 0.0)))
                .collect(),
        )
        .unwrap();
        let json = serde_json::json!({
            "n_qubits": 4,
            "terms": sum
                .terms
                .iter()
                .map(|t| serde_json::json!({"pauli": t.pauli_string(), "coeff": t.coefficient.re}))
                .collect::<Vec<_>>(),
        });
        let reparsed = PauliSum::parse_hamiltonian(&json.to_string()).unwrap();
        prop_assert_eq!(reparsed.terms, sum.terms);
    }
}
