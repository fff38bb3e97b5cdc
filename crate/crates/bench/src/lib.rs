//! Benchmark-only crate; see benches/pipeline.rs.

use std::path::Path;

use cbvqe_core::pauli::PauliSum;

pub fn load_fixture(name: &str) -> PauliSum {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name);
    PauliSum::parse_hamiltonian(&std::fs::read_to_string(path).expect("fixture readable"))
        .expect("fixture parses")
}
