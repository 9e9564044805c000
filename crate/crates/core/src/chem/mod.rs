//! Molecular Hamiltonian ingestion: FCIDUMP integrals through Jordan–Wigner,
//! or ready-made qubit Hamiltonians in JSON.

pub mod fcidump;
pub mod fermion;
pub mod molecule;
pub mod qubit_file;

use std::path::Path;

pub use fcidump::{parse_fcidump, read_fcidump, Integrals};
pub use fermion::{jordan_wigner, FermionOp, Ladder};
pub use molecule::{
    build_molecular_hamiltonian, reference_configuration, symmetry_of, MolecularSystem,
};
pub use qubit_file::{parse_qubit_hamiltonian, serialize_qubit_hamiltonian};

use crate::error::Result;

/// On-disk Hamiltonian formats.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HamiltonianFormat {
    Fcidump,
    QubitJson,
}

impl HamiltonianFormat {
    /// `.json` is a qubit Hamiltonian, anything else FCIDUMP.
    pub fn infer(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => HamiltonianFormat::QubitJson,
            _ => HamiltonianFormat::Fcidump,
        }
    }
}

pub fn load_system(path: impl AsRef<Path>, format: HamiltonianFormat) -> Result<MolecularSystem> {
    match format {
        HamiltonianFormat::Fcidump => MolecularSystem::from_fcidump(path),
        HamiltonianFormat::QubitJson => parse_qubit_hamiltonian(path),
    }
}
