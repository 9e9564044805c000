//! JSON qubit-Hamiltonian files.
//!
//! ```json
//! {
//!   "metadata": {"n_qubits": 4, "n_electrons": 2, "sz_doubled": 0, "reference_cfg": 3},
//!   "terms": [
//!     {"coefficient": -0.5, "pauli": ""},
//!     {"coefficient": 0.25, "pauli": "X0 Y1 Y2 X3"},
//!     {"coefficient": [0.0, 0.5], "pauli": "Z0"}
//!   ]
//! }
//! ```
//!
//! Coefficients are a number or a `[re, im]` pair. Repeated strings are summed.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::molecule::MolecularSystem;
use crate::error::{Error, Result};
use crate::pauli::{Config, PauliSum, PauliTerm};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Metadata {
    pub n_qubits: usize,
    pub n_electrons: usize,
    pub sz_doubled: i32,
    pub reference_cfg: Config,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Real(f64),
    Complex([f64; 2]),
}

impl From<Coefficient> for Complex64 {
    fn from(c: Coefficient) -> Self {
        match c {
            Coefficient::Real(re) => Complex64::new(re, 0.0),
            Coefficient::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

impl From<Complex64> for Coefficient {
    fn from(c: Complex64) -> Self {
        if c.im == 0.0 {
            Coefficient::Real(c.re)
        } else {
            Coefficient::Complex([c.re, c.im])
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermRecord {
    pub coefficient: Coefficient,
    pub pauli: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QubitHamiltonianFile {
    pub metadata: Metadata,
    pub terms: Vec<TermRecord>,
}

pub fn parse_qubit_hamiltonian_str(text: &str) -> Result<MolecularSystem> {
    let file: QubitHamiltonianFile = serde_json::from_str(text)?;
    let n = file.metadata.n_qubits;
    let terms = file
        .terms
        .iter()
        .enumerate()
        .map(|(k, rec)| {
            PauliTerm::parse_label(n, &rec.pauli)
                .map(|t| (Complex64::from(rec.coefficient), t))
                .map_err(|e| Error::Parse {
                    line: k + 1,
                    msg: format!("term {}: {e}", k + 1),
                })
        })
        .collect::<Result<Vec<_>>>()?;
    let h = PauliSum::from_terms(n, terms)?;
    MolecularSystem::new(
        h,
        file.metadata.n_electrons,
        file.metadata.sz_doubled,
        file.metadata.reference_cfg,
    )
}

pub fn parse_qubit_hamiltonian(path: impl AsRef<Path>) -> Result<MolecularSystem> {
    parse_qubit_hamiltonian_str(&std::fs::read_to_string(path)?)
}

pub fn to_qubit_file(system: &MolecularSystem) -> QubitHamiltonianFile {
    QubitHamiltonianFile {
        metadata: Metadata {
            n_qubits: system.n_qubits(),
            n_electrons: system.n_electrons(),
            sz_doubled: system.sz_doubled(),
            reference_cfg: system.reference_cfg(),
        },
        terms: system
            .hamiltonian()
            .terms()
            .iter()
            .map(|&(c, t)| TermRecord {
                coefficient: c.into(),
                pauli: if t.is_identity() { String::new() } else { t.label() },
            })
            .collect(),
    }
}

pub fn serialize_qubit_hamiltonian(system: &MolecularSystem) -> Result<String> {
    Ok(serde_json::to_string_pretty(&to_qubit_file(system))?)
}
