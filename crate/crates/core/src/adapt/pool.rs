use crate::error::{Error, Result};
use crate::pauli::PauliTerm;

/// Ordered list of Hermitian Pauli generators for ansatz growth.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorPool {
    n_qubits: usize,
    terms: Vec<PauliTerm>,
}

impl OperatorPool {
    /// Wraps an explicit list; every term must carry phase `+1` and act on
    /// `n_qubits`.
    pub fn from_terms(n_qubits: usize, terms: Vec<PauliTerm>) -> Result<Self> {
        for t in &terms {
            if t.n_qubits() != n_qubits {
                return Err(Error::QubitMismatch {
                    left: n_qubits,
                    right: t.n_qubits(),
                });
            }
            if t.phase() != crate::pauli::Phase::ONE {
                return Err(Error::NonUnitPhase(t.to_string()));
            }
        }
        Ok(Self { n_qubits, terms })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&PauliTerm> {
        self.terms.get(index)
    }

    pub fn labels(&self) -> Vec<String> {
        self.terms.iter().map(PauliTerm::label).collect()
    }
}

const FOUR_QUBIT_PATTERNS: [[char; 4]; 4] = [
    ['X', 'X', 'X', 'Y'],
    ['X', 'X', 'Y', 'X'],
    ['X', 'Y', 'X', 'X'],
    ['Y', 'X', 'X', 'X'],
];

/// Spin-adapted qubit pool: same-spin `X Y` pairs, then four-qubit
/// `XXXY`-type strings over index quadruples with even sum.
pub fn build_pool(n_qubits: usize) -> Result<OperatorPool> {
    if !n_qubits.is_multiple_of(2) || !(4..=64).contains(&n_qubits) {
        return Err(Error::InvalidQubitCount(n_qubits));
    }
    let m = n_qubits / 2;
    let mut terms = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            for s in 0..2 {
                terms.push(PauliTerm::from_factors(n_qubits, &[(2 * i + s, 'X'), (2 * j + s, 'Y')])?);
            }
        }
    }
    for p in 0..n_qubits {
        for q in p + 1..n_qubits {
            for r in q + 1..n_qubits {
                for s in r + 1..n_qubits {
                    if (p + q + r + s) % 2 != 0 {
                        continue;
                    }
                    for pat in FOUR_QUBIT_PATTERNS {
                        let f = [(p, pat[0]), (q, pat[1]), (r, pat[2]), (s, pat[3])];
                        terms.push(PauliTerm::from_factors(n_qubits, &f)?);
                    }
                }
            }
        }
    }
    Ok(OperatorPool { n_qubits, terms })
}
