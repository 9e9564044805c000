//! Fermionic ladder-operator strings and the Jordan–Wigner map.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{PauliSum, PauliTerm, Phase};

/// One ladder operator: `a†_index` when `dagger`, else `a_index`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Ladder {
    pub index: usize,
    pub dagger: bool,
}

impl Ladder {
    pub fn create(index: usize) -> Self {
        Self { index, dagger: true }
    }

    pub fn annihilate(index: usize) -> Self {
        Self {
            index,
            dagger: false,
        }
    }
}

/// Linear combination of ordered ladder-operator products.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FermionOp {
    pub terms: Vec<(Complex64, Vec<Ladder>)>,
}

impl FermionOp {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, coeff: Complex64, ladders: Vec<Ladder>) {
        self.terms.push((coeff, ladders));
    }

    pub fn max_index(&self) -> Option<usize> {
        self.terms
            .iter()
            .flat_map(|(_, ls)| ls.iter().map(|l| l.index))
            .max()
    }
}

/// `a_q ↦ ½(X_q + iY_q)·Z_{q-1}···Z_0`, `a†_q ↦ ½(X_q − iY_q)·Z_{q-1}···Z_0`.
pub fn ladder_to_pauli(ladder: Ladder, n_qubits: usize) -> Result<PauliSum> {
    let q = ladder.index;
    if q >= n_qubits {
        return Err(Error::IndexOutOfRange {
            index: q,
            limit: n_qubits,
        });
    }
    let string = (1u64 << q) - 1;
    let x = PauliTerm::new(n_qubits, 1 << q, string, Phase::ONE)?;
    let y = PauliTerm::new(n_qubits, 1 << q, string | 1 << q, Phase::ONE)?;
    let half = Complex64::new(0.5, 0.0);
    let y_coeff = Complex64::new(0.0, if ladder.dagger { -0.5 } else { 0.5 });
    PauliSum::from_terms(n_qubits, [(half, x), (y_coeff, y)])
}

pub fn jordan_wigner(op: &FermionOp, n_qubits: usize) -> Result<PauliSum> {
    if let Some(m) = op.max_index() {
        if m >= n_qubits {
            return Err(Error::IndexOutOfRange {
                index: m,
                limit: n_qubits,
            });
        }
    }
    let ladders: Vec<PauliSum> = (0..n_qubits)
        .flat_map(|q| [Ladder::annihilate(q), Ladder::create(q)])
        .map(|l| ladder_to_pauli(l, n_qubits))
        .collect::<Result<_>>()?;
    let lookup = |l: &Ladder| &ladders[2 * l.index + usize::from(l.dagger)];

    let mut pieces = Vec::new();
    for (coeff, string) in &op.terms {
        let mut acc = PauliSum::constant(n_qubits, 1.0)?;
        for l in string {
            acc = acc.mul(lookup(l))?;
            if acc.is_empty() {
                break;
            }
        }
        pieces.extend(acc.terms().iter().map(|&(c, t)| (c * coeff, t)));
    }
    PauliSum::from_terms(n_qubits, pieces)
}
