use serde::Serialize;

use crate::error::{Error, Result};
use crate::pauli::{Config, PauliTerm, Phase};

/// One `e^{iθP}` gate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RotationGate {
    pub pauli: PauliTerm,
    pub angle: f64,
}

impl Serialize for RotationGate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("RotationGate", 2)?;
        st.serialize_field("pauli", &self.pauli.label())?;
        st.serialize_field("angle", &self.angle)?;
        st.end()
    }
}

/// `|Φ⟩ = e^{iθ_{m-1}P_{m-1}} ··· e^{iθ_0 P_0} |reference⟩`; gates apply in
/// list order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnsatzProgram {
    n_qubits: usize,
    reference_cfg: Config,
    gates: Vec<RotationGate>,
}

impl AnsatzProgram {
    pub fn new(n_qubits: usize, reference_cfg: Config) -> Result<Self> {
        if n_qubits == 0 || n_qubits > 64 {
            return Err(Error::InvalidQubitCount(n_qubits));
        }
        if n_qubits < 64 && reference_cfg >> n_qubits != 0 {
            return Err(Error::ConfigOutOfRange {
                cfg: reference_cfg,
                n_qubits,
            });
        }
        Ok(Self {
            n_qubits,
            reference_cfg,
            gates: Vec::new(),
        })
    }

    pub fn push(&mut self, pauli: PauliTerm, angle: f64) -> Result<()> {
        if pauli.n_qubits() != self.n_qubits {
            return Err(Error::QubitMismatch {
                left: self.n_qubits,
                right: pauli.n_qubits(),
            });
        }
        if pauli.phase() != Phase::ONE {
            return Err(Error::NonUnitPhase(pauli.phase().to_string()));
        }
        if pauli.weight() == 0 {
            return Err(Error::InvalidArgument("identity rotation gate".into()));
        }
        if !angle.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite angle {angle}")));
        }
        self.gates.push(RotationGate { pauli, angle });
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn reference_cfg(&self) -> Config {
        self.reference_cfg
    }

    pub fn gates(&self) -> &[RotationGate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// `U U† U` (`factor == 3`) or `U` (`factor == 1`) as a flat gate list.
    pub fn folded_gates(&self, factor: u32) -> Result<Vec<RotationGate>> {
        match factor {
            1 => Ok(self.gates.clone()),
            3 => {
                let inverse = self.gates.iter().rev().map(|g| RotationGate {
                    pauli: g.pauli,
                    angle: -g.angle,
                });
                Ok(self
                    .gates
                    .iter()
                    .copied()
                    .chain(inverse)
                    .chain(self.gates.iter().copied())
                    .collect())
            }
            other => Err(Error::InvalidArgument(format!(
                "fold factor must be 1 or 3, got {other}"
            ))),
        }
    }

    /// Appends `other`'s gates; both must share the reference.
    pub fn concat(&self, other: &AnsatzProgram) -> Result<AnsatzProgram> {
        if other.n_qubits != self.n_qubits || other.reference_cfg != self.reference_cfg {
            return Err(Error::Inconsistent("programs do not share a reference".into()));
        }
        let mut out = self.clone();
        out.gates.extend_from_slice(&other.gates);
        Ok(out)
    }
}
