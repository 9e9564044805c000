use num_complex::Complex64;

use super::program::AnsatzProgram;
use crate::error::{Error, Result};
use crate::pauli::{Config, PauliSum, PauliTerm, Phase, SparseStateVec, NORM_TOL};

/// Largest register the dense statevector accepts.
pub const STATEVECTOR_GUARD: usize = 26;

/// Dense pure state over `2ⁿ` amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

fn check_size(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 {
        return Err(Error::InvalidQubitCount(0));
    }
    if n_qubits > STATEVECTOR_GUARD {
        return Err(Error::GuardExceeded {
            what: "statevector register",
            size: n_qubits,
            limit: STATEVECTOR_GUARD,
        });
    }
    Ok(())
}

impl StateVector {
    pub fn basis(n_qubits: usize, cfg: Config) -> Result<Self> {
        check_size(n_qubits)?;
        let dim = 1usize << n_qubits;
        if cfg as usize >= dim {
            return Err(Error::ConfigOutOfRange { cfg, n_qubits });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[cfg as usize] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_size(n_qubits)?;
        if amps.len() != 1 << n_qubits {
            return Err(Error::InvalidArgument(format!(
                "{} amplitudes for {n_qubits} qubits",
                amps.len()
            )));
        }
        let state = Self { n_qubits, amps };
        let n2 = state.norm_sqr();
        if (n2 - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(n2));
        }
        Ok(state)
    }

    pub fn from_sparse(v: &SparseStateVec) -> Result<Self> {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << v.n_qubits()];
        for (cfg, a) in v.iter() {
            amps[cfg as usize] = a;
        }
        Self::from_amplitudes(v.n_qubits(), amps)
    }

    /// Runs `program` noiselessly from its reference configuration.
    pub fn prepare(program: &AnsatzProgram) -> Result<Self> {
        let mut state = Self::basis(program.n_qubits(), program.reference_cfg())?;
        for g in program.gates() {
            state.apply_pauli_rotation(&g.pauli, g.angle)?;
        }
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Entries with `|α|² > cutoff`.
    pub fn to_sparse(&self, cutoff: f64) -> SparseStateVec {
        SparseStateVec::new(
            self.n_qubits,
            self.amps
                .iter()
                .enumerate()
                .filter(|(_, a)| a.norm_sqr() > cutoff)
                .map(|(k, &a)| (k as Config, a)),
        )
        .expect("indices are in range")
    }

    fn check_term(&self, p: &PauliTerm) -> Result<()> {
        if p.n_qubits() != self.n_qubits {
            return Err(Error::QubitMismatch {
                left: self.n_qubits,
                right: p.n_qubits(),
            });
        }
        Ok(())
    }

    /// `|ψ⟩ ← (cos θ + i sin θ P)|ψ⟩ = e^{iθP}|ψ⟩`, one pass over the vector.
    pub fn apply_pauli_rotation(&mut self, p: &PauliTerm, theta: f64) -> Result<()> {
        self.check_term(p)?;
        if p.phase() != Phase::ONE {
            return Err(Error::NonUnitPhase(p.phase().to_string()));
        }
        rotate_in_place(&mut self.amps, p, theta);
        Ok(())
    }

    /// `P|ψ⟩` (any phase).
    pub fn apply_pauli(&self, p: &PauliTerm) -> Result<StateVector> {
        self.check_term(p)?;
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (b, &a) in self.amps.iter().enumerate() {
            let (img, ph) = p.act(b as Config);
            out[img as usize] = ph.apply(a);
        }
        Ok(StateVector {
            n_qubits: self.n_qubits,
            amps: out,
        })
    }

    /// `H|ψ⟩` as a raw amplitude vector (not normalized).
    pub fn apply_sum(&self, h: &PauliSum) -> Result<Vec<Complex64>> {
        if h.n_qubits() != self.n_qubits {
            return Err(Error::QubitMismatch {
                left: self.n_qubits,
                right: h.n_qubits(),
            });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for &(c, t) in h.terms() {
            for (b, &a) in self.amps.iter().enumerate() {
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let (img, ph) = t.act(b as Config);
                out[img as usize] += ph.apply(c * a);
            }
        }
        Ok(out)
    }

    /// `⟨self|H|other⟩`.
    pub fn transition(&self, h: &PauliSum, other: &StateVector) -> Result<Complex64> {
        let hv = other.apply_sum(h)?;
        Ok(self.amps.iter().zip(&hv).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// `⟨ψ|H|ψ⟩` for Hermitian `H`.
    pub fn expectation(&self, h: &PauliSum) -> Result<f64> {
        h.require_hermitian()?;
        let z = self.transition(h, self)?;
        let scale = h.terms().iter().map(|(c, _)| c.norm()).sum::<f64>().max(1.0);
        if z.im.abs() > 1e-9 * scale {
            return Err(Error::NotHermitian(z.im.abs()));
        }
        Ok(z.re)
    }
}

/// Diagonal factor `s` in `P|b⟩ = s|b ^ x⟩`.
#[inline]
pub(crate) fn rotate_in_place(amps: &mut [Complex64], p: &PauliTerm, theta: f64) {
    let (s, c) = theta.sin_cos();
    let x = p.x_mask() as usize;
    let is = Complex64::new(0.0, s);
    if x == 0 {
        for (b, a) in amps.iter_mut().enumerate() {
            let (_, ph) = p.act(b as Config);
            *a = *a * c + ph.apply(is * *a);
        }
        return;
    }
    let low = x & x.wrapping_neg();
    for b in 0..amps.len() {
        if b & low != 0 {
            continue;
        }
        let b2 = b ^ x;
        let (_, s_b) = p.act(b as Config);
        let (_, s_b2) = p.act(b2 as Config);
        let (a, a2) = (amps[b], amps[b2]);
        amps[b2] = a2 * c + s_b.apply(is * a);
        amps[b] = a * c + s_b2.apply(is * a2);
    }
}
