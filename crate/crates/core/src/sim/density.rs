use num_complex::Complex64;
use rand::Rng;

use super::program::AnsatzProgram;
use super::sampling::{apply_readout_flips, sample_distribution, SampleTable};
use super::statevector::StateVector;
use crate::error::{Error, Result};
use crate::mitigation::NoiseModel;
use crate::pauli::{Config, PauliTerm};

/// Largest register simulated as a dense density matrix.
pub const DENSITY_GUARD: usize = 12;

/// Diagonal entries below `-NEGATIVE_DIAG_TOL` indicate a corrupted state.
pub const NEGATIVE_DIAG_TOL: f64 = 1e-9;

/// Dense `2ⁿ × 2ⁿ` density matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    dim: usize,
    data: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn basis(n_qubits: usize, cfg: Config) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidQubitCount(0));
        }
        if n_qubits > DENSITY_GUARD {
            return Err(Error::GuardExceeded {
                what: "density-matrix register",
                size: n_qubits,
                limit: DENSITY_GUARD,
            });
        }
        let dim = 1usize << n_qubits;
        if cfg as usize >= dim {
            return Err(Error::ConfigOutOfRange { cfg, n_qubits });
        }
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        data[cfg as usize * dim + cfg as usize] = Complex64::new(1.0, 0.0);
        Ok(Self {
            n_qubits,
            dim,
            data,
        })
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn from_pure(state: &StateVector) -> Result<Self> {
        let mut rho = Self::basis(state.n_qubits(), 0)?;
        let a = state.amplitudes();
        for i in 0..rho.dim {
            for j in 0..rho.dim {
                rho.data[i * rho.dim + j] = a[i] * a[j].conj();
            }
        }
        Ok(rho)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// `max |ρ_ij − conj(ρ_ji)|`.
    pub fn hermiticity_residue(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Real parts of the diagonal.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i).re).collect()
    }

    pub fn frobenius_distance(&self, other: &DensityMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `ρ ← e^{iθP} ρ e^{-iθP}`.
    pub fn apply_pauli_rotation(&mut self, p: &PauliTerm, theta: f64) -> Result<()> {
        if p.n_qubits() != self.n_qubits {
            return Err(Error::QubitMismatch {
                left: self.n_qubits,
                right: p.n_qubits(),
            });
        }
        if p.phase() != crate::pauli::Phase::ONE {
            return Err(Error::NonUnitPhase(p.phase().to_string()));
        }
        let dim = self.dim;
        let (s, c) = theta.sin_cos();
        let is = Complex64::new(0.0, s);
        let x = p.x_mask() as usize;

        // left: rows b and b^x mix
        if x == 0 {
            for b in 0..dim {
                let f = c + p.act(b as Config).1.apply(is);
                for v in &mut self.data[b * dim..(b + 1) * dim] {
                    *v *= f;
                }
            }
        } else {
            let low = x & x.wrapping_neg();
            for b in 0..dim {
                if b & low != 0 {
                    continue;
                }
                let b2 = b ^ x;
                let fb = p.act(b as Config).1.apply(is);
                let fb2 = p.act(b2 as Config).1.apply(is);
                let (lo, hi) = if b < b2 { (b, b2) } else { (b2, b) };
                let (head, tail) = self.data.split_at_mut(hi * dim);
                let row_lo = &mut head[lo * dim..(lo + 1) * dim];
                let row_hi = &mut tail[..dim];
                let (row_b, row_b2) = if b < b2 { (row_lo, row_hi) } else { (row_hi, row_lo) };
                for (vb, vb2) in row_b.iter_mut().zip(row_b2.iter_mut()) {
                    let (a, a2) = (*vb, *vb2);
                    *vb2 = a2 * c + fb * a;
                    *vb = a * c + fb2 * a2;
                }
            }
        }

        // right: (ρU†)_{ij} = c ρ_ij − i s conj(s_{j^x}) ρ_{i, j^x}
        let minus_is = -is;
        let factors: Vec<Complex64> = (0..dim)
            .map(|k| p.act(k as Config).1.conj().apply(minus_is))
            .collect();
        for row in self.data.chunks_exact_mut(dim) {
            if x == 0 {
                for (k, v) in row.iter_mut().enumerate() {
                    *v = *v * c + factors[k] * *v;
                }
            } else {
                let low = x & x.wrapping_neg();
                for j in 0..dim {
                    if j & low != 0 {
                        continue;
                    }
                    let j2 = j ^ x;
                    let (a, a2) = (row[j], row[j2]);
                    row[j2] = a2 * c + factors[j] * a;
                    row[j] = a * c + factors[j2] * a2;
                }
            }
        }
        Ok(())
    }

    /// Single-qubit depolarizing channel
    /// `ρ ↦ (1−p)ρ + (p/3)(XρX + YρY + ZρZ)` on `qubit`.
    ///
    /// Elementwise, with `a`, `b` the row/column bits on `qubit`: entries with
    /// `a == b` become `(1 − 2p/3)ρ_ij + (2p/3)ρ_{ī j̄}`, entries with `a != b`
    /// are scaled by `1 − 4p/3`.
    pub fn depolarize(&mut self, qubit: usize, p: f64) -> Result<()> {
        if qubit >= self.n_qubits {
            return Err(Error::IndexOutOfRange {
                index: qubit,
                limit: self.n_qubits,
            });
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("depolarizing probability {p}")));
        }
        if p == 0.0 {
            return Ok(());
        }
        let dim = self.dim;
        let m = 1usize << qubit;
        let keep = 1.0 - 2.0 * p / 3.0;
        let mix = 2.0 * p / 3.0;
        let off = 1.0 - 4.0 * p / 3.0;
        for i in (0..dim).filter(|i| i & m == 0) {
            for j in (0..dim).filter(|j| j & m == 0) {
                let (i1, j1) = (i | m, j | m);
                let d00 = self.data[i * dim + j];
                let d11 = self.data[i1 * dim + j1];
                self.data[i * dim + j] = d00 * keep + d11 * mix;
                self.data[i1 * dim + j1] = d11 * keep + d00 * mix;
                self.data[i * dim + j1] *= off;
                self.data[i1 * dim + j] *= off;
            }
        }
        Ok(())
    }
}

/// Prepares the program's state under the gate-noise model.
///
/// Starts from `|reference⟩⟨reference|`, runs `U` (`fold == 1`) or `U U† U`
/// (`fold == 3`), and after every rotation applies the depolarizing channel
/// to each qubit in the rotation's support with the weight-dependent
/// probability from [`NoiseModel::depolarizing_probability`].
pub fn run_noisy(program: &AnsatzProgram, noise: &NoiseModel, fold: u32) -> Result<DensityMatrix> {
    let mut rho = DensityMatrix::basis(program.n_qubits(), program.reference_cfg())?;
    for gate in program.folded_gates(fold)? {
        rho.apply_pauli_rotation(&gate.pauli, gate.angle)?;
        if let Some(p) = noise.depolarizing_probability(gate.pauli.weight())? {
            for q in gate.pauli.support() {
                rho.depolarize(q, p)?;
            }
        }
    }
    Ok(rho)
}

/// Samples `diag(ρ)` and passes each shot through independent bit flips with
/// probability `p_m`.
pub fn sample_noisy<R: Rng + ?Sized>(
    rho: &DensityMatrix,
    p_m: f64,
    shots: u64,
    rng: &mut R,
) -> Result<SampleTable> {
    let mut diag = rho.diagonal();
    for d in &mut diag {
        if *d < -NEGATIVE_DIAG_TOL {
            return Err(Error::NegativeProbability(*d));
        }
        *d = d.max(0.0);
    }
    let clean = sample_distribution(&diag, shots, rng)?;
    apply_readout_flips(&clean, rho.n_qubits(), p_m, rng)
}
