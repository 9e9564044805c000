use std::path::Path;

use num_complex::Complex64;

use super::fcidump::{read_fcidump, Integrals};
use super::fermion::{jordan_wigner, FermionOp, Ladder};
use crate::error::{Error, Result};
use crate::pauli::{Config, PauliSum};

/// Qubit Hamiltonian plus the particle-number sector it is solved in.
///
/// Spin-orbitals are interleaved: MO `i` spin up is qubit `2i`, spin down
/// is qubit `2i + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct MolecularSystem {
    n_qubits: usize,
    hamiltonian: PauliSum,
    n_electrons: usize,
    sz_doubled: i32,
    reference_cfg: Config,
}

impl MolecularSystem {
    pub fn new(
        hamiltonian: PauliSum,
        n_electrons: usize,
        sz_doubled: i32,
        reference_cfg: Config,
    ) -> Result<Self> {
        let n_qubits = hamiltonian.n_qubits();
        if !n_qubits.is_multiple_of(2) {
            return Err(Error::Inconsistent(format!(
                "odd qubit count {n_qubits} for a spin-orbital Hamiltonian"
            )));
        }
        if n_qubits < 64 && reference_cfg >> n_qubits != 0 {
            return Err(Error::ConfigOutOfRange {
                cfg: reference_cfg,
                n_qubits,
            });
        }
        if symmetry_of(reference_cfg) != (n_electrons, sz_doubled) {
            return Err(Error::Inconsistent(format!(
                "reference configuration {reference_cfg:#b} is not in sector \
                 (N={n_electrons}, 2Sz={sz_doubled})"
            )));
        }
        hamiltonian.require_hermitian()?;
        Ok(Self {
            n_qubits,
            hamiltonian,
            n_electrons,
            sz_doubled,
            reference_cfg,
        })
    }

    pub fn from_fcidump(path: impl AsRef<Path>) -> Result<Self> {
        build_molecular_hamiltonian(&read_fcidump(path)?)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn hamiltonian(&self) -> &PauliSum {
        &self.hamiltonian
    }

    pub fn n_electrons(&self) -> usize {
        self.n_electrons
    }

    pub fn sz_doubled(&self) -> i32 {
        self.sz_doubled
    }

    pub fn reference_cfg(&self) -> Config {
        self.reference_cfg
    }

    /// True if `cfg` has this system's electron count and `2·S_z`.
    pub fn in_sector(&self, cfg: Config) -> bool {
        symmetry_of(cfg) == (self.n_electrons, self.sz_doubled)
    }
}

/// `(popcount, 2·S_z)` where even qubits are spin up and odd qubits spin down.
pub fn symmetry_of(cfg: Config) -> (usize, i32) {
    const EVEN: u64 = 0x5555_5555_5555_5555;
    let up = (cfg & EVEN).count_ones() as i32;
    let down = (cfg & !EVEN).count_ones() as i32;
    ((up + down) as usize, up - down)
}

/// Hartree–Fock determinant: the lowest `n_up` spin-up and `n_down`
/// spin-down spin-orbitals, with `n_up - n_down = sz_doubled`.
pub fn reference_configuration(n_qubits: usize, n_electrons: usize, sz_doubled: i32) -> Result<Config> {
    if n_electrons > n_qubits {
        return Err(Error::Inconsistent(format!(
            "{n_electrons} electrons do not fit in {n_qubits} spin-orbitals"
        )));
    }
    let ne = n_electrons as i32;
    if (ne + sz_doubled) % 2 != 0 || sz_doubled.abs() > ne {
        return Err(Error::Inconsistent(format!(
            "MS2={sz_doubled} incompatible with {n_electrons} electrons"
        )));
    }
    let n_up = ((ne + sz_doubled) / 2) as usize;
    let n_down = ((ne - sz_doubled) / 2) as usize;
    let n_mo = n_qubits / 2;
    if n_up > n_mo || n_down > n_mo {
        return Err(Error::Inconsistent(format!(
            "MS2={sz_doubled} needs more than {n_mo} orbitals of one spin"
        )));
    }
    let mut cfg = 0u64;
    for i in 0..n_up {
        cfg |= 1 << (2 * i);
    }
    for i in 0..n_down {
        cfg |= 1 << (2 * i + 1);
    }
    Ok(cfg)
}

/// Assembles and Jordan–Wigner maps
///
/// `H = E₀ + Σ_{pq,σ} h_pq a†_{pσ} a_{qσ}
///        + ½ Σ_{pqrs,στ} (pq|rs) a†_{pσ} a†_{rτ} a_{sτ} a_{qσ}`
///
/// with chemist-notation `(pq|rs)`.
pub fn build_molecular_hamiltonian(ints: &Integrals) -> Result<MolecularSystem> {
    let n_mo = ints.n_orbitals;
    let n_qubits = 2 * n_mo;
    let reference = reference_configuration(n_qubits, ints.n_electrons, ints.ms2)?;
    let so = |orb: usize, spin: usize| 2 * orb + spin;

    let mut op = FermionOp::new();
    for p in 0..n_mo {
        for q in 0..n_mo {
            let h = ints.h1(p, q);
            if h == 0.0 {
                continue;
            }
            for s in 0..2 {
                op.push(
                    Complex64::new(h, 0.0),
                    vec![Ladder::create(so(p, s)), Ladder::annihilate(so(q, s))],
                );
            }
        }
    }
    for p in 0..n_mo {
        for q in 0..n_mo {
            for r in 0..n_mo {
                for s in 0..n_mo {
                    let v = ints.eri(p, q, r, s);
                    if v == 0.0 {
                        continue;
                    }
                    for sigma in 0..2 {
                        for tau in 0..2 {
                            let (ps, qs, rt, st) = (so(p, sigma), so(q, sigma), so(r, tau), so(s, tau));
                            if ps == rt || qs == st {
                                continue;
                            }
                            op.push(
                                Complex64::new(0.5 * v, 0.0),
                                vec![
                                    Ladder::create(ps),
                                    Ladder::create(rt),
                                    Ladder::annihilate(st),
                                    Ladder::annihilate(qs),
                                ],
                            );
                        }
                    }
                }
            }
        }
    }
    let electronic = jordan_wigner(&op, n_qubits)?;
    let hamiltonian = electronic.add(&PauliSum::constant(n_qubits, ints.core_energy)?)?;
    // integrals are real, so any imaginary residue is round-off from folding
    let residue = hamiltonian.max_imag();
    if residue > crate::pauli::HERMITIAN_TOL {
        return Err(Error::NotHermitian(residue));
    }
    let hamiltonian = PauliSum::from_terms(
        n_qubits,
        hamiltonian
            .terms()
            .iter()
            .map(|&(c, t)| (Complex64::new(c.re, 0.0), t)),
    )?;
    MolecularSystem::new(hamiltonian, ints.n_electrons, ints.ms2, reference)
}
