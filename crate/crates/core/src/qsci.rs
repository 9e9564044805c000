//! Quantum-selected configuration interaction: turn sampled frequencies into
//! a configuration subspace, project the Hamiltonian onto it and take the
//! lowest eigenpair. Also hosts the exact sector diagonalization used as the
//! reference oracle and the `R_δ` calibration built on it.

use std::collections::{BTreeMap, HashMap};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::chem::{symmetry_of, MolecularSystem};
use crate::error::{Error, Result};
use crate::pauli::{Config, PauliSum, SparseStateVec};
use crate::sim::{sample, StateVector};

/// Default frequency cut below which configurations are discarded.
pub const DEFAULT_FREQ_FLOOR: f64 = 1e-10;

/// Dense projected matrices are refused above this dimension.
pub const SUBSPACE_GUARD: usize = 10_000;

/// Exact sector diagonalization is refused above this dimension.
pub const SECTOR_GUARD: usize = 100_000;

/// Hermiticity tolerance on projected matrices.
pub const MATRIX_HERMITIAN_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelectionPolicy {
    pub r_max: usize,
    pub freq_floor: f64,
    pub n_electrons: usize,
    pub sz_doubled: i32,
}

impl SelectionPolicy {
    pub fn new(r_max: usize, n_electrons: usize, sz_doubled: i32) -> Result<Self> {
        Self::with_floor(r_max, DEFAULT_FREQ_FLOOR, n_electrons, sz_doubled)
    }

    pub fn with_floor(r_max: usize, freq_floor: f64, n_electrons: usize, sz_doubled: i32) -> Result<Self> {
        if r_max == 0 {
            return Err(Error::InvalidArgument("R_max must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&freq_floor) {
            return Err(Error::InvalidArgument(format!("frequency floor {freq_floor} outside [0, 1)")));
        }
        Ok(Self {
            r_max,
            freq_floor,
            n_electrons,
            sz_doubled,
        })
    }

    pub fn for_system(system: &MolecularSystem, r_max: usize) -> Result<Self> {
        Self::new(r_max, system.n_electrons(), system.sz_doubled())
    }

    pub fn accepts(&self, cfg: Config) -> bool {
        symmetry_of(cfg) == (self.n_electrons, self.sz_doubled)
    }
}

/// Keeps symmetry-valid configurations with frequency at least the floor,
/// most frequent first (ties by ascending configuration), at most `R_max`.
pub fn select_subspace(freqs: &BTreeMap<Config, f64>, policy: &SelectionPolicy) -> Result<Vec<Config>> {
    let mut kept: Vec<(Config, f64)> = freqs
        .iter()
        .filter(|&(&cfg, &f)| f >= policy.freq_floor && policy.accepts(cfg))
        .map(|(&c, &f)| (c, f))
        .collect();
    if kept.is_empty() {
        return Err(Error::EmptySubspace);
    }
    kept.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    kept.truncate(policy.r_max);
    Ok(kept.into_iter().map(|(c, _)| c).collect())
}

/// `M_kl = ⟨configs[k]|H|configs[l]⟩`.
pub fn project_hamiltonian(h: &PauliSum, configs: &[Config]) -> Result<DMatrix<Complex64>> {
    let r = configs.len();
    if r > SUBSPACE_GUARD {
        return Err(Error::GuardExceeded {
            what: "subspace",
            size: r,
            limit: SUBSPACE_GUARD,
        });
    }
    let index: HashMap<Config, usize> = configs.iter().enumerate().map(|(k, &c)| (c, k)).collect();
    if index.len() != r {
        return Err(Error::InvalidArgument("subspace configurations must be distinct".into()));
    }
    let mut m = DMatrix::<Complex64>::zeros(r, r);
    for (l, &ket) in configs.iter().enumerate() {
        h.for_each_image(ket, |out, amp| {
            if let Some(&k) = index.get(&out) {
                m[(k, l)] += amp;
            }
        });
    }
    Ok(m)
}

/// Lowest eigenvalue and unit eigenvector of a Hermitian matrix. The
/// eigenvector's largest-magnitude component (first on ties) is made real
/// and positive.
pub fn lowest_eigenpair(m: &DMatrix<Complex64>) -> Result<(f64, DVector<Complex64>)> {
    let r = m.nrows();
    if r == 0 || m.ncols() != r {
        return Err(Error::InvalidArgument(format!("expected a non-empty square matrix, got {}x{}", r, m.ncols())));
    }
    if r > SUBSPACE_GUARD {
        return Err(Error::GuardExceeded {
            what: "subspace",
            size: r,
            limit: SUBSPACE_GUARD,
        });
    }
    let mut residue: f64 = 0.0;
    for i in 0..r {
        for j in i..r {
            residue = residue.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    if residue > MATRIX_HERMITIAN_TOL {
        return Err(Error::NotHermitian(residue));
    }
    // symmetrize so the solver sees an exactly Hermitian input
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(h);
    let (k_min, &e_min) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    let mut v: DVector<Complex64> = eig.eigenvectors.column(k_min).into_owned();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v /= Complex64::new(norm, 0.0);
    let mut pivot = 0;
    for (k, z) in v.iter().enumerate() {
        if z.norm() > v[pivot].norm() + 1e-14 {
            pivot = k;
        }
    }
    let ph = v[pivot].conj() / v[pivot].norm();
    v *= ph;
    v[pivot] = Complex64::new(v[pivot].re, 0.0);
    Ok((e_min, v))
}

/// Result of one subspace diagonalization.
#[derive(Clone, Debug)]
pub struct SubspaceSolution {
    pub configs: Vec<Config>,
    pub projected_h: DMatrix<Complex64>,
    pub energy: f64,
    pub eigvec: DVector<Complex64>,
    /// Shots spent producing the frequencies this subspace came from.
    pub shots: u64,
}

impl SubspaceSolution {
    pub fn dimension(&self) -> usize {
        self.configs.len()
    }

    /// `|c⟩ = Σ_l c_l |r_l⟩`.
    pub fn state(&self, n_qubits: usize) -> Result<SparseStateVec> {
        SparseStateVec::new(n_qubits, self.configs.iter().copied().zip(self.eigvec.iter().copied()))
    }
}

/// Projects and diagonalizes on the given configurations.
pub fn diagonalize_subspace(h: &PauliSum, configs: Vec<Config>) -> Result<SubspaceSolution> {
    let projected_h = project_hamiltonian(h, &configs)?;
    let (energy, eigvec) = lowest_eigenpair(&projected_h)?;
    Ok(SubspaceSolution {
        configs,
        projected_h,
        energy,
        eigvec,
        shots: 0,
    })
}

/// Select → project → diagonalize from a frequency table.
pub fn qsci_from_frequencies(
    h: &PauliSum,
    freqs: &BTreeMap<Config, f64>,
    policy: &SelectionPolicy,
    shots: u64,
) -> Result<SubspaceSolution> {
    let configs = select_subspace(freqs, policy)?;
    let mut sol = diagonalize_subspace(h, configs)?;
    sol.shots = shots;
    Ok(sol)
}

/// Samples `state` `shots` times and runs QSCI on the observed frequencies.
pub fn run_qsci<R: Rng + ?Sized>(
    state: &StateVector,
    h: &PauliSum,
    policy: &SelectionPolicy,
    shots: u64,
    rng: &mut R,
) -> Result<SubspaceSolution> {
    let table = sample(state, shots, rng)?;
    qsci_from_frequencies(h, &table.frequencies(), policy, shots)
}

fn combinations(n: usize, k: usize) -> Vec<u64> {
    if k > n {
        return Vec::new();
    }
    if k == 0 {
        return vec![0];
    }
    let mut out = Vec::new();
    let mut v: u64 = (1 << k) - 1;
    let limit = 1u64 << n;
    while v < limit {
        out.push(v);
        // next bit permutation with the same popcount
        let t = v | (v - 1);
        let w = (t + 1) | (((!t & (t + 1)) - 1) >> (v.trailing_zeros() + 1));
        v = w;
    }
    out
}

fn spread(bits: u64, offset: usize) -> u64 {
    let mut out = 0;
    let mut b = bits;
    while b != 0 {
        let i = b.trailing_zeros() as usize;
        out |= 1 << (2 * i + offset);
        b &= b - 1;
    }
    out
}

/// All configurations of `n_qubits` with the given electron count and
/// `2·S_z`, ascending.
pub fn sector_configs(n_qubits: usize, n_electrons: usize, sz_doubled: i32) -> Vec<Config> {
    let ne = n_electrons as i32;
    if (ne + sz_doubled) % 2 != 0 || sz_doubled.abs() > ne {
        return Vec::new();
    }
    let n_up = ((ne + sz_doubled) / 2) as usize;
    let n_down = ((ne - sz_doubled) / 2) as usize;
    let n_up_orbs = n_qubits.div_ceil(2);
    let n_down_orbs = n_qubits / 2;
    let ups = combinations(n_up_orbs, n_up);
    let downs = combinations(n_down_orbs, n_down);
    let mut out: Vec<Config> = ups
        .iter()
        .flat_map(|&u| downs.iter().map(move |&d| spread(u, 0) | spread(d, 1)))
        .collect();
    out.sort_unstable();
    out
}

/// Lowest eigenpair of `H` restricted to the system's sector, as a sparse
/// vector over the sector configurations.
pub fn exact_ground_state(system: &MolecularSystem) -> Result<(f64, SparseStateVec)> {
    let configs = sector_configs(system.n_qubits(), system.n_electrons(), system.sz_doubled());
    if configs.len() > SECTOR_GUARD {
        return Err(Error::GuardExceeded {
            what: "symmetry sector",
            size: configs.len(),
            limit: SECTOR_GUARD,
        });
    }
    let sol = diagonalize_subspace(system.hamiltonian(), configs)?;
    let gs = sol.state(system.n_qubits())?;
    Ok((sol.energy, gs))
}

/// `(configuration, |α|²)` sorted by weight descending, ties by ascending
/// configuration.
fn sorted_weights(gs: &SparseStateVec) -> Vec<(Config, f64)> {
    let mut w: Vec<(Config, f64)> = gs.iter().map(|(c, a)| (c, a.norm_sqr())).collect();
    w.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    w
}

/// Smallest `R` whose top-`R` weights sum to at least `1 − δ`.
pub fn r_delta(gs: &SparseStateVec, delta: f64) -> Result<usize> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidArgument(format!("delta {delta} outside (0, 1]")));
    }
    let w = sorted_weights(gs);
    let target = 1.0 - delta;
    let mut acc = 0.0;
    for (k, (_, weight)) in w.iter().enumerate() {
        acc += weight;
        if acc >= target {
            return Ok(k + 1);
        }
    }
    Ok(w.len().max(1))
}

/// `|α|²` values, descending.
pub fn amplitude_spectrum(gs: &SparseStateVec) -> Vec<f64> {
    sorted_weights(gs).into_iter().map(|(_, w)| w).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliTerm;
    use approx::assert_abs_diff_eq;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn policy(r: usize, ne: usize, sz: i32) -> SelectionPolicy {
        SelectionPolicy::new(r, ne, sz).unwrap()
    }

    #[test]
    fn select_top_two() {
        let f = BTreeMap::from([(3, 0.5), (12, 0.3), (5, 0.2)]);
        assert_eq!(select_subspace(&f, &policy(2, 2, 0)).unwrap(), vec![3, 12]);
    }

    #[test]
    fn select_filters_wrong_sector() {
        let f = BTreeMap::from([(5, 1.0)]);
        assert!(matches!(
            select_subspace(&f, &policy(4, 2, 0)),
            Err(Error::EmptySubspace)
        ));
    }

    #[test]
    fn select_tie_breaks_ascending() {
        let f = BTreeMap::from([(9, 0.5), (3, 0.5)]);
        assert_eq!(select_subspace(&f, &policy(1, 2, 0)).unwrap(), vec![3]);
    }

    #[test]
    fn select_drops_below_floor_and_negative() {
        let f = BTreeMap::from([(3, 0.5), (6, 1e-11), (9, -0.2)]);
        assert_eq!(select_subspace(&f, &policy(5, 2, 0)).unwrap(), vec![3]);
    }

    #[test]
    fn projection_examples() {
        let z = PauliSum::from_term(c(1.0), PauliTerm::parse_label(1, "Z0").unwrap());
        let m = project_hamiltonian(&z, &[0, 1]).unwrap();
        assert_eq!(m, DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)]));
        let x = PauliSum::from_term(c(1.0), PauliTerm::parse_label(1, "X0").unwrap());
        let m = project_hamiltonian(&x, &[0, 1]).unwrap();
        assert_eq!(m, DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]));
        assert!(project_hamiltonian(&x, &[0, 0]).is_err());
    }

    #[test]
    fn eigenpair_examples() {
        let (e, v) = lowest_eigenpair(&DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)])).unwrap();
        assert_eq!(e, -1.0);
        assert_abs_diff_eq!(v[1].re, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(v[0].norm(), 0.0, epsilon = 1e-14);

        let (e, v) = lowest_eigenpair(&DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)])).unwrap();
        assert_abs_diff_eq!(e, -1.0, epsilon = 1e-14);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!((v[0] * v[1]).re, -0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(v[0].norm(), r, epsilon = 1e-14);
    }

    #[test]
    fn eigenpair_complex_hermitian() {
        // σ_y has eigenvalues ±1
        let i = Complex64::new(0.0, 1.0);
        let m = DMatrix::from_row_slice(2, 2, &[c(0.0), -i, i, c(0.0)]);
        let (e, v) = lowest_eigenpair(&m).unwrap();
        assert_abs_diff_eq!(e, -1.0, epsilon = 1e-14);
        let mv = &m * &v;
        for k in 0..2 {
            assert!((mv[k] + v[k]).norm() < 1e-13);
        }
    }

    #[test]
    fn eigenpair_rejects_non_hermitian() {
        let m = DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]);
        assert!(matches!(lowest_eigenpair(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn cubic_oracle() {
        // symmetric 3x3; lowest root of det(M - λI) by bisection on the
        // characteristic polynomial
        let a = [[1.0, 0.4, -0.3], [0.4, -0.5, 0.2], [-0.3, 0.2, 0.8]];
        let m = DMatrix::from_fn(3, 3, |i, j| c(a[i][j]));
        let det = |l: f64| {
            let b = |i: usize, j: usize| a[i][j] - if i == j { l } else { 0.0 };
            b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1)) - b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0))
                + b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0))
        };
        // Gershgorin lower bound, then scan for the first sign change
        let mut lo = -3.0;
        let mut step_hi = lo;
        while det(step_hi).signum() == det(lo).signum() {
            step_hi += 1e-3;
        }
        let mut hi = step_hi;
        lo = step_hi - 1e-3;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if det(mid).signum() == det(lo).signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (e, _) = lowest_eigenpair(&m).unwrap();
        assert_abs_diff_eq!(e, 0.5 * (lo + hi), epsilon = 1e-12);
    }

    #[test]
    fn sector_enumeration() {
        assert_eq!(sector_configs(4, 2, 0), vec![0b0011, 0b0110, 0b1001, 0b1100]);
        assert_eq!(sector_configs(8, 4, 0).len(), 36);
        assert_eq!(sector_configs(12, 6, 0).len(), 400);
        assert_eq!(sector_configs(4, 1, 1), vec![0b0001, 0b0100]);
        assert!(sector_configs(4, 2, 1).is_empty());
        for cfg in sector_configs(10, 5, 1) {
            assert_eq!(symmetry_of(cfg), (5, 1));
        }
    }

    #[test]
    fn exact_ground_state_two_level() {
        let h = PauliSum::from_terms(
            2,
            [
                (c(0.5), PauliTerm::parse_label(2, "Z0").unwrap()),
                (c(-0.5), PauliTerm::parse_label(2, "Z1").unwrap()),
            ],
        )
        .unwrap();
        // one electron with spin up: the sector holds cfg 1 only
        let sys = MolecularSystem::new(h.clone(), 1, 1, 1).unwrap();
        let (e, gs) = exact_ground_state(&sys).unwrap();
        assert_abs_diff_eq!(e, -1.0, epsilon = 1e-14);
        assert_eq!(gs.len(), 1);
        assert_abs_diff_eq!(gs.get(1).re, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn r_delta_examples() {
        let w = [0.9f64, 0.09, 0.009, 0.001];
        let gs = SparseStateVec::new(8, w.iter().enumerate().map(|(k, x)| (k as u64, c(x.sqrt())))).unwrap();
        assert_eq!(r_delta(&gs, 1e-4).unwrap(), 4);
        assert_eq!(r_delta(&gs, 1.0).unwrap(), 1);
        assert_eq!(r_delta(&SparseStateVec::basis(4, 3).unwrap(), 1e-4).unwrap(), 1);
        assert!(r_delta(&gs, 0.0).is_err());
    }

    #[test]
    fn spectrum_examples() {
        assert_eq!(amplitude_spectrum(&SparseStateVec::basis(3, 2).unwrap()), vec![1.0]);
        let u = SparseStateVec::new(3, (0..4).map(|k| (k, c(0.5)))).unwrap();
        assert_eq!(amplitude_spectrum(&u), vec![0.25; 4]);
    }
}
