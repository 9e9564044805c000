#![allow(dead_code)]

use std::path::PathBuf;

use adapt_qsci::chem::{load_system, HamiltonianFormat, MolecularSystem};
use adapt_qsci::pauli::{PauliSum, PauliTerm, Phase};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

/// Full-CI energies of the bundled fixtures from an independent quantum
/// chemistry package (same integrals, determinant-space diagonalization).
pub const H4_FCI: f64 = -2.1663874486347625;
pub const H6_FCI: f64 = -3.236066279892343;
pub const H4_HF: f64 = -2.098545936997718;
pub const H6_HF: f64 = -3.135532213966324;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

pub fn h4() -> MolecularSystem {
    load_system(fixture("h4_sto3g_1.0A.fcidump"), HamiltonianFormat::Fcidump).unwrap()
}

pub fn h6() -> MolecularSystem {
    load_system(fixture("h6_sto3g_1.0A.fcidump"), HamiltonianFormat::Fcidump).unwrap()
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Single-qubit matrix for `(x, z)` with `σ(1, 1) = Y`.
fn single(x: bool, z: bool) -> [[Complex64; 2]; 2] {
    let (o, l, i) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
    match (x, z) {
        (false, false) => [[l, o], [o, l]],
        (true, false) => [[o, l], [l, o]],
        (false, true) => [[l, o], [o, -l]],
        (true, true) => [[o, -i], [i, o]],
    }
}

/// Dense matrix by explicit tensor product; qubit `q` is bit `q` of the
/// row/column index.
pub fn dense_term(t: &PauliTerm) -> DMatrix<Complex64> {
    let n = t.n_qubits();
    let dim = 1usize << n;
    let phase = t.phase().to_complex();
    DMatrix::from_fn(dim, dim, |r, col| {
        let mut v = phase;
        for q in 0..n {
            let m = single(t.x_mask() >> q & 1 == 1, t.z_mask() >> q & 1 == 1);
            v *= m[r >> q & 1][col >> q & 1];
        }
        v
    })
}

pub fn dense_sum(h: &PauliSum) -> DMatrix<Complex64> {
    let dim = 1usize << h.n_qubits();
    let mut m = DMatrix::zeros(dim, dim);
    for (coef, t) in h.terms() {
        m += dense_term(t) * *coef;
    }
    m
}

pub fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn arb_phase() -> impl Strategy<Value = Phase> {
    (0u8..4).prop_map(|k| Phase::from_exponent(k as i64))
}

pub fn arb_term(n: usize) -> impl Strategy<Value = PauliTerm> {
    let mask = (1u64 << n) - 1;
    (any::<u64>(), any::<u64>(), arb_phase())
        .prop_map(move |(x, z, p)| PauliTerm::new(n, x & mask, z & mask, p).unwrap())
}

pub fn arb_hermitian_sum(n: usize, max_terms: usize) -> impl Strategy<Value = PauliSum> {
    let mask = (1u64 << n) - 1;
    prop::collection::vec((any::<u64>(), any::<u64>(), -1.0f64..1.0), 1..=max_terms).prop_map(move |v| {
        PauliSum::from_terms(
            n,
            v.into_iter()
                .map(|(x, z, w)| (c(w, 0.0), PauliTerm::new(n, x & mask, z & mask, Phase::ONE).unwrap())),
        )
        .unwrap()
    })
}
