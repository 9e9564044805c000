//! Gate counts for the ansatz circuits and the grouped-measurement shot
//! estimate used for the VQE comparison.

use std::ops::Add;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pauli::{PauliSum, PauliTerm};
use crate::sim::{AnsatzProgram, StateVector};

/// Variances below this are treated as numerical corruption.
pub const NEGATIVE_VARIANCE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ResourceLedger {
    pub cnot_count: u64,
    pub single_rot_count: u64,
    pub shot_total: u64,
}

impl Add for ResourceLedger {
    type Output = ResourceLedger;

    fn add(self, o: ResourceLedger) -> ResourceLedger {
        ResourceLedger {
            cnot_count: self.cnot_count + o.cnot_count,
            single_rot_count: self.single_rot_count + o.single_rot_count,
            shot_total: self.shot_total + o.shot_total,
        }
    }
}

/// `(CNOTs, single-qubit rotations)` for one Pauli rotation.
pub fn gate_cost(p: &PauliTerm) -> Result<(u64, u64)> {
    match p.weight() {
        2 => Ok((2, 5)),
        4 => Ok((6, 9)),
        w => Err(Error::UnsupportedWeight(w)),
    }
}

/// Gate counts of the program on an all-to-all device. The reference
/// product state is free.
pub fn cnot_cost(program: &AnsatzProgram) -> Result<ResourceLedger> {
    let mut ledger = ResourceLedger::default();
    for g in program.gates() {
        let (c, s) = gate_cost(&g.pauli)?;
        ledger.cnot_count += c;
        ledger.single_rot_count += s;
    }
    Ok(ledger)
}

/// Mutually commuting groups of Hamiltonian terms.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementGrouping {
    pub groups: Vec<Vec<(Complex64, PauliTerm)>>,
}

impl MeasurementGrouping {
    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }
}

/// Sorted-insertion grouping: terms by descending `|c|` (ties by masks),
/// each placed in the first group it commutes with entirely.
pub fn sorted_insertion(h: &PauliSum) -> Result<MeasurementGrouping> {
    h.require_hermitian()?;
    let mut terms: Vec<(Complex64, PauliTerm)> = h.without_identity().terms().to_vec();
    terms.sort_by(|a, b| {
        b.0.norm()
            .total_cmp(&a.0.norm())
            .then((a.1.x_mask(), a.1.z_mask()).cmp(&(b.1.x_mask(), b.1.z_mask())))
    });
    let mut groups: Vec<Vec<(Complex64, PauliTerm)>> = Vec::new();
    for (c, t) in terms {
        match groups
            .iter_mut()
            .find(|g| g.iter().all(|(_, u)| u.commutes_unchecked(&t)))
        {
            Some(g) => g.push((c, t)),
            None => groups.push(vec![(c, t)]),
        }
    }
    Ok(MeasurementGrouping { groups })
}

/// `Var(G) = ⟨G²⟩ − ⟨G⟩²` for each group, computed exactly on `state`.
pub fn group_variances(grouping: &MeasurementGrouping, state: &StateVector) -> Result<Vec<f64>> {
    let n = state.n_qubits();
    grouping
        .groups
        .par_iter()
        .map(|g| {
            let op = PauliSum::from_terms(n, g.iter().copied())?;
            let gv = state.apply_sum(&op)?;
            let second: f64 = gv.iter().map(|z| z.norm_sqr()).sum();
            let first: Complex64 = state.amplitudes().iter().zip(&gv).map(|(a, b)| a.conj() * b).sum();
            let v = second - first.re * first.re;
            if v < -NEGATIVE_VARIANCE_TOL {
                return Err(Error::NegativeVariance(v));
            }
            Ok(v.max(0.0))
        })
        .collect()
}

/// Shots for standard error `eps` under optimal allocation across the
/// sorted-insertion groups: `(Σ_g √Var_g)² / ε²`.
pub fn vqe_shot_estimate(h: &PauliSum, state: &StateVector, eps: f64) -> Result<f64> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::InvalidArgument(format!("target precision {eps} must be positive")));
    }
    let grouping = sorted_insertion(h)?;
    let s: f64 = group_variances(&grouping, state)?.iter().map(|v| v.sqrt()).sum();
    Ok(s * s / (eps * eps))
}

/// Lower bound on total VQE shots: one energy estimate per iteration.
pub fn vqe_total_estimate(n_once: f64, iterations_plus_one: u64) -> Result<f64> {
    if n_once.is_nan() || n_once < 0.0 || iterations_plus_one == 0 {
        return Err(Error::InvalidArgument("VQE total needs n_once ≥ 0 and at least one iteration".into()));
    }
    Ok(n_once * iterations_plus_one as f64)
}
