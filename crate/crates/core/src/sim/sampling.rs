use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pauli::Config;

/// Observed configuration counts from `total_shots` measurements.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SampleTable {
    pub total_shots: u64,
    pub counts: BTreeMap<Config, u64>,
}

impl SampleTable {
    /// `f_i = n_i / N_s`.
    pub fn frequencies(&self) -> BTreeMap<Config, f64> {
        let n = self.total_shots as f64;
        self.counts.iter().map(|(&k, &c)| (k, c as f64 / n)).collect()
    }
}

/// Draws `shots` indices from the (unnormalized) weights by cumulative-weight
/// inversion.
pub fn sample_distribution<R: Rng + ?Sized>(
    weights: &[f64],
    shots: u64,
    rng: &mut R,
) -> Result<SampleTable> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shot count must be at least 1".into()));
    }
    let mut cumulative = Vec::with_capacity(weights.len());
    let mut total = 0.0;
    for &w in weights {
        if w < 0.0 || !w.is_finite() {
            return Err(Error::NegativeProbability(w));
        }
        total += w;
        cumulative.push(total);
    }
    if total <= 0.0 {
        return Err(Error::InvalidArgument("distribution has zero mass".into()));
    }
    let last = weights.len() - 1;
    let mut counts = BTreeMap::new();
    for _ in 0..shots {
        let u = rng.random::<f64>() * total;
        let k = cumulative.partition_point(|&c| c <= u).min(last);
        *counts.entry(k as Config).or_insert(0) += 1;
    }
    Ok(SampleTable {
        total_shots: shots,
        counts,
    })
}

/// Flips each of `n_qubits` bits of every shot independently with
/// probability `p_flip`.
pub fn apply_readout_flips<R: Rng + ?Sized>(
    table: &SampleTable,
    n_qubits: usize,
    p_flip: f64,
    rng: &mut R,
) -> Result<SampleTable> {
    if !(0.0..=1.0).contains(&p_flip) {
        return Err(Error::InvalidArgument(format!("flip probability {p_flip} outside [0, 1]")));
    }
    if p_flip == 0.0 {
        return Ok(table.clone());
    }
    let mut counts = BTreeMap::new();
    for (&cfg, &n) in &table.counts {
        for _ in 0..n {
            let mut out = cfg;
            for q in 0..n_qubits {
                if rng.random::<f64>() < p_flip {
                    out ^= 1 << q;
                }
            }
            *counts.entry(out).or_insert(0) += 1;
        }
    }
    Ok(SampleTable {
        total_shots: table.total_shots,
        counts,
    })
}
