//! Gate/readout noise model and the mitigation chain applied to sampled
//! frequencies: two-point zero-noise extrapolation, then tensor-product
//! readout-error inversion, then symmetry post-selection.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::chem::symmetry_of;
use crate::error::{Error, Result};
use crate::pauli::{Config, PauliSum};
use crate::qsci::{qsci_from_frequencies, SelectionPolicy, SubspaceSolution};
use crate::rng::{stream, Purpose};
use crate::sim::{run_noisy, sample_noisy, AnsatzProgram, DensityMatrix};

/// Dense REM vectors are refused above this register size.
pub const REM_GUARD: usize = 24;

/// `|det A^(q)|` below this is treated as singular.
pub const SINGULAR_TOL: f64 = 1e-12;

/// CNOT error rate and per-qubit readout flip probability.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NoiseModel {
    pub p_2q: f64,
    pub p_m: f64,
}

impl NoiseModel {
    pub fn new(p_2q: f64, p_m: f64) -> Result<Self> {
        for (name, p) in [("p_2q", p_2q), ("p_m", p_m)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidArgument(format!("{name} = {p} outside [0, 1]")));
            }
        }
        Ok(Self { p_2q, p_m })
    }

    pub fn noiseless() -> Self {
        Self { p_2q: 0.0, p_m: 0.0 }
    }

    /// Depolarizing probability after a two-qubit rotation (two CNOTs over
    /// two qubits): `p' = p_2q`.
    pub fn p_two_qubit_rotation(&self) -> f64 {
        self.p_2q
    }

    /// Depolarizing probability after a four-qubit rotation (six CNOTs
    /// spread over four qubits): `(1 − p'')⁴ = (1 − p_2q)⁶`.
    pub fn p_four_qubit_rotation(&self) -> f64 {
        1.0 - (1.0 - self.p_2q).powf(1.5)
    }

    /// Per-qubit depolarizing probability after a rotation of the given
    /// weight. Single-qubit rotations are noiseless.
    pub fn depolarizing_probability(&self, weight: u32) -> Result<Option<f64>> {
        match weight {
            0 | 1 => Ok(None),
            2 => Ok(Some(self.p_two_qubit_rotation())),
            4 => Ok(Some(self.p_four_qubit_rotation())),
            w if self.p_2q > 0.0 => Err(Error::UnsupportedWeight(w)),
            _ => Ok(None),
        }
    }
}

/// Per-qubit `2×2` readout calibration matrices `A^(q)[observed][prepared]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CalibrationSet {
    pub matrices: Vec<[[f64; 2]; 2]>,
    pub inverses: Vec<[[f64; 2]; 2]>,
    pub shots: u64,
}

fn invert(q: usize, a: [[f64; 2]; 2]) -> Result<[[f64; 2]; 2]> {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if det.abs() < SINGULAR_TOL {
        return Err(Error::SingularCalibration { qubit: q, det });
    }
    Ok([[a[1][1] / det, -a[0][1] / det], [-a[1][0] / det, a[0][0] / det]])
}

impl CalibrationSet {
    pub fn from_matrices(matrices: Vec<[[f64; 2]; 2]>, shots: u64) -> Result<Self> {
        let inverses = matrices
            .iter()
            .enumerate()
            .map(|(q, &a)| invert(q, a))
            .collect::<Result<_>>()?;
        Ok(Self {
            matrices,
            inverses,
            shots,
        })
    }

    /// Infinite-shot limit of the independent-flip model.
    pub fn analytic(noise: &NoiseModel, n_qubits: usize) -> Result<Self> {
        let p = noise.p_m;
        Self::from_matrices(vec![[[1.0 - p, p], [p, 1.0 - p]]; n_qubits], 0)
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self::from_matrices(vec![[[1.0, 0.0], [0.0, 1.0]]; n_qubits], 0).expect("identity is invertible")
    }

    pub fn n_qubits(&self) -> usize {
        self.matrices.len()
    }
}

/// Simulated calibration: for each qubit `q`, measure `|0⟩` and `|2^q⟩`
/// with `shots` shots each under readout noise only, and fill column `j` of
/// `A^(q)` from the empirical marginal of qubit `q`. Spends `2·n·shots`.
pub fn estimate_calibration(noise: &NoiseModel, n_qubits: usize, shots: u64, seed: u64) -> Result<CalibrationSet> {
    if shots == 0 {
        return Err(Error::InvalidArgument("calibration needs at least one shot".into()));
    }
    let mut matrices = Vec::with_capacity(n_qubits);
    for q in 0..n_qubits {
        let mut p1 = [0.0; 2];
        for (prepared, slot) in p1.iter_mut().enumerate() {
            let cfg = (prepared as Config) << q;
            let rho = DensityMatrix::basis(n_qubits, cfg)?;
            let mut rng = stream(seed, Purpose::Calibration, (2 * q + prepared) as u64);
            let table = sample_noisy(&rho, noise.p_m, shots, &mut rng)?;
            let ones: u64 = table
                .counts
                .iter()
                .filter(|(&c, _)| c >> q & 1 == 1)
                .map(|(_, &n)| n)
                .sum();
            *slot = ones as f64 / shots as f64;
        }
        let a = [[1.0 - p1[0], 1.0 - p1[1]], p1];
        matrices.push(a);
    }
    CalibrationSet::from_matrices(matrices, 2 * n_qubits as u64 * shots)
}

/// `f^(ZNE)_i = (3 f_i − f^(3)_i) / 2` over the union of supports.
pub fn zne_frequencies(f_obs: &BTreeMap<Config, f64>, f_obs3: &BTreeMap<Config, f64>) -> BTreeMap<Config, f64> {
    let mut out = BTreeMap::new();
    for &k in f_obs.keys().chain(f_obs3.keys()) {
        let a = f_obs.get(&k).copied().unwrap_or(0.0);
        let b = f_obs3.get(&k).copied().unwrap_or(0.0);
        out.insert(k, (3.0 * a - b) / 2.0);
    }
    out
}

/// Applies the tensor-product inverse `⊗_q (A^(q))⁻¹` to the dense
/// expansion of `f`, one qubit at a time.
pub fn apply_rem(f: &BTreeMap<Config, f64>, cal: &CalibrationSet) -> Result<Vec<f64>> {
    let n = cal.n_qubits();
    if n > REM_GUARD {
        return Err(Error::GuardExceeded {
            what: "readout-mitigation register",
            size: n,
            limit: REM_GUARD,
        });
    }
    let dim = 1usize << n;
    let mut v = vec![0.0; dim];
    for (&cfg, &x) in f {
        if cfg as usize >= dim {
            return Err(Error::ConfigOutOfRange { cfg, n_qubits: n });
        }
        v[cfg as usize] = x;
    }
    for (q, inv) in cal.inverses.iter().enumerate() {
        let m = 1usize << q;
        for i in (0..dim).filter(|i| i & m == 0) {
            let (o0, o1) = (v[i], v[i | m]);
            v[i] = inv[0][0] * o0 + inv[0][1] * o1;
            v[i | m] = inv[1][0] * o0 + inv[1][1] * o1;
        }
    }
    Ok(v)
}

/// Forward readout channel `⊗_q A^(q)` applied to a dense distribution.
pub fn apply_readout_channel(p: &[f64], cal: &CalibrationSet) -> Vec<f64> {
    let mut v = p.to_vec();
    for (q, a) in cal.matrices.iter().enumerate() {
        let m = 1usize << q;
        for i in (0..v.len()).filter(|i| i & m == 0) {
            let (e0, e1) = (v[i], v[i | m]);
            v[i] = a[0][0] * e0 + a[0][1] * e1;
            v[i | m] = a[1][0] * e0 + a[1][1] * e1;
        }
    }
    v
}

/// Sparse map of the non-zero entries of a dense vector.
pub fn dense_to_map(v: &[f64]) -> BTreeMap<Config, f64> {
    v.iter()
        .enumerate()
        .filter(|(_, &x)| x != 0.0)
        .map(|(k, &x)| (k as Config, x))
        .collect()
}

/// Removes entries whose configuration has the wrong electron count or
/// `2·S_z`. No renormalization.
pub fn post_select(f: &BTreeMap<Config, f64>, n_electrons: usize, sz_doubled: i32) -> BTreeMap<Config, f64> {
    f.iter()
        .filter(|(&c, _)| symmetry_of(c) == (n_electrons, sz_doubled))
        .map(|(&c, &x)| (c, x))
        .collect()
}

/// Top-20 snapshot of each mitigation stage for one iteration.
#[derive(Clone, Debug, Serialize)]
pub struct MitigationDiagnostics {
    pub iteration: usize,
    pub raw: Vec<(Config, f64)>,
    pub raw_fold3: Vec<(Config, f64)>,
    pub zne: Vec<(Config, f64)>,
    pub rem: Vec<(Config, f64)>,
    pub post_selected: Vec<(Config, f64)>,
}

fn top20(f: &BTreeMap<Config, f64>) -> Vec<(Config, f64)> {
    let mut v: Vec<(Config, f64)> = f.iter().map(|(&c, &x)| (c, x)).collect();
    v.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    v.truncate(20);
    v
}

/// Frequencies handed to QSCI together with the shots they cost.
#[derive(Clone, Debug)]
pub struct Measurement {
    pub frequencies: BTreeMap<Config, f64>,
    pub shots: u64,
}

/// How the noisy sampler post-processes its shots.
#[derive(Clone, Debug)]
pub enum NoisyMode {
    /// Raw frequencies of the `fold`-folded circuit.
    Raw { fold: u32 },
    /// Fold-1 and fold-3 runs, ZNE, REM with the given calibration, then
    /// post-selection.
    Mitigated { calibration: CalibrationSet },
}

/// Density-matrix sampler for noisy runs.
#[derive(Clone, Debug)]
pub struct NoisySampler {
    pub noise: NoiseModel,
    pub mode: NoisyMode,
    pub shots: u64,
    pub seed: u64,
    pub n_electrons: usize,
    pub sz_doubled: i32,
    pub record_diagnostics: bool,
    pub diagnostics: Vec<MitigationDiagnostics>,
}

impl NoisySampler {
    pub fn raw(noise: NoiseModel, fold: u32, shots: u64, seed: u64, n_electrons: usize, sz_doubled: i32) -> Self {
        Self {
            noise,
            mode: NoisyMode::Raw { fold },
            shots,
            seed,
            n_electrons,
            sz_doubled,
            record_diagnostics: false,
            diagnostics: Vec::new(),
        }
    }

    /// Estimates the readout calibration up front (`2·n·shots` shots).
    pub fn mitigated(
        noise: NoiseModel,
        n_qubits: usize,
        shots: u64,
        seed: u64,
        n_electrons: usize,
        sz_doubled: i32,
    ) -> Result<Self> {
        let calibration = estimate_calibration(&noise, n_qubits, shots, seed)?;
        Ok(Self {
            noise,
            mode: NoisyMode::Mitigated { calibration },
            shots,
            seed,
            n_electrons,
            sz_doubled,
            record_diagnostics: false,
            diagnostics: Vec::new(),
        })
    }

    /// Shots spent before the first iteration.
    pub fn setup_shots(&self) -> u64 {
        match &self.mode {
            NoisyMode::Raw { .. } => 0,
            NoisyMode::Mitigated { calibration } => calibration.shots,
        }
    }

    /// Samples the program's noisy state(s) for iteration `iteration`.
    pub fn measure(&mut self, program: &AnsatzProgram, iteration: usize) -> Result<Measurement> {
        let it = iteration as u64;
        match &self.mode {
            NoisyMode::Raw { fold } => {
                let rho = run_noisy(program, &self.noise, *fold)?;
                let mut rng = stream(self.seed, Purpose::Sampling, it);
                let table = sample_noisy(&rho, self.noise.p_m, self.shots, &mut rng)?;
                Ok(Measurement {
                    frequencies: table.frequencies(),
                    shots: self.shots,
                })
            }
            NoisyMode::Mitigated { calibration } => {
                let (noise, shots, seed) = (self.noise, self.shots, self.seed);
                let run = |fold: u32, purpose: Purpose| -> Result<BTreeMap<Config, f64>> {
                    let rho = run_noisy(program, &noise, fold)?;
                    let mut rng = stream(seed, purpose, it);
                    Ok(sample_noisy(&rho, noise.p_m, shots, &mut rng)?.frequencies())
                };
                let (f1, f3) = rayon::join(|| run(1, Purpose::Sampling), || run(3, Purpose::FoldThree));
                let (f1, f3) = (f1?, f3?);
                let zne = zne_frequencies(&f1, &f3);
                let rem = dense_to_map(&apply_rem(&zne, calibration)?);
                let selected = post_select(&rem, self.n_electrons, self.sz_doubled);
                if self.record_diagnostics {
                    self.diagnostics.push(MitigationDiagnostics {
                        iteration,
                        raw: top20(&f1),
                        raw_fold3: top20(&f3),
                        zne: top20(&zne),
                        rem: top20(&rem),
                        post_selected: top20(&selected),
                    });
                }
                Ok(Measurement {
                    frequencies: selected,
                    shots: 2 * shots,
                })
            }
        }
    }
}

/// Fold-1/fold-3 sampling → ZNE → REM → post-selection → QSCI for one
/// program. The sampler must already hold its calibration.
pub fn mitigated_pipeline(
    sampler: &mut NoisySampler,
    program: &AnsatzProgram,
    h: &PauliSum,
    policy: &SelectionPolicy,
    iteration: usize,
) -> Result<SubspaceSolution> {
    let m = sampler.measure(program, iteration)?;
    qsci_from_frequencies(h, &m.frequencies, policy, m.shots)
}
