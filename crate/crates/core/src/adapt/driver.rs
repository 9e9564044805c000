use std::collections::BTreeMap;

use serde::Serialize;

use crate::adapt::gradient::{optimal_angle, pool_gradients, select_max_abs};
use crate::adapt::pool::OperatorPool;
use crate::chem::MolecularSystem;
use crate::error::{Error, Result};
use crate::mitigation::{Measurement, NoisySampler};
use crate::pauli::Config;
use crate::qsci::{qsci_from_frequencies, SelectionPolicy, SubspaceSolution};
use crate::resources::cnot_cost;
use crate::rng::{stream, Purpose};
use crate::sim::{sample, AnsatzProgram, StateVector};

/// Produces configuration frequencies for the current ansatz.
pub trait FrequencySource {
    /// Shots spent once before the loop starts (e.g. calibration).
    fn setup_shots(&self) -> u64 {
        0
    }

    fn measure(&mut self, program: &AnsatzProgram, iteration: usize) -> Result<Measurement>;
}

/// Exact statevector preparation with multinomial sampling.
#[derive(Clone, Debug)]
pub struct NoiselessSource {
    pub shots: u64,
    pub seed: u64,
}

impl FrequencySource for NoiselessSource {
    fn measure(&mut self, program: &AnsatzProgram, iteration: usize) -> Result<Measurement> {
        let state = StateVector::prepare(program)?;
        let mut rng = stream(self.seed, Purpose::Sampling, iteration as u64);
        let table = sample(&state, self.shots, &mut rng)?;
        Ok(Measurement {
            frequencies: table.frequencies(),
            shots: self.shots,
        })
    }
}

impl FrequencySource for NoisySampler {
    fn setup_shots(&self) -> u64 {
        NoisySampler::setup_shots(self)
    }

    fn measure(&mut self, program: &AnsatzProgram, iteration: usize) -> Result<Measurement> {
        NoisySampler::measure(self, program, iteration)
    }
}

/// Replays a fixed frequency table every iteration.
#[derive(Clone, Debug)]
pub struct FixedSource {
    pub frequencies: BTreeMap<Config, f64>,
    pub shots: u64,
}

impl FrequencySource for FixedSource {
    fn measure(&mut self, _: &AnsatzProgram, _: usize) -> Result<Measurement> {
        Ok(Measurement {
            frequencies: self.frequencies.clone(),
            shots: self.shots,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdaptConfig {
    pub policy: SelectionPolicy,
    /// Number of gates after which the loop stops.
    pub max_iters: usize,
    pub conv_tol: f64,
    pub stagnation_tol: f64,
    /// `E_k` must agree with each of the previous `window` energies.
    pub window: usize,
    /// Record `⟨Φ_{k+1}|H|Φ_{k+1}⟩` from an exact statevector.
    pub track_state_energy: bool,
}

impl AdaptConfig {
    pub fn new(policy: SelectionPolicy, max_iters: usize) -> Self {
        Self {
            policy,
            max_iters,
            conv_tol: 1e-5,
            stagnation_tol: 1e-8,
            window: 1,
            track_state_energy: true,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.window == 0 {
            return Err(Error::InvalidArgument("convergence window must be at least 1".into()));
        }
        if !(self.conv_tol >= 0.0 && self.stagnation_tol >= 0.0) {
            return Err(Error::InvalidArgument("tolerances must be non-negative".into()));
        }
        Ok(())
    }
}

/// One pass of the outer loop: QSCI on `Φ_k`, then (unless stopped) the
/// chosen rotation that defines `Φ_{k+1}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdaptIterationRecord {
    pub k: usize,
    pub energy: f64,
    pub subspace_dim: usize,
    pub selected: Option<usize>,
    pub operator: Option<String>,
    pub gradient: Option<f64>,
    pub theta: Option<f64>,
    /// `f(θ*)` on `c_k`; never above `energy`.
    pub predicted_energy: Option<f64>,
    /// Exact `⟨Φ_{k+1}|H|Φ_{k+1}⟩`.
    pub state_energy: Option<f64>,
    /// CNOTs in the circuit preparing `Φ_k`.
    pub cnots: u64,
    /// Shots spent so far, setup included.
    pub shots: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Converged,
    Stagnated,
    MaxIterations,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::Converged => "converged",
            StopReason::Stagnated => "stagnated",
            StopReason::MaxIterations => "max_iterations",
        }
    }
}

#[derive(Clone, Debug)]
pub struct AdaptOutcome {
    pub solution: SubspaceSolution,
    pub program: AnsatzProgram,
    pub records: Vec<AdaptIterationRecord>,
    pub stop_reason: StopReason,
    pub total_shots: u64,
}

impl AdaptOutcome {
    pub fn energy(&self) -> f64 {
        self.solution.energy
    }

    /// Number of QSCI evaluations.
    pub fn iterations(&self) -> usize {
        self.records.len()
    }
}

fn converged(energies: &[f64], window: usize, tol: f64) -> bool {
    let k = energies.len() - 1;
    if k < window {
        return false;
    }
    (1..=window).all(|j| (energies[k] - energies[k - j]).abs() < tol)
}

/// Runs ADAPT-QSCI from the Hartree–Fock reference of `system`.
pub fn run_adapt_qsci<S: FrequencySource + ?Sized>(
    system: &MolecularSystem,
    pool: &OperatorPool,
    config: &AdaptConfig,
    source: &mut S,
) -> Result<AdaptOutcome> {
    config.validate()?;
    if pool.n_qubits() != system.n_qubits() {
        return Err(Error::QubitMismatch {
            left: system.n_qubits(),
            right: pool.n_qubits(),
        });
    }
    if pool.is_empty() {
        return Err(Error::InvalidArgument("operator pool is empty".into()));
    }
    let h = system.hamiltonian();
    let n = system.n_qubits();
    let mut program = AnsatzProgram::new(n, system.reference_cfg())?;
    let mut shots = source.setup_shots();
    let mut energies = Vec::new();
    let mut records: Vec<AdaptIterationRecord> = Vec::new();

    for k in 0.. {
        let m = source.measure(&program, k)?;
        shots += m.shots;
        let solution = qsci_from_frequencies(h, &m.frequencies, &config.policy, m.shots)?;
        energies.push(solution.energy);
        let mut record = AdaptIterationRecord {
            k,
            energy: solution.energy,
            subspace_dim: solution.dimension(),
            selected: None,
            operator: None,
            gradient: None,
            theta: None,
            predicted_energy: None,
            state_energy: None,
            cnots: cnot_cost(&program)?.cnot_count,
            shots,
        };

        let mut stop = None;
        if converged(&energies, config.window, config.conv_tol) {
            stop = Some(StopReason::Converged);
        } else if k >= config.max_iters {
            stop = Some(StopReason::MaxIterations);
        }
        let c = solution.state(n)?;
        if stop.is_none() {
            let grads = pool_gradients(h, pool, &c)?;
            let (index, gradient) = select_max_abs(&grads).expect("pool is non-empty");
            if gradient.abs() < config.stagnation_tol {
                stop = Some(StopReason::Stagnated);
            } else {
                let p = pool.terms()[index];
                let opt = optimal_angle(h, &p, &c)?;
                program.push(p, opt.theta)?;
                record.selected = Some(index);
                record.operator = Some(p.label());
                record.gradient = Some(gradient);
                record.theta = Some(opt.theta);
                record.predicted_energy = Some(opt.value);
                if config.track_state_energy {
                    record.state_energy = Some(StateVector::prepare(&program)?.expectation(h)?);
                }
            }
        }
        records.push(record);
        if let Some(stop_reason) = stop {
            return Ok(AdaptOutcome {
                solution,
                program,
                records,
                stop_reason,
                total_shots: shots,
            });
        }
    }
    unreachable!("the loop only exits by returning")
}
