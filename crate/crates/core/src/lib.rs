//! Sample-based quantum-selected configuration interaction with an
//! adaptively grown Pauli-rotation ansatz.
//!
//! The crate covers the full classical side: Pauli algebra, Hamiltonian
//! ingestion, statevector and density-matrix simulation, subspace
//! diagonalization, the adaptive outer loop, error mitigation and resource
//! estimates.

pub mod adapt;
pub mod chem;
pub mod error;
pub mod mitigation;
pub mod pauli;
pub mod qsci;
pub mod resources;
pub mod rng;
pub mod sim;

pub use adapt::{
    build_pool, run_adapt_qsci, AdaptConfig, AdaptIterationRecord, AdaptOutcome, FrequencySource, NoiselessSource,
    OperatorPool, StopReason,
};
pub use chem::{load_system, HamiltonianFormat, Integrals, MolecularSystem};
pub use error::{Error, Result};
pub use mitigation::{CalibrationSet, Measurement, NoiseModel, NoisySampler};
pub use pauli::{Config, PauliSum, PauliTerm, Phase, SparseStateVec};
pub use qsci::{exact_ground_state, r_delta, run_qsci, SelectionPolicy, SubspaceSolution};
pub use resources::{cnot_cost, sorted_insertion, vqe_shot_estimate, ResourceLedger};
pub use sim::{AnsatzProgram, DensityMatrix, RotationGate, StateVector};
