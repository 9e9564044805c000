//! Noiseless statevector and noisy density-matrix backends.

pub mod density;
pub mod program;
pub mod sampling;
pub mod statevector;

pub use density::{run_noisy, sample_noisy, DensityMatrix, DENSITY_GUARD};
pub use program::{AnsatzProgram, RotationGate};
pub use sampling::{apply_readout_flips, sample_distribution, SampleTable};
pub use statevector::StateVector;

use rand::Rng;

use crate::error::Result;

/// `shots` projective measurements of `state` in the computational basis.
pub fn sample<R: Rng + ?Sized>(state: &StateVector, shots: u64, rng: &mut R) -> Result<SampleTable> {
    sample_distribution(&state.probabilities(), shots, rng)
}
