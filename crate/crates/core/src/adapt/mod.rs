//! Adaptive ansatz growth driven by classical subspace gradients.

pub mod driver;
pub mod gradient;
pub mod pool;

pub use driver::{
    run_adapt_qsci, AdaptConfig, AdaptIterationRecord, AdaptOutcome, FixedSource, FrequencySource, NoiselessSource,
    StopReason,
};
pub use gradient::{
    exact_pool_gradient, optimal_angle, pool_gradients, rank_and_select, select_max_abs, subspace_gradient,
    AngleOptimum, Selection,
};
pub use pool::{build_pool, OperatorPool};
