//! Sparse system identification with the LMS family of adaptive filters.
//!
//! [`filter`] holds the four update rules (LMS, leaky LMS, p-norm-like LMS
//! and p-norm-like leaky LMS), [`signal`] the seeded generators for sparse
//! systems, AR(1) input and Gaussian noise, and [`experiment`] the
//! Monte-Carlo harness that turns them into MSD convergence curves.
//! [`cli`] wires the harness to config files, CSV and SVG output.

pub mod cli;
pub mod error;
pub mod experiment;
pub mod filter;
pub mod signal;

pub use error::{Error, Result};
pub use experiment::{
    msd, run_cell, run_experiment, run_trial, steady_state, ExperimentConfig, MsdCurve, SteadyStateSummary,
};
pub use filter::{
    instantaneous_error, llms_step, lms_step, lp_like_llms_step, lp_like_lms_step, pnorm_like,
    pnorm_like_gradient_term, predict, step, AlgorithmConfig, FilterState, LeakSign, RegressorVector, Variant,
    WeightVector,
};
pub use signal::{gen_ar1_input, gen_gaussian_noise, gen_sparse_system, regressor_at, RngStream, Signal};
