//! Simulation, optimization and analysis of Bell tests based on the Eberhard
//! inequality.
//!
//! The inequality is evaluated on photon-pair polarization measurements with
//! three outcomes per side: detection in the ordinary port (`o`), detection in
//! the extraordinary port (`e`), and no detection (`u`). Because undetected
//! events enter the inequality explicitly, a negative `J` rules out local
//! realistic models without the fair-sampling assumption.
//!
//! The crate is organized around the pipeline of a laboratory run:
//!
//! - [`quantum_model`]: closed-form predictions for states, noise and losses.
//! - [`counting`]: exact integer bookkeeping of `J` from count tables.
//! - [`event_sim`]: Monte Carlo time-tag streams and coincidence matching.
//! - [`statistics`]: blocked significance estimates without Poisson assumptions.
//! - [`optimizer`]: optimal states and analyzer settings, critical efficiencies.
//! - [`qkd_feasibility`]: efficiency thresholds for (one-sided) DI-QKD.
//! - [`cli`]: the batch front end used by the `eberhard` binary.
//!
//! See the `examples/` directory of this crate for one runnable program per
//! capability.

// `!(x > 0.0)` style guards reject NaN on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod counting;
pub mod error;
pub mod event_sim;
pub mod optimizer;
pub mod qkd_feasibility;
pub mod quantum_model;
pub mod statistics;

pub use error::{Error, Result};
