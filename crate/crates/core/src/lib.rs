//! Simulation of self-stabilizing jump processes: Poisson point sets, the
//! sequential jump solver with truncation bounds, path simulators and the
//! statistical checks used to validate them.

// Range checks are written as negated comparisons so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod alpha_model;
pub mod analysis;
pub mod error;
pub mod expr;
pub mod point_process;
pub mod rng;
pub mod sim;
pub mod solver;
pub mod special;

pub use error::{Error, Result};

/// Library version recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
