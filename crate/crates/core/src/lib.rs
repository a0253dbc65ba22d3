//! Online peak-demand reduction with energy storage.
//!
//! The crate provides the offline optimal discharge, the optimal competitive
//! online policy and its adaptive variant, exact computation of the optimal
//! competitive ratio through linear-fractional programs, baseline policies,
//! brute-force oracles for small instances, and a trace-driven evaluation
//! harness.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod crcomp;
pub mod error;
pub mod exec;
pub mod harness;
pub mod lp;
pub mod model;
pub mod offline;
pub mod online;
pub mod oracle;

pub use error::{Error, Result};
pub use exec::Execution;
pub use model::{DemandProfile, DischargeSchedule, ProblemInstance};
pub use offline::{evaluate_schedule, reference_profile, solve_offline, OfflineSolution};
