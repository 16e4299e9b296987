//! Measurement-based admission control for sliced networks, cast as
//! fixed-confidence pure exploration.
//!
//! An arriving flow is admitted to a slice, or rejected, after measuring the
//! per-slot load of the slices one slot at a time. The crate provides
//!
//! - [`divergence`]: KL divergences and the scalar functions built on them,
//! - [`oracle`]: characteristic times and optimal measurement proportions,
//! - [`glr`]: the GLR stopping statistic and its threshold,
//! - [`tas`]: Track-and-Stop and a round-robin baseline,
//! - [`envs`] and [`flowsim`]: packet-level instances and a flow-level
//!   discrete-event simulator,
//! - [`harness`]: configuration and batch experiments emitting CSV.

pub mod divergence;
pub mod envs;
pub mod error;
pub mod flowsim;
pub mod glr;
pub mod harness;
pub mod observe;
pub mod oracle;
pub mod root;
pub mod tas;

pub use divergence::ObservationFamily;
pub use error::{Error, Result};
pub use oracle::{Answer, Criterion, Instance, OracleResult, WeightVector};
