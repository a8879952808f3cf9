//! Simulation and analysis of a linear bandit whose rewards are read off a
//! linear Gaussian dynamical system through the chosen action.
//!
//! The main policy, [`policies::Kode`], runs a Kalman filter on the rewards
//! and greedily plays the action with the largest predicted reward; it never
//! explores on purpose. [`bounds`] computes the analytical guarantees for it
//! and [`experiments`] compares it against the usual bandit baselines.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod env;
pub mod error;
pub mod experiments;
pub mod kalman;
pub mod matops;
pub mod policies;

pub use env::{generate_instance, EnvState, LgdsParams, StepOutcome};
pub use error::{Error, Result};
pub use kalman::KalmanState;
pub use matops::{Matrix, Vector};
