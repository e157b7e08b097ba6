//! Intelligent-surface phase-shift optimization against unauthorized
//! angle-of-arrival sensing.
//!
//! A dual-functional base station serves a user in the downlink and, without
//! authorization, estimates the user's arrival angle from the echo of its own
//! transmission. A passive reflective surface, controlled by the receiver,
//! reshapes the echo so the estimate lands far from the truth while the
//! downlink SNR stays above a floor. The design problem collapses to a scalar
//! complex-plane program solved exactly by enumerating at most seven
//! closed-form candidates; grid oracles, an echo-level maximum-likelihood
//! estimator, and a sweep harness with CSV output reproduce the supporting
//! experiments.
//!
//! Module map:
//! * [`scenario`] - geometry, path loss, steering vectors, channel derivation.
//! * [`nu_solver`] - the scalar reduction, closed-form solver, and grid oracle.
//! * [`phase_recovery`] - unit-modulus phase shifts realizing a given
//!   aggregate reflection.
//! * [`sensing`] - echo simulation, ML grid estimation, SNR and error metrics.
//! * [`harness`] - config files, experiment sweeps, CSV emission.

pub mod error;
pub mod harness;
pub mod nu_solver;
pub mod phase_recovery;
pub mod scenario;
pub mod sensing;

pub use error::{Error, Result};
