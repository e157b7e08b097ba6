//! Experiment orchestration: config files, method sweeps, CSV emission.

mod config;
mod csv;
mod sweep;

pub use config::{RunConfig, SnrSpec};
pub use csv::{csv_string, emit_csv, CSV_HEADER};
pub use sweep::{
    default_location_values, default_ny_values, default_snr_values, derive_seed, run_point,
    run_sweep, Estimator, ExperimentSpec, Method, MethodSet, PointOutcome, SweepAxis,
    SweepRecord, EXHAUSTIVE_ANGULAR_STEPS, EXHAUSTIVE_RADIAL_STEPS,
};
