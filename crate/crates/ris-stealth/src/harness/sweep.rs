//! Sweep execution: one scenario per swept value, three methods per point.
//!
//! The proposed method minimizes the sensing utility at the true arrival
//! angle (Algorithm-style candidate enumeration); the exhaustive baseline
//! grid-searches the feasible reflections for the largest asymptotic angle
//! error; the max-inner baseline maximizes the echo's correlation with the
//! surface-direction steering vector. Infeasible or otherwise failing points
//! become sentinel records (NaN metrics, zero trials) so sweeps cross dead
//! zones without aborting.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::harness::config::{RunConfig, SnrSpec};
use crate::nu_solver::{
    build_problem, brute_force_nu, solve_max, solve_min, BruteForceMode, DEFAULT_FEASIBILITY_TOL,
};
use crate::phase_recovery::recover_phases;
use crate::scenario::{derive_channels, ChannelSet, ScenarioConfig};
use crate::sensing::{angle_error_deg, asymptotic_aoa, ml_estimate_aoa, simulate_echo, user_snr};

/// Polar grid resolution of the exhaustive baseline.
pub const EXHAUSTIVE_RADIAL_STEPS: usize = 64;
pub const EXHAUSTIVE_ANGULAR_STEPS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Proposed,
    Exhaustive,
    MaxInner,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    /// Noise-free limit of the estimation metric; deterministic.
    Asymptotic,
    /// Mean error of the ML grid estimator over simulated echo blocks.
    MonteCarlo,
}

/// Which methods a sweep runs. Records always keep all three error columns;
/// columns for methods not run hold NaN.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MethodSet {
    pub proposed: bool,
    pub exhaustive: bool,
    pub maxinner: bool,
}

impl MethodSet {
    pub fn all() -> Self {
        MethodSet {
            proposed: true,
            exhaustive: true,
            maxinner: true,
        }
    }

    pub fn only(method: Method) -> Self {
        let mut s = MethodSet {
            proposed: false,
            exhaustive: false,
            maxinner: false,
        };
        match method {
            Method::Proposed => s.proposed = true,
            Method::Exhaustive => s.exhaustive = true,
            Method::MaxInner => s.maxinner = true,
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    /// Surface at (0, value, 0).
    IsLocationY,
    /// Surface at (value, 0, 0).
    IsLocationX,
    /// Elements per row; N = value * Nz.
    Ny,
    /// SNR floor at baseline + value dB.
    SnrEnhancementDb,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::IsLocationY => "is_location_y",
            SweepAxis::IsLocationX => "is_location_x",
            SweepAxis::Ny => "ny",
            SweepAxis::SnrEnhancementDb => "snr_enhancement_db",
        }
    }
}

/// A full experiment: base configuration, swept axis and values, estimator
/// choice, and reproducibility seed.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub base: RunConfig,
    pub sweep: SweepAxis,
    pub values: Vec<f64>,
    pub estimator: Estimator,
    pub trials: usize,
    pub seed: u64,
    pub grid_step_deg: f64,
    pub methods: MethodSet,
}

impl ExperimentSpec {
    /// Spec over the default scenario with default values for the axis.
    pub fn default_for(sweep: SweepAxis) -> Self {
        let base = RunConfig::default();
        let values = match sweep {
            SweepAxis::IsLocationY | SweepAxis::IsLocationX => default_location_values(),
            SweepAxis::Ny => default_ny_values(),
            SweepAxis::SnrEnhancementDb => default_snr_values(),
        };
        ExperimentSpec {
            grid_step_deg: base.grid_step_deg,
            trials: base.trials,
            seed: base.seed,
            base,
            sweep,
            values,
            estimator: Estimator::Asymptotic,
            methods: MethodSet::all(),
        }
    }
}

/// 41 surface offsets spanning [-20, 20] m.
pub fn default_location_values() -> Vec<f64> {
    (0..41).map(|i| -20.0 + i as f64).collect()
}

/// Row counts 2, 4, ..., 40.
pub fn default_ny_values() -> Vec<f64> {
    (1..=20).map(|i| (2 * i) as f64).collect()
}

/// Floor enhancements 0, 0.5, ..., 6 dB. The default geometry supports
/// roughly 7.1 dB at most, so the whole default sweep stays feasible.
pub fn default_snr_values() -> Vec<f64> {
    (0..=12).map(|i| 0.5 * i as f64).collect()
}

/// One row of experiment output; one record per swept value. Error columns
/// for methods that were not run (or failed) hold NaN; the reflection, SNR,
/// and candidate index columns describe the proposed method.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub sweep_name: String,
    pub sweep_value: f64,
    pub err_proposed_deg: f64,
    pub err_exhaustive_deg: f64,
    pub err_maxinner_deg: f64,
    pub nu_proposed_re: f64,
    pub nu_proposed_im: f64,
    pub snr_achieved_db: f64,
    pub candidate_index: i64,
    pub trials: u64,
}

impl SweepRecord {
    fn sentinel(name: &str, value: f64) -> Self {
        SweepRecord {
            sweep_name: name.to_string(),
            sweep_value: value,
            err_proposed_deg: f64::NAN,
            err_exhaustive_deg: f64::NAN,
            err_maxinner_deg: f64::NAN,
            nu_proposed_re: f64::NAN,
            nu_proposed_im: f64::NAN,
            snr_achieved_db: f64::NAN,
            candidate_index: 0,
            trials: 0,
        }
    }
}

/// Result of one method at one sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointOutcome {
    pub err_deg: f64,
    pub nu: Complex64,
    pub snr_achieved_db: f64,
    pub candidate_index: u8,
    pub trials_run: usize,
}

/// Deterministic per-index sub-seed (splitmix-style mix).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Solve one scenario with one method and score the resulting reflection.
///
/// The chosen reflection is converted to phase shifts (validating that it is
/// realizable) and scored either through the noise-free estimation limit or
/// as the mean ML error over `trials` simulated echoes.
pub fn run_point(
    config: &ScenarioConfig,
    method: Method,
    estimator: Estimator,
    trials: usize,
    seed: u64,
    grid_step: f64,
) -> Result<PointOutcome> {
    let channels = derive_channels(config)?;
    run_point_on(config, &channels, method, estimator, trials, seed, grid_step)
}

#[allow(clippy::too_many_arguments)]
fn run_point_on(
    config: &ScenarioConfig,
    channels: &ChannelSet,
    method: Method,
    estimator: Estimator,
    trials: usize,
    seed: u64,
    grid_step: f64,
) -> Result<PointOutcome> {
    let solution = match method {
        Method::Proposed => {
            let problem = build_problem(channels, config, channels.psi4_aoa);
            solve_min(&problem, DEFAULT_FEASIBILITY_TOL)?
        }
        Method::MaxInner => {
            let problem = build_problem(channels, config, channels.psi5_aoa);
            solve_max(&problem, DEFAULT_FEASIBILITY_TOL)?
        }
        Method::Exhaustive => {
            let problem = build_problem(channels, config, channels.psi4_aoa);
            brute_force_nu(
                &problem,
                BruteForceMode::MaxAoaError { grid_step },
                Some((channels, config)),
                EXHAUSTIVE_RADIAL_STEPS,
                EXHAUSTIVE_ANGULAR_STEPS,
            )?
        }
    };

    let theta = recover_phases(solution.nu, channels, config)?;
    let (err_deg, trials_run) = match estimator {
        Estimator::Asymptotic => {
            let psi = asymptotic_aoa(channels, config, solution.nu, grid_step)?;
            (angle_error_deg(psi, channels.psi4_aoa), 1)
        }
        Estimator::MonteCarlo => {
            if trials == 0 {
                return Err(Error::InvalidArgument("trials must be at least 1".into()));
            }
            let mut total = 0.0;
            for t in 0..trials {
                let echo = simulate_echo(channels, &theta, config, derive_seed(seed, t as u64))?;
                let est = ml_estimate_aoa(&echo, config, grid_step)?;
                total += angle_error_deg(est.psi_hat, channels.psi4_aoa);
            }
            (total / trials as f64, trials)
        }
    };

    Ok(PointOutcome {
        err_deg,
        nu: solution.nu,
        snr_achieved_db: 10.0 * user_snr(channels, solution.nu, config).log10(),
        candidate_index: solution.candidate_index,
        trials_run,
    })
}

fn scenario_for_value(base: &RunConfig, axis: SweepAxis, value: f64) -> Result<ScenarioConfig> {
    let mut cfg = base.clone();
    match axis {
        SweepAxis::IsLocationY => cfg.pos_is = [0.0, value, 0.0],
        SweepAxis::IsLocationX => cfg.pos_is = [value, 0.0, 0.0],
        SweepAxis::Ny => {
            if value < 1.0 || value.fract() != 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "ny sweep values must be positive integers, got {value}"
                )));
            }
            cfg.ny = value as usize;
        }
        SweepAxis::SnrEnhancementDb => cfg.snr = SnrSpec::EnhancementDb(value),
    }
    cfg.scenario()
}

/// Run every requested method at every swept value, in order. Point failures
/// never abort the sweep; they surface as sentinel records. Deterministic
/// given the spec: per-point seeds derive from (seed, point index).
pub fn run_sweep(spec: &ExperimentSpec) -> Result<Vec<SweepRecord>> {
    if spec.values.is_empty() {
        return Err(Error::InvalidArgument("sweep needs at least one value".into()));
    }
    let grid_step = spec.grid_step_deg.to_radians();
    let name = spec.sweep.name();
    let mut records = Vec::with_capacity(spec.values.len());

    for (index, &value) in spec.values.iter().enumerate() {
        let point_seed = derive_seed(spec.seed, index as u64);
        let mut record = SweepRecord::sentinel(name, value);

        let prepared = scenario_for_value(&spec.base, spec.sweep, value)
            .and_then(|cfg| derive_channels(&cfg).map(|ch| (cfg, ch)));
        let (config, channels) = match prepared {
            Ok(v) => v,
            Err(_) => {
                records.push(record);
                continue;
            }
        };

        let run = |method: Method| -> Option<PointOutcome> {
            run_point_on(
                &config,
                &channels,
                method,
                spec.estimator,
                spec.trials,
                point_seed,
                grid_step,
            )
            .ok()
        };

        if spec.methods.proposed {
            if let Some(out) = run(Method::Proposed) {
                record.err_proposed_deg = out.err_deg;
                record.nu_proposed_re = out.nu.re;
                record.nu_proposed_im = out.nu.im;
                record.snr_achieved_db = out.snr_achieved_db;
                record.candidate_index = out.candidate_index as i64;
                record.trials = out.trials_run as u64;
            }
        }
        if spec.methods.exhaustive {
            if let Some(out) = run(Method::Exhaustive) {
                record.err_exhaustive_deg = out.err_deg;
                if record.trials == 0 {
                    record.trials = out.trials_run as u64;
                }
            }
        }
        if spec.methods.maxinner {
            if let Some(out) = run(Method::MaxInner) {
                record.err_maxinner_deg = out.err_deg;
                if record.trials == 0 {
                    record.trials = out.trials_run as u64;
                }
            }
        }

        records.push(record);
    }
    Ok(records)
}
