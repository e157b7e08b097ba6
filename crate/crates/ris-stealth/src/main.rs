//! Command-line front end: single-scenario solves, the three experiment
//! sweeps, and Monte Carlo echo simulation.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use ris_stealth::error::{Error, Result};
use ris_stealth::harness::{
    csv_string, default_location_values, default_ny_values, default_snr_values, derive_seed,
    emit_csv, run_point, run_sweep, Estimator, ExperimentSpec, Method, MethodSet, RunConfig,
    SweepAxis, SweepRecord,
};
use ris_stealth::nu_solver::{build_problem, solve_min, DEFAULT_FEASIBILITY_TOL};
use ris_stealth::phase_recovery::recover_phases;
use ris_stealth::scenario::derive_channels;
use ris_stealth::sensing::{angle_error_deg, asymptotic_aoa, ml_estimate_aoa, simulate_echo};

#[derive(Parser)]
#[command(
    name = "ris-stealth",
    about = "Surface phase-shift optimization against unauthorized angle sensing",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a single scenario and print the solution summary.
    Solve(CommonArgs),
    /// Sweep the surface position along one axis (error vs location).
    SweepLocation(SweepLocationArgs),
    /// Sweep the per-row element count (error vs surface size).
    SweepNy(SweepArgs),
    /// Sweep the SNR floor enhancement over the no-surface baseline.
    SweepSnr(SweepArgs),
    /// Monte Carlo ML estimation for the phase configuration of one method.
    EchoSim(CommonArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Flat key-value config file; omitted keys take the built-in defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV destination.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Base seed for reproducible noise and symbols.
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo trials per point.
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, value_enum, default_value_t = MethodArg::All)]
    method: MethodArg,
    #[arg(long, value_enum, default_value_t = EstimatorArg::Asymptotic)]
    estimator: EstimatorArg,
    /// Angle grid resolution of the estimator, degrees.
    #[arg(long)]
    grid_step_deg: Option<f64>,
}

#[derive(Args, Clone)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Swept values as a comma-separated list (defaults per sweep).
    #[arg(long, value_delimiter = ',')]
    values: Option<Vec<f64>>,
}

#[derive(Args, Clone)]
struct SweepLocationArgs {
    #[command(flatten)]
    sweep: SweepArgs,
    /// Axis along which the surface moves.
    #[arg(long, value_enum, default_value_t = AxisArg::Y)]
    axis: AxisArg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Proposed,
    Exhaustive,
    Maxinner,
    All,
}

impl MethodArg {
    fn set(self) -> MethodSet {
        match self {
            MethodArg::Proposed => MethodSet::only(Method::Proposed),
            MethodArg::Exhaustive => MethodSet::only(Method::Exhaustive),
            MethodArg::Maxinner => MethodSet::only(Method::MaxInner),
            MethodArg::All => MethodSet::all(),
        }
    }

    fn methods(self) -> Vec<Method> {
        match self {
            MethodArg::Proposed => vec![Method::Proposed],
            MethodArg::Exhaustive => vec![Method::Exhaustive],
            MethodArg::Maxinner => vec![Method::MaxInner],
            MethodArg::All => vec![Method::Proposed, Method::Exhaustive, Method::MaxInner],
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EstimatorArg {
    Asymptotic,
    MonteCarlo,
}

impl From<EstimatorArg> for Estimator {
    fn from(value: EstimatorArg) -> Self {
        match value {
            EstimatorArg::Asymptotic => Estimator::Asymptotic,
            EstimatorArg::MonteCarlo => Estimator::MonteCarlo,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AxisArg {
    Y,
    X,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve(args) => solve_command(args),
        Command::SweepLocation(args) => {
            let axis = match args.axis {
                AxisArg::Y => SweepAxis::IsLocationY,
                AxisArg::X => SweepAxis::IsLocationX,
            };
            sweep_command(args.sweep, axis)
        }
        Command::SweepNy(args) => sweep_command(args, SweepAxis::Ny),
        Command::SweepSnr(args) => sweep_command(args, SweepAxis::SnrEnhancementDb),
    Command::EchoSim(args) => echo_sim_command(args),
    }
}

fn load_config(args: &CommonArgs) -> Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = args.trials {
        if trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        cfg.trials = trials;
    }
    if let Some(step) = args.grid_step_deg {
        if step <= 0.0 {
            return Err(Error::InvalidArgument("grid step must be positive".into()));
        }
        cfg.grid_step_deg = step;
    }
    Ok(cfg)
}

fn solve_command(args: CommonArgs) -> Result<()> {
    let run_cfg = load_config(&args)?;
    let scenario = run_cfg.scenario()?;
    let channels = derive_channels(&scenario)?;
    let problem = build_problem(&channels, &scenario, channels.psi4_aoa);
    let solution = solve_min(&problem, DEFAULT_FEASIBILITY_TOL)?;
    recover_phases(solution.nu, &channels, &scenario)?;

    let grid_step = run_cfg.grid_step_deg.to_radians();
    let predicted = asymptotic_aoa(&channels, &scenario, solution.nu, grid_step)?;
    let true_deg = channels.psi4_aoa.to_degrees();

    println!("nu = {:+.9e} {:+.9e}i", solution.nu.re, solution.nu.im);
    println!("objective = {:.9e}", solution.objective);
    println!("candidate_index = {}", solution.candidate_index);
    println!(
        "achieved_snr_db = {:.6}",
        10.0 * (scenario.tx_power / scenario.noise_power
            * (channels.h1 + channels.xis[1] * solution.nu).norm_sqr())
        .log10()
    );
    println!("snr_floor_db = {:.6}", 10.0 * scenario.snr_floor.log10());
    println!("aoa_true_deg = {true_deg:.6}");
    println!("aoa_predicted_deg = {:.6}", predicted.to_degrees());
    println!(
        "aoa_error_deg = {:.6}",
        angle_error_deg(predicted, channels.psi4_aoa)
    );
    Ok(())
}

fn sweep_command(args: SweepArgs, axis: SweepAxis) -> Result<()> {
    let run_cfg = load_config(&args.common)?;
    let values = match args.values {
        Some(v) if !v.is_empty() => v,
        Some(_) => return Err(Error::InvalidArgument("--values must not be empty".into())),
        None => match axis {
            SweepAxis::IsLocationY | SweepAxis::IsLocationX => default_location_values(),
            SweepAxis::Ny => default_ny_values(),
            SweepAxis::SnrEnhancementDb => default_snr_values(),
        },
    };
    let spec = ExperimentSpec {
        sweep: axis,
        values,
        estimator: args.common.estimator.into(),
        trials: run_cfg.trials,
        seed: run_cfg.seed,
        grid_step_deg: run_cfg.grid_step_deg,
        methods: args.common.method.set(),
        base: run_cfg,
    };
    let records = run_sweep(&spec)?;
    write_or_print(&records, args.common.out.as_deref())
}

fn echo_sim_command(args: CommonArgs) -> Result<()> {
    let run_cfg = load_config(&args)?;
    let scenario = run_cfg.scenario()?;
    let channels = derive_channels(&scenario)?;
    let grid_step = run_cfg.grid_step_deg.to_radians();
    let trials = run_cfg.trials;

    let mut records = Vec::new();
    for method in args.method.methods() {
        let out = run_point(
            &scenario,
            method,
            Estimator::MonteCarlo,
            trials,
            run_cfg.seed,
            grid_step,
        )?;
        let label = match method {
            Method::Proposed => "proposed",
            Method::Exhaustive => "exhaustive",
            Method::MaxInner => "maxinner",
        };
        // Per-trial spread for the summary.
        let theta = {
            let problem_nu = Complex64::new(out.nu.re, out.nu.im);
            recover_phases(problem_nu, &channels, &scenario)?
        };
        let mut worst = 0.0f64;
        for t in 0..trials {
            let echo = simulate_echo(&channels, &theta, &scenario, derive_seed(run_cfg.seed, t as u64))?;
            let est = ml_estimate_aoa(&echo, &scenario, grid_step)?;
            worst = worst.max(angle_error_deg(est.psi_hat, channels.psi4_aoa));
        }
        println!(
            "{label}: mean_error_deg = {:.6}, max_error_deg = {worst:.6}, \
             achieved_snr_db = {:.6}, trials = {trials}",
            out.err_deg, out.snr_achieved_db
        );
        let mut record = SweepRecord {
            sweep_name: "echo_sim".into(),
            sweep_value: 0.0,
            err_proposed_deg: f64::NAN,
            err_exhaustive_deg: f64::NAN,
            err_maxinner_deg: f64::NAN,
            nu_proposed_re: out.nu.re,
            nu_proposed_im: out.nu.im,
            snr_achieved_db: out.snr_achieved_db,
            candidate_index: out.candidate_index as i64,
            trials: out.trials_run as u64,
        };
        match method {
            Method::Proposed => record.err_proposed_deg = out.err_deg,
            Method::Exhaustive => record.err_exhaustive_deg = out.err_deg,
            Method::MaxInner => record.err_maxinner_deg = out.err_deg,
        }
        records.push(record);
    }
    if let Some(path) = args.out.as_deref() {
        emit_csv(&records, path)?;
    }
    Ok(())
}

fn write_or_print(records: &[SweepRecord], out: Option<&std::path::Path>) -> Result<()> {
    match out {
        Some(path) => emit_csv(records, path),
        None => {
            print!("{}", csv_string(records));
            Ok(())
        }
    }
}
