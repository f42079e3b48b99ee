//! Command-line front end for the experiment harness.
//!
//! Each subcommand runs one scenario kind from an INI configuration file
//! and writes CSV tables. Exit codes: 0 on success, 2 for configuration
//! and i/o problems, 3 for numerical failures.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lineid::harness::{
    load_config, run_actuator_demo, run_estimation_sweep, run_lower_bound_probe,
    run_regret_experiment, write_actuator_demo, write_estimation_sweep, write_lower_bound_probe,
    write_regret_experiment, ExperimentConfig, HarnessError, ScenarioKind,
};

#[derive(Parser)]
#[command(
    name = "lineid",
    version,
    about = "Linear system identification and adaptive control experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Open-loop estimation-error sweep over input energies or horizons.
    Estimate(RunArgs),
    /// Adaptive-control regret: spectral-line versus Gaussian exploration.
    Regret(RunArgs),
    /// Cross-term probe for white-noise versus multi-sine inputs.
    LowerBound(RunArgs),
    /// First-order actuator filter demonstration.
    Actuator(RunArgs),
}

impl Command {
    fn expected_kind(&self) -> ScenarioKind {
        match self {
            Command::Estimate(_) => ScenarioKind::EstimationSweep,
            Command::Regret(_) => ScenarioKind::Regret,
            Command::LowerBound(_) => ScenarioKind::LowerBoundProbe,
            Command::Actuator(_) => ScenarioKind::ActuatorDemo,
        }
    }

    fn args(&self) -> &RunArgs {
        match self {
            Command::Estimate(a)
            | Command::Regret(a)
            | Command::LowerBound(a)
            | Command::Actuator(a) => a,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Path to the INI experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Override the configuration's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Main output CSV path (overrides `scenario.output`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker-thread count (overrides `scenario.workers`; results do not
    /// depend on it).
    #[arg(long)]
    workers: Option<usize>,
}

fn run(command: &Command) -> Result<PathBuf, HarnessError> {
    let args = command.args();
    let mut config = load_config(&args.config)?;
    let expected = command.expected_kind();
    if config.kind() != expected {
        return Err(HarnessError::Config(format!(
            "the configuration declares scenario kind `{}`, but this subcommand runs `{}`",
            config.kind().name(),
            expected.name()
        )));
    }
    if args.workers == Some(0) {
        return Err(HarnessError::Config("--workers: must be at least 1".to_string()));
    }
    let common = config.common_mut();
    if let Some(seed) = args.seed {
        common.seed = seed;
    }
    if args.workers.is_some() {
        common.workers = args.workers;
    }
    let out: PathBuf = match (&args.out, &config.common().output) {
        (Some(path), _) => path.clone(),
        (None, Some(path)) => PathBuf::from(path),
        (None, None) => {
            return Err(HarnessError::Config(
                "no output path: set scenario.output in the configuration or pass --out"
                    .to_string(),
            ))
        }
    };
    match config {
        ExperimentConfig::Sweep(cfg) => {
            write_estimation_sweep(&run_estimation_sweep(&cfg)?, &out)?
        }
        ExperimentConfig::Regret(cfg) => {
            write_regret_experiment(&run_regret_experiment(&cfg)?, &out)?
        }
        ExperimentConfig::Probe(cfg) => {
            write_lower_bound_probe(&run_lower_bound_probe(&cfg)?, &out)?
        }
        ExperimentConfig::Actuator(cfg) => write_actuator_demo(&run_actuator_demo(&cfg)?, &out)?,
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(out) => {
            println!("wrote {}", out.display());
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                HarnessError::Config(_) | HarnessError::Io(_) => ExitCode::from(2),
                HarnessError::Numerical(_) | HarnessError::EmptyInput => ExitCode::from(3),
            }
        }
    }
}
