//! Experiment harness: INI-style configuration, reproducible Monte-Carlo
//! drivers for the four built-in experiments, and CSV emission.
//!
//! Every experiment is deterministic in `(config, master seed)`: each
//! replication derives its own random streams from the master seed and the
//! replication index, results are collected in a fixed order, and floats
//! are printed with a fixed `{:.16e}` format, so reruns — including reruns
//! with a different worker count — produce byte-identical files.

pub mod config;
pub mod csv;
pub mod experiments;

pub use config::{
    load_config, parse_config, ActuatorConfig, ExperimentConfig, HorizonSpec, NoiseSpec,
    ProbeConfig, RegretConfig, ScenarioCommon, ScenarioKind, SweepConfig, UnmodeledConfig,
};
pub use csv::{fmt_float, render_table, sibling_path, write_table, write_text, Row};
pub use experiments::{
    run_actuator_demo, run_estimation_sweep, run_lower_bound_probe, run_regret_experiment,
    write_actuator_demo, write_estimation_sweep, write_lower_bound_probe,
    write_regret_experiment, ActuatorOutput, ProbeOutput, RegretOutput, RunStatus, SweepOutput,
};

use crate::numerics::{mean, median, percentile_nearest_rank, population_std};

/// Errors surfaced by the harness. `Config` and `Io` map to CLI exit code
/// 2, `Numerical` to exit code 3.
#[derive(Debug)]
pub enum HarnessError {
    /// The configuration is malformed or inconsistent.
    Config(String),
    /// Reading the configuration or writing an output file failed.
    Io(std::io::Error),
    /// A required numerical step failed (for example the ideal Riccati
    /// solve on the configured plant).
    Numerical(String),
    /// A summary was requested over zero values.
    EmptyInput,
}

impl std::fmt::Display for HarnessError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HarnessError::Config(msg) => write!(f, "configuration error: {msg}"),
            HarnessError::Io(err) => write!(f, "i/o error: {err}"),
            HarnessError::Numerical(msg) => write!(f, "numerical failure: {msg}"),
            HarnessError::EmptyInput => write!(f, "cannot summarize an empty value set"),
        }
    }
}

impl std::error::Error for HarnessError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            HarnessError::Io(err) => Some(err),
            _ => None,
        }
    }
}

impl From<std::io::Error> for HarnessError {
    fn from(err: std::io::Error) -> Self {
        HarnessError::Io(err)
    }
}

/// Order statistics of one batch of replications.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub median: f64,
    pub p90: f64,
    pub mean: f64,
    /// Population standard deviation (zero for a single replication).
    pub std: f64,
    pub replications: usize,
}

impl RunSummary {
    /// Placeholder for a condition in which every replication failed.
    pub fn empty() -> RunSummary {
        RunSummary { median: f64::NAN, p90: f64::NAN, mean: f64::NAN, std: f64::NAN, replications: 0 }
    }
}

/// Median, 90th percentile (nearest-rank), mean, and population standard
/// deviation of a batch of values. The order of `values` does not matter.
/// Values must be finite; callers exclude failed replications first.
pub fn summarize(values: &[f64]) -> Result<RunSummary, HarnessError> {
    if values.is_empty() {
        return Err(HarnessError::EmptyInput);
    }
    assert!(
        values.iter().all(|v| v.is_finite()),
        "summaries are taken over finite values only; filter failures first"
    );
    Ok(RunSummary {
        median: median(values),
        p90: percentile_nearest_rank(values, 0.9),
        mean: mean(values),
        std: population_std(values),
        replications: values.len(),
    })
}
