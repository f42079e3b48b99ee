//! The four built-in experiments and their CSV writers.
//!
//! # Random-stream layout
//!
//! Replication `r` of the sweep, probe, and actuator experiments owns the
//! master seed's stream indices `8 r .. 8 r + 7`: slot 0 drives process
//! noise, slot 1 the stochastic input. The slots are shared across
//! conditions and input kinds, so comparisons along the swept axis and
//! between input kinds are paired (common random numbers).
//!
//! The regret experiment instead hands each (condition, replication) pair
//! the single base stream `(condition << 32) + r`; the doubling loop
//! derives its own substreams from it (0 process noise, 1 exploration,
//! 2 initial-controller perturbation). Both exploration arms receive the
//! same base stream, so they face identical noise and start from the same
//! perturbed controller, and only the spectral-lines/Gaussian probe
//! differs.
//!
//! Replications are independent tasks executed on a worker pool; results
//! are reassembled in replication order, so output bytes do not depend on
//! the worker count.

use std::path::Path;

use rayon::prelude::*;

use super::config::{
    ActuatorConfig, HorizonSpec, NoiseSpec, ProbeConfig, RegretConfig, SweepConfig,
};
use super::csv::{sibling_path, write_table, write_text, Row};
use super::{summarize, HarnessError, RunSummary};
use crate::control::{
    pilot_state_rms, run_algorithm1_with_exploration, solve_dare, ControlError, CostMatrices,
    EpochConfig, EpochState, ExplorationKind,
};
use crate::dynamics::{
    companion_system, simulate_with, DynamicsError, LinearSystem, Trajectory,
    DEFAULT_STATE_GUARD,
};
use crate::estimation::cross_term_tau;
use crate::excitation::{
    estimate_spectral_line_scalar, multisine_information_matrix, signal_to_csv, ActuatorFilter,
    InputSignal, MultiSine, WhiteNoiseInput,
};
use crate::numerics::{gaussian_stream, lag_autocorrelation, op_norm, RngSpec};

const REP_STRIDE: u64 = 8;
const SLOT_NOISE: u64 = 0;
const SLOT_INPUT: u64 = 1;
/// Steps of the noise-free pilot that converts a noise-to-signal ratio
/// into a process-noise standard deviation.
const PILOT_STEPS: usize = 500;
/// Hard cap on doubling epochs; beyond this the horizon arithmetic itself
/// is unreasonable.
const MAX_EPOCHS: usize = 48;

fn noise_spec(master: u64, rep: usize) -> RngSpec {
    RngSpec::new(master, REP_STRIDE * rep as u64 + SLOT_NOISE)
}

fn input_spec(master: u64, rep: usize) -> RngSpec {
    RngSpec::new(master, REP_STRIDE * rep as u64 + SLOT_INPUT)
}

fn regret_base_spec(master: u64, condition: usize, rep: usize) -> RngSpec {
    RngSpec::new(master, ((condition as u64) << 32) + rep as u64)
}

fn thread_pool(workers: Option<usize>) -> Result<rayon::ThreadPool, HarnessError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        builder = builder.num_threads(w);
    }
    builder
        .build()
        .map_err(|e| HarnessError::Config(format!("cannot build the worker pool: {e}")))
}

// ---------------------------------------------------------------------------
// Estimation sweep
// ---------------------------------------------------------------------------

/// Input kinds compared by the sweep and the probe, in output order.
pub const COMPARED_INPUT_KINDS: [&str; 2] = ["multi_sine", "white_noise"];

/// One (condition, input kind, replication) outcome. Failed replications
/// (state blowup or a rank-deficient regression) carry NaN errors.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub axis_value: f64,
    pub input_kind: &'static str,
    pub rep: usize,
    pub err_a: f64,
    pub err_b: f64,
    pub err_max: f64,
    /// Smallest singular value of the multi-sine's information matrix on
    /// the true plant; 0 for white noise (its mean line amplitudes vanish),
    /// NaN when the design has fewer than `d` spectral lines.
    pub sigma_min: f64,
    pub tau: f64,
}

#[derive(Debug, Clone)]
pub struct SweepSummary {
    pub axis_value: f64,
    pub input_kind: &'static str,
    pub failed: usize,
    pub summary: RunSummary,
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    /// Whether the swept axis is the horizon (else the input energy).
    pub sweeps_horizon: bool,
    pub rows: Vec<SweepRow>,
    /// Order statistics of `err_max` per condition and input kind.
    pub summaries: Vec<SweepSummary>,
}

struct SweepCondition {
    axis_value: f64,
    energy: f64,
    t_len: usize,
    tone: MultiSine,
    sigma_min: f64,
}

fn sweep_conditions(cfg: &SweepConfig) -> Result<Vec<SweepCondition>, HarnessError> {
    let truth = companion_system(&cfg.coeffs, cfg.sigma);
    let d = truth.regressor_dim();
    let pairs: Vec<(f64, f64, usize)> = if cfg.sweeps_horizon() {
        cfg.horizons.iter().map(|h| (*h as f64, cfg.energies[0], *h)).collect()
    } else {
        cfg.energies.iter().map(|e| (*e, *e, cfg.horizons[0])).collect()
    };
    let mut out = Vec::with_capacity(pairs.len());
    for (axis_value, energy, t_len) in pairs {
        // Each arm uses its own energy convention: white noise draws
        // u_k ~ N(0, E0^2) while the multi-sine is scaled so that
        // sum_k u_k^2 = T * E0. The asymmetry is deliberate — matching the
        // arms at either E0 or E0^2 erases the high-energy contrast this
        // sweep is designed to exhibit.
        let tone = MultiSine::unit(cfg.frequencies.clone())
            .normalize_energy(energy.sqrt(), t_len)
            .map_err(|e| {
                HarnessError::Numerical(format!("cannot normalize the multi-sine design: {e}"))
            })?;
        let sigma_min = if 2 * tone.frequencies.len() >= d {
            multisine_information_matrix(&truth, &tone.frequencies, &tone.amplitudes)
                .map_or(f64::NAN, |info| info.sigma_min)
        } else {
            f64::NAN
        };
        out.push(SweepCondition { axis_value, energy, t_len, tone, sigma_min });
    }
    Ok(out)
}

/// Simulate one open-loop identification run of the sweep (also used by the
/// probe, which shares the sweep's input construction).
fn open_loop_run(
    truth: &LinearSystem,
    unmodeled: &super::config::UnmodeledConfig,
    tone: &MultiSine,
    energy: f64,
    t_len: usize,
    input_kind: &str,
    master: u64,
    rep: usize,
) -> Result<Trajectory, DynamicsError> {
    let n = truth.state_dim();
    let u: Vec<f64> = match input_kind {
        "multi_sine" => tone.generate(t_len),
        "white_noise" => WhiteNoiseInput::new(energy, input_spec(master, rep)).generate(t_len),
        other => unreachable!("unknown compared input kind {other}"),
    };
    let mut map = unmodeled.build(n);
    let mut stream = gaussian_stream(noise_spec(master, rep));
    let mut policy = |k: usize, _x: &[f64]| vec![u[k]];
    simulate_with(
        truth,
        map.as_mut(),
        &mut policy,
        t_len,
        &mut stream,
        &vec![0.0; n],
        DEFAULT_STATE_GUARD,
    )
}

/// Open-loop identification error versus input energy (or horizon) for
/// multi-sine and white-noise inputs. At level `E0` the white-noise arm
/// has standard deviation `E0` and the multi-sine arm realized energy
/// `sum u^2 = T * E0` (see `sweep_conditions`).
pub fn run_estimation_sweep(cfg: &SweepConfig) -> Result<SweepOutput, HarnessError> {
    let truth = companion_system(&cfg.coeffs, cfg.sigma);
    let master = cfg.common.seed;
    let reps = cfg.common.replications;
    let conditions = sweep_conditions(cfg)?;

    let mut tasks: Vec<(usize, usize, usize)> = Vec::new();
    for cond_idx in 0..conditions.len() {
        for kind_idx in 0..COMPARED_INPUT_KINDS.len() {
            for rep in 0..reps {
                tasks.push((cond_idx, kind_idx, rep));
            }
        }
    }

    let pool = thread_pool(cfg.common.workers)?;
    let rows: Vec<SweepRow> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(cond_idx, kind_idx, rep)| {
                let cond = &conditions[cond_idx];
                let input_kind = COMPARED_INPUT_KINDS[kind_idx];
                let sigma_min = if input_kind == "multi_sine" { cond.sigma_min } else { 0.0 };
                let mut row = SweepRow {
                    axis_value: cond.axis_value,
                    input_kind,
                    rep,
                    err_a: f64::NAN,
                    err_b: f64::NAN,
                    err_max: f64::NAN,
                    sigma_min,
                    tau: f64::NAN,
                };
                let traj = match open_loop_run(
                    &truth,
                    &cfg.unmodeled,
                    &cond.tone,
                    cond.energy,
                    cond.t_len,
                    input_kind,
                    master,
                    rep,
                ) {
                    Ok(t) => t,
                    Err(_) => return row,
                };
                row.tau = cross_term_tau(&traj);
                if let Ok(est) = crate::estimation::least_squares(&traj) {
                    row.err_a = op_norm(&(&est.a_hat - &truth.a));
                    row.err_b = op_norm(&(&est.b_hat - &truth.b));
                    row.err_max = row.err_a.max(row.err_b);
                }
                row
            })
            .collect()
    });

    let mut summaries = Vec::new();
    for (cond_idx, cond) in conditions.iter().enumerate() {
        for (kind_idx, input_kind) in COMPARED_INPUT_KINDS.iter().enumerate() {
            let base = (cond_idx * COMPARED_INPUT_KINDS.len() + kind_idx) * reps;
            let errs: Vec<f64> = rows[base..base + reps]
                .iter()
                .map(|r| r.err_max)
                .filter(|e| e.is_finite())
                .collect();
            let summary = if errs.is_empty() {
                RunSummary::empty()
            } else {
                summarize(&errs).expect("nonempty finite values")
            };
            summaries.push(SweepSummary {
                axis_value: cond.axis_value,
                input_kind,
                failed: reps - errs.len(),
                summary,
            });
        }
    }

    Ok(SweepOutput { sweeps_horizon: cfg.sweeps_horizon(), rows, summaries })
}

/// Write the sweep's data rows to `path` and its per-condition summary to
/// `<stem>_summary.csv`.
pub fn write_estimation_sweep(out: &SweepOutput, path: &Path) -> Result<(), HarnessError> {
    let header =
        ["energy_or_T", "input_kind", "seed", "err_A", "err_B", "err_max", "sigma_min", "tau"];
    let rows: Vec<Row> = out
        .rows
        .iter()
        .map(|r| {
            Row::new()
                .float(r.axis_value)
                .str(r.input_kind)
                .int(r.rep)
                .float(r.err_a)
                .float(r.err_b)
                .float(r.err_max)
                .float(r.sigma_min)
                .float(r.tau)
        })
        .collect();
    write_table(path, &header, &rows)?;

    let sum_header =
        ["energy_or_T", "input_kind", "replications", "failed", "median", "p90", "mean", "std"];
    let sum_rows: Vec<Row> = out
        .summaries
        .iter()
        .map(|s| {
            Row::new()
                .float(s.axis_value)
                .str(s.input_kind)
                .int(s.summary.replications)
                .int(s.failed)
                .float(s.summary.median)
                .float(s.summary.p90)
                .float(s.summary.mean)
                .float(s.summary.std)
        })
        .collect();
    write_table(&sibling_path(path, "summary"), &sum_header, &sum_rows)
}

// ---------------------------------------------------------------------------
// Lower-bound probe
// ---------------------------------------------------------------------------

/// One cross-term measurement.
#[derive(Debug, Clone)]
pub struct ProbeRow {
    pub t_len: usize,
    pub input_kind: &'static str,
    pub rep: usize,
    pub tau: f64,
}

#[derive(Debug, Clone)]
pub struct ProbeSummary {
    pub t_len: usize,
    pub input_kind: &'static str,
    pub failed: usize,
    pub summary: RunSummary,
}

#[derive(Debug, Clone)]
pub struct ProbeOutput {
    pub rows: Vec<ProbeRow>,
    pub summaries: Vec<ProbeSummary>,
}

/// The input-to-residual cross term `tau` under white-noise versus
/// multi-sine inputs across horizons, using the sweep's input conventions
/// at the configured energy level.
pub fn run_lower_bound_probe(cfg: &ProbeConfig) -> Result<ProbeOutput, HarnessError> {
    let truth = companion_system(&cfg.coeffs, cfg.sigma);
    let master = cfg.common.seed;
    let reps = cfg.common.replications;

    let mut tones = Vec::with_capacity(cfg.horizons.len());
    for t_len in &cfg.horizons {
        // Same input conventions as the sweep: white noise at standard
        // deviation E0, multi-sine scaled to sum_k u_k^2 = T * E0.
        let tone = MultiSine::unit(cfg.frequencies.clone())
            .normalize_energy(cfg.energy.sqrt(), *t_len)
            .map_err(|e| {
                HarnessError::Numerical(format!("cannot normalize the multi-sine design: {e}"))
            })?;
        tones.push(tone);
    }

    let mut tasks: Vec<(usize, usize, usize)> = Vec::new();
    for cond_idx in 0..cfg.horizons.len() {
        for kind_idx in 0..COMPARED_INPUT_KINDS.len() {
            for rep in 0..reps {
                tasks.push((cond_idx, kind_idx, rep));
            }
        }
    }

    let pool = thread_pool(cfg.common.workers)?;
    let rows: Vec<ProbeRow> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(cond_idx, kind_idx, rep)| {
                let t_len = cfg.horizons[cond_idx];
                let input_kind = COMPARED_INPUT_KINDS[kind_idx];
                let tau = match open_loop_run(
                    &truth,
                    &cfg.unmodeled,
                    &tones[cond_idx],
                    cfg.energy,
                    t_len,
                    input_kind,
                    master,
                    rep,
                ) {
                    Ok(traj) => cross_term_tau(&traj),
                    Err(_) => f64::NAN,
                };
                ProbeRow { t_len, input_kind, rep, tau }
            })
            .collect()
    });

    let mut summaries = Vec::new();
    for (cond_idx, t_len) in cfg.horizons.iter().enumerate() {
        for (kind_idx, input_kind) in COMPARED_INPUT_KINDS.iter().enumerate() {
            let base = (cond_idx * COMPARED_INPUT_KINDS.len() + kind_idx) * reps;
            let taus: Vec<f64> = rows[base..base + reps]
                .iter()
                .map(|r| r.tau)
                .filter(|t| t.is_finite())
                .collect();
            let summary = if taus.is_empty() {
                RunSummary::empty()
            } else {
                summarize(&taus).expect("nonempty finite values")
            };
            summaries.push(ProbeSummary {
                t_len: *t_len,
                input_kind,
                failed: reps - taus.len(),
                summary,
            });
        }
    }

    Ok(ProbeOutput { rows, summaries })
}

/// Write the probe's data rows to `path` and its summary to
/// `<stem>_summary.csv`.
pub fn write_lower_bound_probe(out: &ProbeOutput, path: &Path) -> Result<(), HarnessError> {
    let header = ["T", "input_kind", "seed", "tau"];
    let rows: Vec<Row> = out
        .rows
        .iter()
        .map(|r| Row::new().int(r.t_len).str(r.input_kind).int(r.rep).float(r.tau))
        .collect();
    write_table(path, &header, &rows)?;

    let sum_header =
        ["T", "input_kind", "replications", "failed", "median", "p90", "mean", "std"];
    let sum_rows: Vec<Row> = out
        .summaries
        .iter()
        .map(|s| {
            Row::new()
                .int(s.t_len)
                .str(s.input_kind)
                .int(s.summary.replications)
                .int(s.failed)
                .float(s.summary.median)
                .float(s.summary.p90)
                .float(s.summary.mean)
                .float(s.summary.std)
        })
        .collect();
    write_table(&sibling_path(path, "summary"), &sum_header, &sum_rows)
}

// ---------------------------------------------------------------------------
// Regret experiment
// ---------------------------------------------------------------------------

/// How one adaptive run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Ok,
    /// The closed-loop state left the divergence guard.
    StateBlowup,
    /// No stabilizing initial controller was found.
    NoController,
}

impl RunStatus {
    pub fn label(self) -> &'static str {
        match self {
            RunStatus::Ok => "ok",
            RunStatus::StateBlowup => "state_blowup",
            RunStatus::NoController => "no_controller",
        }
    }
}

/// Exploration arms compared by the regret experiment, in output order.
pub const REGRET_ARMS: [(&str, ExplorationKind); 2] = [
    ("multi_sine", ExplorationKind::SpectralLines),
    ("gaussian", ExplorationKind::Gaussian),
];

#[derive(Debug, Clone)]
pub struct RegretStepRow {
    pub noise: f64,
    pub input_kind: &'static str,
    pub rep: usize,
    pub k: usize,
    pub cost: f64,
    pub regret: f64,
    pub epoch_index: usize,
}

#[derive(Debug, Clone)]
pub struct RegretEpochRow {
    pub noise: f64,
    pub input_kind: &'static str,
    pub rep: usize,
    pub epoch: usize,
    pub epoch_length: usize,
    pub amplitude_cap: f64,
    pub frequencies: Vec<f64>,
    pub err_a: f64,
    pub err_b: f64,
    pub riccati_residual: f64,
    pub closed_loop_radius: f64,
}

#[derive(Debug, Clone)]
pub struct RegretRunRow {
    pub noise: f64,
    pub input_kind: &'static str,
    pub rep: usize,
    pub status: RunStatus,
    /// Process-noise standard deviation actually used (ratio-derived in
    /// ratio mode); NaN when the pilot itself failed.
    pub sigma: f64,
    pub final_regret: f64,
}

#[derive(Debug, Clone)]
pub struct RegretSummaryRow {
    pub noise: f64,
    pub input_kind: &'static str,
    pub k: usize,
    pub summary: RunSummary,
}

#[derive(Debug, Clone)]
pub struct RegretOutput {
    /// Number of excitation lines (the `f_*` column count in the epoch log).
    pub line_count: usize,
    pub step_rows: Vec<RegretStepRow>,
    pub epoch_rows: Vec<RegretEpochRow>,
    pub run_rows: Vec<RegretRunRow>,
    /// Per-step regret order statistics across the replications that
    /// completed, per condition and arm.
    pub summary_rows: Vec<RegretSummaryRow>,
}

fn derive_epochs(t0: usize, horizon: HorizonSpec) -> Result<(usize, usize), HarnessError> {
    match horizon {
        HorizonSpec::Epochs(e) => {
            if e > MAX_EPOCHS {
                return Err(HarnessError::Config(format!(
                    "control.num_epochs: {e} doubling epochs is beyond the supported {MAX_EPOCHS}"
                )));
            }
            Ok((e, t0 * ((1usize << e) - 1)))
        }
        HorizonSpec::TotalSteps(s) => {
            let mut epochs = 0usize;
            let mut total = 0usize;
            while total < s {
                if epochs > MAX_EPOCHS {
                    return Err(HarnessError::Config(format!(
                        "control.total_steps: {s} steps needs more than {MAX_EPOCHS} doubling \
                         epochs"
                    )));
                }
                total += t0 << epochs;
                epochs += 1;
            }
            Ok((epochs, s))
        }
    }
}

/// Epoch index holding step `k` of the doubling schedule.
fn epoch_of_step(k: usize, t0: usize) -> usize {
    let mut end = t0;
    let mut idx = 0usize;
    while k >= end {
        idx += 1;
        end += t0 << idx;
    }
    idx
}

struct ArmOutcome {
    status: RunStatus,
    sigma: f64,
    steps: Vec<(f64, f64)>,
    epochs: Vec<EpochState>,
    final_regret: f64,
}

impl ArmOutcome {
    fn failed(status: RunStatus, sigma: f64) -> ArmOutcome {
        ArmOutcome { status, sigma, steps: Vec::new(), epochs: Vec::new(), final_regret: f64::NAN }
    }
}

fn status_of(err: &ControlError) -> RunStatus {
    match err {
        ControlError::Dynamics(DynamicsError::StateBlowup { .. }) => RunStatus::StateBlowup,
        _ => RunStatus::NoController,
    }
}

/// The adaptive epoch-doubling controller with spectral-line exploration
/// against its Gaussian-exploration twin, on paired random streams.
pub fn run_regret_experiment(cfg: &RegretConfig) -> Result<RegretOutput, HarnessError> {
    let n = cfg.coeffs.len();
    let d = n + 1;
    let line_count = d.div_ceil(2);
    let costs = CostMatrices::scaled_identity(n, 1, cfg.q, cfg.r);
    let epoch_config = {
        let mut ec = EpochConfig::new(cfg.base_amplitude, cfg.frequency_pool.clone());
        ec.t0 = cfg.t0;
        ec.amp_exponent = cfg.amp_exponent;
        ec.perturb_scale = cfg.perturb_scale;
        ec.optimize_frequencies = cfg.optimize_frequencies;
        ec
    };
    let (num_epochs, emitted_steps) = derive_epochs(cfg.t0, cfg.horizon)?;
    let master = cfg.common.seed;
    let reps = cfg.common.replications;

    // Fail fast if the plant itself admits no LQR solution: every
    // replication would hit the same wall.
    let quiet = companion_system(&cfg.coeffs, 0.0);
    solve_dare(&quiet.a, &quiet.b, &costs.q, &costs.r, 1e-10, 100_000).map_err(|e| {
        HarnessError::Numerical(format!("the configured plant admits no LQR solution: {e}"))
    })?;

    let (conditions, ratio_mode): (Vec<f64>, bool) = match &cfg.noise {
        NoiseSpec::Sigma(s) => (vec![*s], false),
        NoiseSpec::Ratios(rs) => (rs.clone(), true),
    };

    let mut tasks: Vec<(usize, usize)> = Vec::new();
    for cond_idx in 0..conditions.len() {
        for rep in 0..reps {
            tasks.push((cond_idx, rep));
        }
    }

    let pool = thread_pool(cfg.common.workers)?;
    let outcomes: Vec<[ArmOutcome; 2]> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(cond_idx, rep)| {
                let base = regret_base_spec(master, cond_idx, rep);
                let sigma = if ratio_mode {
                    let mut pilot_map = cfg.unmodeled.build(n);
                    match pilot_state_rms(
                        &epoch_config,
                        &quiet,
                        pilot_map.as_mut(),
                        &costs,
                        base,
                        PILOT_STEPS,
                    ) {
                        Ok(rms) => conditions[cond_idx] * rms,
                        Err(err) => {
                            let status = status_of(&err);
                            return [
                                ArmOutcome::failed(status, f64::NAN),
                                ArmOutcome::failed(status, f64::NAN),
                            ];
                        }
                    }
                } else {
                    conditions[cond_idx]
                };
                let truth = companion_system(&cfg.coeffs, sigma);
                REGRET_ARMS.map(|(_, exploration)| {
                    let mut map = cfg.unmodeled.build(n);
                    match run_algorithm1_with_exploration(
                        &epoch_config,
                        &truth,
                        map.as_mut(),
                        &costs,
                        base,
                        num_epochs,
                        exploration,
                    ) {
                        Err(err) => ArmOutcome::failed(status_of(&err), sigma),
                        Ok((_traj, epochs, record)) => {
                            let kept = emitted_steps.min(record.per_step_costs.len());
                            let steps: Vec<(f64, f64)> = (0..kept)
                                .map(|k| (record.per_step_costs[k], record.cumulative[k]))
                                .collect();
                            let final_regret =
                                steps.last().map_or(f64::NAN, |(_, r)| *r);
                            ArmOutcome {
                                status: RunStatus::Ok,
                                sigma,
                                steps,
                                epochs,
                                final_regret,
                            }
                        }
                    }
                })
            })
            .collect()
    });

    let mut step_rows = Vec::new();
    let mut epoch_rows = Vec::new();
    let mut run_rows = Vec::new();
    let mut summary_rows = Vec::new();
    for (cond_idx, noise) in conditions.iter().enumerate() {
        for (arm_idx, (input_kind, _)) in REGRET_ARMS.iter().enumerate() {
            for rep in 0..reps {
                let outcome = &outcomes[cond_idx * reps + rep][arm_idx];
                for (k, (cost, cum)) in outcome.steps.iter().enumerate() {
                    step_rows.push(RegretStepRow {
                        noise: *noise,
                        input_kind,
                        rep,
                        k,
                        cost: *cost,
                        regret: *cum,
                        epoch_index: epoch_of_step(k, cfg.t0),
                    });
                }
                for epoch in &outcome.epochs {
                    let (err_a, err_b) = match &epoch.estimate {
                        Some((a_hat, b_hat)) => (
                            op_norm(&(a_hat - &quiet.a)),
                            op_norm(&(b_hat - &quiet.b)),
                        ),
                        None => (f64::NAN, f64::NAN),
                    };
                    epoch_rows.push(RegretEpochRow {
                        noise: *noise,
                        input_kind,
                        rep,
                        epoch: epoch.epoch_index,
                        epoch_length: epoch.epoch_length,
                        amplitude_cap: epoch.amplitude_cap,
                        frequencies: epoch.frequencies.clone(),
                        err_a,
                        err_b,
                        riccati_residual: epoch.riccati_residual,
                        closed_loop_radius: epoch.closed_loop_radius,
                    });
                }
                run_rows.push(RegretRunRow {
                    noise: *noise,
                    input_kind,
                    rep,
                    status: outcome.status,
                    sigma: outcome.sigma,
                    final_regret: outcome.final_regret,
                });
            }
            // Per-step order statistics over completed replications.
            for k in 0..emitted_steps {
                let values: Vec<f64> = (0..reps)
                    .filter_map(|rep| {
                        let outcome = &outcomes[cond_idx * reps + rep][arm_idx];
                        (outcome.status == RunStatus::Ok).then(|| outcome.steps[k].1)
                    })
                    .collect();
                let summary = if values.is_empty() {
                    RunSummary::empty()
                } else {
                    summarize(&values).expect("nonempty finite values")
                };
                summary_rows.push(RegretSummaryRow { noise: *noise, input_kind, k, summary });
            }
        }
    }

    Ok(RegretOutput { line_count, step_rows, epoch_rows, run_rows, summary_rows })
}

/// Write the regret experiment: per-step rows at `path`, plus
/// `<stem>_epochs.csv`, `<stem>_runs.csv`, and `<stem>_summary.csv`.
pub fn write_regret_experiment(out: &RegretOutput, path: &Path) -> Result<(), HarnessError> {
    let header = ["noise", "input_kind", "seed", "k", "cost", "regret", "epoch_index"];
    let rows: Vec<Row> = out
        .step_rows
        .iter()
        .map(|r| {
            Row::new()
                .float(r.noise)
                .str(r.input_kind)
                .int(r.rep)
                .int(r.k)
                .float(r.cost)
                .float(r.regret)
                .int(r.epoch_index)
        })
        .collect();
    write_table(path, &header, &rows)?;

    let mut epoch_header: Vec<String> =
        vec!["noise".into(), "input_kind".into(), "seed".into(), "epoch".into(), "T_i".into(), "amp_cap".into()];
    for i in 1..=out.line_count {
        epoch_header.push(format!("f_{i}"));
    }
    for tail in ["err_A", "err_B", "riccati_residual", "closed_loop_radius"] {
        epoch_header.push(tail.into());
    }
    let epoch_header_refs: Vec<&str> = epoch_header.iter().map(|s| s.as_str()).collect();
    let epoch_rows: Vec<Row> = out
        .epoch_rows
        .iter()
        .map(|r| {
            assert_eq!(r.frequencies.len(), out.line_count, "uniform line count per epoch");
            Row::new()
                .float(r.noise)
                .str(r.input_kind)
                .int(r.rep)
                .int(r.epoch)
                .int(r.epoch_length)
                .float(r.amplitude_cap)
                .floats(&r.frequencies)
                .float(r.err_a)
                .float(r.err_b)
                .float(r.riccati_residual)
                .float(r.closed_loop_radius)
        })
        .collect();
    write_table(&sibling_path(path, "epochs"), &epoch_header_refs, &epoch_rows)?;

    let run_header = ["noise", "input_kind", "seed", "status", "sigma", "final_regret"];
    let run_rows: Vec<Row> = out
        .run_rows
        .iter()
        .map(|r| {
            Row::new()
                .float(r.noise)
                .str(r.input_kind)
                .int(r.rep)
                .str(r.status.label())
                .float(r.sigma)
                .float(r.final_regret)
        })
        .collect();
    write_table(&sibling_path(path, "runs"), &run_header, &run_rows)?;

    let sum_header =
        ["noise", "input_kind", "k", "replications", "median", "p90", "mean", "std"];
    let sum_rows: Vec<Row> = out
        .summary_rows
        .iter()
        .map(|s| {
            Row::new()
                .float(s.noise)
                .str(s.input_kind)
                .int(s.k)
                .int(s.summary.replications)
                .float(s.summary.median)
                .float(s.summary.p90)
                .float(s.summary.mean)
                .float(s.summary.std)
        })
        .collect();
    write_table(&sibling_path(path, "summary"), &sum_header, &sum_rows)
}

// ---------------------------------------------------------------------------
// Actuator demo
// ---------------------------------------------------------------------------

/// Spectral line of one input kind before and after the actuator filter.
#[derive(Debug, Clone)]
pub struct ActuatorLineRow {
    pub input_kind: &'static str,
    pub frequency: f64,
    pub pre_re: f64,
    pub pre_im: f64,
    pub post_re: f64,
    pub post_im: f64,
    /// `|H(f)|` of the filter: the gain the post-filter line should show.
    pub expected_gain: f64,
}

/// Lag-1 autocorrelation of one input kind before and after the filter.
#[derive(Debug, Clone)]
pub struct ActuatorLagRow {
    pub input_kind: &'static str,
    pub lag1_pre: f64,
    pub lag1_post: f64,
    /// `1 - lambda` for white noise (the filter is AR(1) with that pole);
    /// NaN for the multi-sine, where no comparable closed form is reported.
    pub expected_lag1_post: f64,
}

#[derive(Debug, Clone)]
pub struct ActuatorOutput {
    pub line_rows: Vec<ActuatorLineRow>,
    pub lag_rows: Vec<ActuatorLagRow>,
    /// Full pre/post sequences, keyed by file suffix
    /// (`multi_sine_pre`, `multi_sine_post`, `white_noise_pre`,
    /// `white_noise_post`).
    pub signals: Vec<(&'static str, Vec<f64>)>,
}

/// Drive a multi-sine and a white-noise input through the first-order
/// actuator filter; report spectral lines over the analysis window and
/// lag-1 autocorrelations after burn-in.
pub fn run_actuator_demo(cfg: &ActuatorConfig) -> Result<ActuatorOutput, HarnessError> {
    let filter = ActuatorFilter::new(cfg.lambda);
    let master = cfg.common.seed;

    let tone =
        MultiSine::new(cfg.frequencies.clone(), vec![cfg.amplitude; cfg.frequencies.len()]);
    let pre_ms = tone.generate(cfg.horizon);
    let post_ms = filter.apply(&pre_ms);
    let white = WhiteNoiseInput::new(cfg.noise_std, input_spec(master, 0));
    let pre_wn = white.generate(cfg.horizon);
    let post_wn = filter.apply(&pre_wn);

    let mut line_rows = Vec::new();
    let mut lag_rows = Vec::new();
    let window_tail = cfg.window - 1;
    for (input_kind, pre, post) in [
        ("multi_sine", &pre_ms, &post_ms),
        ("white_noise", &pre_wn, &post_wn),
    ] {
        for f in &cfg.frequencies {
            let pre_line = estimate_spectral_line_scalar(pre, *f, cfg.burn_in, window_tail, false)
                .expect("window grid validated during config parsing");
            let post_line =
                estimate_spectral_line_scalar(post, *f, cfg.burn_in, window_tail, false)
                    .expect("window grid validated during config parsing");
            line_rows.push(ActuatorLineRow {
                input_kind,
                frequency: *f,
                pre_re: pre_line.re,
                pre_im: pre_line.im,
                post_re: post_line.re,
                post_im: post_line.im,
                expected_gain: filter.transfer(*f).norm(),
            });
        }
        let lag1_pre = lag_autocorrelation(&pre[cfg.burn_in..], 1).map_err(|e| {
            HarnessError::Numerical(format!("lag-1 autocorrelation undefined for {input_kind}: {e}"))
        })?;
        let lag1_post = lag_autocorrelation(&post[cfg.burn_in..], 1).map_err(|e| {
            HarnessError::Numerical(format!("lag-1 autocorrelation undefined for {input_kind}: {e}"))
        })?;
        lag_rows.push(ActuatorLagRow {
            input_kind,
            lag1_pre,
            lag1_post,
            expected_lag1_post: if input_kind == "white_noise" {
                1.0 - cfg.lambda
            } else {
                f64::NAN
            },
        });
    }

    Ok(ActuatorOutput {
        line_rows,
        lag_rows,
        signals: vec![
            ("multi_sine_pre", pre_ms),
            ("multi_sine_post", post_ms),
            ("white_noise_pre", pre_wn),
            ("white_noise_post", post_wn),
        ],
    })
}

/// Write the actuator demo: line table at `path`, lag-1 table at
/// `<stem>_summary.csv`, and the four full signals at
/// `<stem>_<kind>_<stage>.csv` in the `k,u` signal schema.
pub fn write_actuator_demo(out: &ActuatorOutput, path: &Path) -> Result<(), HarnessError> {
    let header =
        ["input_kind", "freq", "re_pre", "im_pre", "re_post", "im_post", "expected_gain"];
    let rows: Vec<Row> = out
        .line_rows
        .iter()
        .map(|r| {
            Row::new()
                .str(r.input_kind)
                .float(r.frequency)
                .float(r.pre_re)
                .float(r.pre_im)
                .float(r.post_re)
                .float(r.post_im)
                .float(r.expected_gain)
        })
        .collect();
    write_table(path, &header, &rows)?;

    let lag_header = ["input_kind", "lag1_pre", "lag1_post", "expected_lag1_post"];
    let lag_rows: Vec<Row> = out
        .lag_rows
        .iter()
        .map(|r| {
            Row::new()
                .str(r.input_kind)
                .float(r.lag1_pre)
                .float(r.lag1_post)
                .float(r.expected_lag1_post)
        })
        .collect();
    write_table(&sibling_path(path, "summary"), &lag_header, &lag_rows)?;

    for (suffix, samples) in &out.signals {
        write_text(&sibling_path(path, suffix), &signal_to_csv(samples))?;
    }
    Ok(())
}
