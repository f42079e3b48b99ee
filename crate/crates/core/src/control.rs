//! Discrete algebraic Riccati machinery, LQR cost and regret accounting,
//! and the epoch-doubling explore-and-control loop.

use crate::dynamics::{
    simulate_with, DynamicsError, LinearSystem, Trajectory, UnmodeledMap, DEFAULT_STATE_GUARD,
};
use crate::estimation::least_squares;
use crate::numerics::{
    gaussian_stream, real_sigma_min, spectral_radius, sym_eigenvalues, RealMatrix, RngSpec,
};

/// Quadratic stage-cost matrices. Construction checks symmetry and
/// definiteness, so downstream solvers can assume both.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrices {
    pub q: RealMatrix,
    pub r: RealMatrix,
}

impl CostMatrices {
    pub fn new(q: RealMatrix, r: RealMatrix) -> Self {
        assert!(q.is_square() && r.is_square(), "cost matrices must be square");
        assert!((&q - &q.transpose()).max_abs() <= 1e-12 * (1.0 + q.max_abs()), "Q not symmetric");
        assert!((&r - &r.transpose()).max_abs() <= 1e-12 * (1.0 + r.max_abs()), "R not symmetric");
        let q_eigs = sym_eigenvalues(&q);
        assert!(q_eigs[0] >= -1e-12 * (1.0 + q.max_abs()), "Q must be positive semidefinite");
        let r_eigs = sym_eigenvalues(&r);
        assert!(r_eigs[0] > 0.0, "R must be positive definite");
        CostMatrices { q, r }
    }

    /// Scaled identity costs `Q = q I_n`, `R = r I_m`.
    pub fn scaled_identity(n: usize, m: usize, q: f64, r: f64) -> Self {
        CostMatrices::new(RealMatrix::identity(n).scale(q), RealMatrix::identity(m).scale(r))
    }

    pub fn stage_cost(&self, x: &[f64], u: &[f64]) -> f64 {
        let qx = self.q.mul_vec(x);
        let ru = self.r.mul_vec(u);
        let xq: f64 = x.iter().zip(&qx).map(|(a, b)| a * b).sum();
        let ur: f64 = u.iter().zip(&ru).map(|(a, b)| a * b).sum();
        xq + ur
    }
}

/// Solution of the discrete algebraic Riccati equation with its feedback
/// gain. `j_star` is filled in by [`optimal_average_cost`]; the solver
/// itself leaves it at zero since the noise level is not its input.
#[derive(Debug, Clone, PartialEq)]
pub struct LqrSolution {
    pub p: RealMatrix,
    pub k: RealMatrix,
    pub j_star: f64,
    pub riccati_residual: f64,
}

/// Everything recorded about one epoch of the doubling loop.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochState {
    pub epoch_index: usize,
    pub epoch_length: usize,
    pub amplitude_cap: f64,
    pub frequencies: Vec<f64>,
    pub amplitudes: Vec<f64>,
    /// Feedback gain in force during this epoch.
    pub controller: RealMatrix,
    /// Least-squares estimate from exactly this epoch's samples; `None`
    /// when the epoch's Gram matrix was rank deficient.
    pub estimate: Option<(RealMatrix, RealMatrix)>,
    /// Residual of the Riccati solve on this epoch's estimate (NaN when the
    /// controller was not updated).
    pub riccati_residual: f64,
    /// Spectral radius of `A_hat + B_hat K_next` (NaN when not updated).
    pub closed_loop_radius: f64,
    /// Whether this epoch's data produced the next controller.
    pub updated: bool,
}

/// Per-step costs against a long-run average baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretRecord {
    pub per_step_costs: Vec<f64>,
    pub j_star: f64,
    /// `cumulative[t] = sum_{k<=t} (cost_k - j_star)`.
    pub cumulative: Vec<f64>,
}

/// Exploration signal injected on top of the certainty-equivalence
/// controller during each epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExplorationKind {
    /// Deterministic multi-sine at the epoch's snapped frequencies.
    SpectralLines,
    /// White Gaussian input whose variance matches the multi-sine's mean
    /// power `sum_j M_j^2 / 2`.
    Gaussian,
}

/// Seed values for the epoch-doubling loop.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochConfig {
    /// Base epoch length; epoch `i` lasts `t0 * 2^i` steps.
    pub t0: usize,
    /// Amplitude-cap exponent: cap is `base_amplitude * T_i^amp_exponent`.
    /// The default -1/4 decays; +1/4 is selectable.
    pub amp_exponent: f64,
    pub base_amplitude: f64,
    /// Candidate excitation frequencies (cycles per step, in (0, 1/2]).
    pub frequency_pool: Vec<f64>,
    /// Scale of the Gaussian bottom-row perturbation that produces the
    /// initial model (0 starts from the exact plant).
    pub perturb_scale: f64,
    /// Pick the frequency subset maximizing the estimated information
    /// matrix's smallest singular value instead of taking the pool in
    /// order.
    pub optimize_frequencies: bool,
}

impl EpochConfig {
    pub fn new(base_amplitude: f64, frequency_pool: Vec<f64>) -> Self {
        assert!(base_amplitude > 0.0, "exploration amplitude must be positive");
        for f in &frequency_pool {
            assert!(*f > 0.0 && *f <= 0.5, "frequencies must lie in (0, 1/2], got {f}");
        }
        EpochConfig {
            t0: 50,
            amp_exponent: -0.25,
            base_amplitude,
            frequency_pool,
            perturb_scale: 0.0,
            optimize_frequencies: false,
        }
    }
}

/// Errors raised by the control routines.
#[derive(Debug)]
pub enum ControlError {
    /// The Riccati iteration diverged or failed to converge.
    NotStabilizable,
    /// No stabilizing initial controller found within the retry budget.
    NoStabilizingController,
    /// The closed-loop simulation failed (state blow-up or mismatch).
    Dynamics(DynamicsError),
}

impl std::fmt::Display for ControlError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ControlError::NotStabilizable => {
                write!(f, "Riccati iteration did not converge: pair not stabilizable")
            }
            ControlError::NoStabilizingController => {
                write!(f, "no stabilizing initial controller within the retry budget")
            }
            ControlError::Dynamics(err) => write!(f, "simulation failed: {err}"),
        }
    }
}

impl std::error::Error for ControlError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            ControlError::Dynamics(err) => Some(err),
            _ => None,
        }
    }
}

impl From<DynamicsError> for ControlError {
    fn from(err: DynamicsError) -> Self {
        ControlError::Dynamics(err)
    }
}

const DARE_DIVERGENCE_NORM: f64 = 1e12;

/// Spectral radius with eigensolver failure folded into "unstable":
/// a loop this code cannot certify is never reported as stable.
fn radius_or_unstable(m: &RealMatrix) -> f64 {
    spectral_radius(m).unwrap_or(f64::INFINITY)
}

/// Solve the discrete algebraic Riccati equation by value iteration from
/// `P_0 = Q` and return the stationary solution with its feedback gain
/// `K = -(R + B^T P B)^{-1} B^T P A`.
pub fn solve_dare(
    a: &RealMatrix,
    b: &RealMatrix,
    q: &RealMatrix,
    r: &RealMatrix,
    tol: f64,
    max_iter: usize,
) -> Result<LqrSolution, ControlError> {
    let n = a.rows();
    assert!(a.is_square(), "state matrix must be square");
    assert_eq!(b.rows(), n, "B row count must match A");
    assert_eq!(q.rows(), n, "Q must be n x n");
    assert_eq!(r.rows(), b.cols(), "R must be m x m");
    assert!(tol > 0.0, "tolerance must be positive");

    let mut p = q.clone();
    let mut converged = false;
    for _ in 0..max_iter {
        let next = dare_step(a, b, q, r, &p).ok_or(ControlError::NotStabilizable)?;
        let diff = (&next - &p).frobenius_norm();
        let scale = next.frobenius_norm().max(1.0);
        if scale > DARE_DIVERGENCE_NORM {
            return Err(ControlError::NotStabilizable);
        }
        p = next.symmetrized();
        if diff <= tol * scale {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(ControlError::NotStabilizable);
    }

    let k = feedback_gain(a, b, r, &p).ok_or(ControlError::NotStabilizable)?;
    let closed = a + &(b * &k);
    if radius_or_unstable(&closed) >= 1.0 {
        return Err(ControlError::NotStabilizable);
    }
    let refit = dare_step(a, b, q, r, &p).ok_or(ControlError::NotStabilizable)?;
    let riccati_residual = (&refit - &p).frobenius_norm();
    Ok(LqrSolution { p, k, j_star: 0.0, riccati_residual })
}

/// One value-iteration step `P -> A^T P A - A^T P B (R + B^T P B)^{-1} B^T P A + Q`.
fn dare_step(
    a: &RealMatrix,
    b: &RealMatrix,
    q: &RealMatrix,
    r: &RealMatrix,
    p: &RealMatrix,
) -> Option<RealMatrix> {
    let at = a.transpose();
    let bt = b.transpose();
    let pa = p * a;
    let pb = p * b;
    let atpa = &at * &pa;
    let atpb = &at * &pb;
    let inner = r + &(&bt * &pb);
    // (R + B^T P B)^{-1} B^T P A
    let solved = inner.solve(&(&bt * &pa))?;
    Some(&(&atpa - &(&atpb * &solved)) + q)
}

/// `K = -(R + B^T P B)^{-1} B^T P A`.
fn feedback_gain(
    a: &RealMatrix,
    b: &RealMatrix,
    r: &RealMatrix,
    p: &RealMatrix,
) -> Option<RealMatrix> {
    let bt = b.transpose();
    let inner = r + &(&bt * &(p * b));
    let rhs = &bt * &(p * a);
    Some(inner.solve(&rhs)?.scale(-1.0))
}

/// Long-run average cost of the optimal controller under process noise of
/// scale `sigma`: `sigma^2 * trace(P)`.
pub fn optimal_average_cost(p: &RealMatrix, sigma: f64) -> f64 {
    assert!(sigma >= 0.0, "noise scale must be nonnegative");
    sigma * sigma * p.trace()
}

/// Smallest singular value of the `ell`-block controllability matrix
/// `[B, AB, ..., A^{ell-1} B]` — the quantitative stabilizability margin.
pub fn ln_stability(a: &RealMatrix, b: &RealMatrix, ell: usize) -> f64 {
    assert!(ell >= 1, "need at least one controllability block");
    assert!(a.is_square(), "state matrix must be square");
    assert_eq!(b.rows(), a.rows(), "B row count must match A");
    let n = a.rows();
    let m = b.cols();
    let mut blocks = RealMatrix::zeros(n, ell * m);
    let mut reach = b.clone();
    for block in 0..ell {
        for i in 0..n {
            for j in 0..m {
                blocks[(i, block * m + j)] = reach[(i, j)];
            }
        }
        if block + 1 < ell {
            reach = a * &reach;
        }
    }
    real_sigma_min(&blocks)
}

/// Exact running regret of a trajectory against the baseline `j_star`.
pub fn regret(traj: &Trajectory, costs: &CostMatrices, j_star: f64) -> RegretRecord {
    if traj.len() > 0 {
        assert_eq!(costs.q.rows(), traj.state_dim(), "Q dimension must match the state");
        assert_eq!(costs.r.rows(), traj.input_dim(), "R dimension must match the input");
    }
    let mut per_step_costs = Vec::with_capacity(traj.len());
    let mut cumulative = Vec::with_capacity(traj.len());
    let mut acc = 0.0;
    for k in 0..traj.len() {
        let c = costs.stage_cost(&traj.states[k], &traj.inputs[k]);
        acc += c - j_star;
        per_step_costs.push(c);
        cumulative.push(acc);
    }
    RegretRecord { per_step_costs, j_star, cumulative }
}

const INITIAL_CONTROLLER_RETRIES: usize = 10;

/// Initial model and controller: perturb the bottom row of the true state
/// matrix with a Gaussian vector of the given scale, solve the Riccati
/// equation on the perturbed model, and keep the gain if it stabilizes the
/// true plant. Retries with a halved scale, drawing fresh Gaussians from
/// the same stream, up to 10 times.
pub fn perturbed_initial_controller(
    truth: &LinearSystem,
    costs: &CostMatrices,
    perturb_scale: f64,
    rng: RngSpec,
) -> Result<(RealMatrix, RealMatrix), ControlError> {
    assert!(perturb_scale >= 0.0, "perturbation scale must be nonnegative");
    let n = truth.state_dim();
    let mut stream = gaussian_stream(rng);
    let mut scale = perturb_scale;
    for _ in 0..=INITIAL_CONTROLLER_RETRIES {
        let mut a0 = truth.a.clone();
        for j in 0..n {
            a0[(n - 1, j)] += scale * stream.gaussian();
        }
        if let Ok(solution) = solve_dare(&a0, &truth.b, &costs.q, &costs.r, 1e-10, 100_000) {
            let closed = &truth.a + &(&truth.b * &solution.k);
            if radius_or_unstable(&closed) < 1.0 {
                return Ok((solution.k, a0));
            }
        }
        scale /= 2.0;
    }
    Err(ControlError::NoStabilizingController)
}

/// Snap each requested frequency to the epoch grid `q / t_len` with
/// `q in [1, t_len/2]`, bumping upward (then downward) on collisions.
fn snap_frequencies(pool: &[f64], count: usize, t_len: usize) -> Vec<f64> {
    let top = (t_len / 2).max(1);
    let mut taken: Vec<usize> = Vec::with_capacity(count);
    for f in pool.iter().take(count) {
        let mut q = ((f * t_len as f64).round() as usize).clamp(1, top);
        if taken.contains(&q) {
            let mut candidate = q + 1;
            while candidate <= top && taken.contains(&candidate) {
                candidate += 1;
            }
            if candidate > top {
                candidate = q.saturating_sub(1).max(1);
                while candidate >= 1 && taken.contains(&candidate) {
                    candidate -= 1;
                }
                assert!(candidate >= 1, "frequency grid exhausted: epoch too short");
            }
            q = candidate;
        }
        taken.push(q);
    }
    taken.into_iter().map(|q| q as f64 / t_len as f64).collect()
}

/// All `count`-element index combinations of `0..pool_len`.
fn combinations(pool_len: usize, count: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(count);
    fn recurse(start: usize, pool_len: usize, count: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == count {
            out.push(current.clone());
            return;
        }
        for i in start..pool_len {
            current.push(i);
            recurse(i + 1, pool_len, count, current, out);
            current.pop();
        }
    }
    recurse(0, pool_len, count, &mut current, &mut out);
    out
}

/// Choose the epoch's frequencies: either the pool's leading entries or the
/// subset maximizing the estimated information matrix's smallest singular
/// value, both snapped to the epoch grid.
fn choose_frequencies(
    config: &EpochConfig,
    model: &LinearSystem,
    count: usize,
    t_len: usize,
    amplitude: f64,
) -> Vec<f64> {
    if !config.optimize_frequencies {
        return snap_frequencies(&config.frequency_pool, count, t_len);
    }
    let mut best: Option<(f64, Vec<f64>)> = None;
    for combo in combinations(config.frequency_pool.len(), count) {
        let subset: Vec<f64> = combo.iter().map(|&i| config.frequency_pool[i]).collect();
        let snapped = snap_frequencies(&subset, count, t_len);
        let amps = vec![amplitude; count];
        match crate::excitation::multisine_information_matrix(model, &snapped, &amps) {
            Ok(info) => {
                if best.as_ref().map_or(true, |(s, _)| info.sigma_min > *s) {
                    best = Some((info.sigma_min, snapped));
                }
            }
            Err(_) => continue,
        }
    }
    match best {
        Some((_, freqs)) => freqs,
        None => snap_frequencies(&config.frequency_pool, count, t_len),
    }
}

/// Run the epoch-doubling explore-and-control loop: epoch `i` lasts
/// `t0 * 2^i` steps, injects the exploration signal on top of the current
/// certainty-equivalence gain, re-estimates the plant from exactly that
/// epoch's samples, and updates the controller through a Riccati solve.
/// On a rank-deficient estimate or a failed solve the previous controller
/// is retained and the epoch is marked not-updated.
///
/// Returns the stitched trajectory, the per-epoch log, and the running
/// regret against the true plant's optimal average cost.
pub fn run_algorithm1(
    config: &EpochConfig,
    truth: &LinearSystem,
    map: &mut dyn UnmodeledMap,
    costs: &CostMatrices,
    rng: RngSpec,
    num_epochs: usize,
) -> Result<(Trajectory, Vec<EpochState>, RegretRecord), ControlError> {
    run_algorithm1_with_exploration(
        config,
        truth,
        map,
        costs,
        rng,
        num_epochs,
        ExplorationKind::SpectralLines,
    )
}

/// [`run_algorithm1`] with a selectable exploration signal, so matched
/// spectral-line and Gaussian arms share every other mechanism.
pub fn run_algorithm1_with_exploration(
    config: &EpochConfig,
    truth: &LinearSystem,
    map: &mut dyn UnmodeledMap,
    costs: &CostMatrices,
    rng: RngSpec,
    num_epochs: usize,
    exploration: ExplorationKind,
) -> Result<(Trajectory, Vec<EpochState>, RegretRecord), ControlError> {
    let n = truth.state_dim();
    let m = truth.input_dim();
    assert_eq!(m, 1, "the doubling loop drives a single input channel");
    let d = n + m;
    let line_count = d.div_ceil(2);
    assert!(
        config.frequency_pool.len() >= line_count,
        "need at least {line_count} candidate frequencies, got {}",
        config.frequency_pool.len()
    );
    assert!(config.t0 >= 2 * d, "base epoch length {} too short for d = {d}", config.t0);

    // Baseline: optimal average cost on the true plant.
    let ideal = solve_dare(&truth.a, &truth.b, &costs.q, &costs.r, 1e-10, 100_000)?;
    let j_star = optimal_average_cost(&ideal.p, truth.sigma);

    let (k0, a0_hat) =
        perturbed_initial_controller(truth, costs, config.perturb_scale, rng.substream(2))?;

    let mut noise_stream = gaussian_stream(rng.substream(0));
    let mut exploration_stream = gaussian_stream(rng.substream(1));

    let mut trajectory = Trajectory {
        states: vec![vec![0.0; n]],
        inputs: Vec::new(),
        unmodeled: Vec::new(),
        noises: Vec::new(),
    };
    let mut epochs: Vec<EpochState> = Vec::with_capacity(num_epochs);
    if num_epochs == 0 {
        let record = regret(&trajectory, costs, j_star);
        return Ok((trajectory, epochs, record));
    }

    let mut controller = k0;
    // Model used only for optional frequency optimization.
    let mut model = LinearSystem::new(a0_hat, truth.b.clone(), truth.sigma);
    let mut offset = 0usize;

    for epoch_index in 0..num_epochs {
        let epoch_length = config.t0 << epoch_index;
        let amplitude_cap =
            config.base_amplitude * (epoch_length as f64).powf(config.amp_exponent);
        let frequencies =
            choose_frequencies(config, &model, line_count, epoch_length, amplitude_cap);
        let amplitudes = vec![amplitude_cap; line_count];
        let tone = crate::excitation::MultiSine::new(frequencies.clone(), amplitudes.clone());

        // Gaussian arm: variance matched to the multi-sine's mean power.
        let matched_std =
            (amplitudes.iter().map(|a| a * a).sum::<f64>() / 2.0).sqrt();
        let exploration_noise: Vec<f64> = match exploration {
            ExplorationKind::SpectralLines => Vec::new(),
            ExplorationKind::Gaussian => {
                (0..epoch_length).map(|_| matched_std * exploration_stream.gaussian()).collect()
            }
        };

        let gain = controller.clone();
        let start = offset;
        let mut policy = |k_local: usize, x: &[f64]| -> Vec<f64> {
            let mut u = gain.mul_vec(x);
            let probe = match exploration {
                ExplorationKind::SpectralLines => tone.sample(start + k_local),
                ExplorationKind::Gaussian => exploration_noise[k_local],
            };
            u[0] += probe;
            u
        };
        let segment = simulate_with(
            truth,
            map,
            &mut policy,
            epoch_length,
            &mut noise_stream,
            &trajectory.final_state(),
            DEFAULT_STATE_GUARD,
        )?;

        // Re-estimate from exactly this epoch's samples, then update the
        // controller if the Riccati solve succeeds.
        let mut estimate = None;
        let mut riccati_residual = f64::NAN;
        let mut closed_loop_radius = f64::NAN;
        let mut updated = false;
        if let Ok(est) = least_squares(&segment) {
            if let Ok(solution) =
                solve_dare(&est.a_hat, &est.b_hat, &costs.q, &costs.r, 1e-10, 100_000)
            {
                let closed = &est.a_hat + &(&est.b_hat * &solution.k);
                closed_loop_radius = radius_or_unstable(&closed);
                riccati_residual = solution.riccati_residual;
                controller = solution.k;
                model = LinearSystem::new(est.a_hat.clone(), est.b_hat.clone(), truth.sigma);
                updated = true;
            }
            estimate = Some((est.a_hat, est.b_hat));
        }

        trajectory.extend(segment);
        offset += epoch_length;
        epochs.push(EpochState {
            epoch_index,
            epoch_length,
            amplitude_cap,
            frequencies,
            amplitudes,
            controller: gain,
            estimate,
            riccati_residual,
            closed_loop_radius,
            updated,
        });
    }

    let record = regret(&trajectory, costs, j_star);
    Ok((trajectory, epochs, record))
}

/// Closed-loop state scale of the epoch-0 policy on a noise-free copy of
/// the plant: run the perturbed initial controller plus the snapped epoch-0
/// multi-sine for `steps` steps and return the pooled root-mean-square of
/// the visited state coordinates (start state excluded).
///
/// The controller comes from `rng.substream(2)`, exactly as in
/// [`run_algorithm1_with_exploration`] on the same `rng`, so a noise level
/// calibrated from this probe refers to the gain the real run starts from.
pub fn pilot_state_rms(
    config: &EpochConfig,
    truth: &LinearSystem,
    map: &mut dyn UnmodeledMap,
    costs: &CostMatrices,
    rng: RngSpec,
    steps: usize,
) -> Result<f64, ControlError> {
    assert!(steps >= 1, "the pilot needs at least one step");
    let n = truth.state_dim();
    assert_eq!(truth.input_dim(), 1, "the doubling loop drives a single input channel");
    let line_count = (n + 1).div_ceil(2);
    assert!(
        config.frequency_pool.len() >= line_count,
        "need at least {line_count} candidate frequencies, got {}",
        config.frequency_pool.len()
    );

    let quiet = truth.with_sigma(0.0);
    let (k0, a0_hat) =
        perturbed_initial_controller(&quiet, costs, config.perturb_scale, rng.substream(2))?;
    let model = LinearSystem::new(a0_hat, quiet.b.clone(), 0.0);
    let amplitude_cap = config.base_amplitude * (config.t0 as f64).powf(config.amp_exponent);
    let frequencies = choose_frequencies(config, &model, line_count, config.t0, amplitude_cap);
    let tone =
        crate::excitation::MultiSine::new(frequencies, vec![amplitude_cap; line_count]);

    let mut policy = |k: usize, x: &[f64]| -> Vec<f64> {
        let mut u = k0.mul_vec(x);
        u[0] += tone.sample(k);
        u
    };
    let mut stream = gaussian_stream(rng.substream(0));
    let traj = simulate_with(
        &quiet,
        map,
        &mut policy,
        steps,
        &mut stream,
        &vec![0.0; n],
        DEFAULT_STATE_GUARD,
    )?;
    let mut sum = 0.0;
    for x in &traj.states[1..] {
        for v in x {
            sum += v * v;
        }
    }
    Ok((sum / (steps * n) as f64).sqrt())
}
