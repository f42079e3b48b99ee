//! Parameter estimation from trajectories: batch least squares, a normalized
//! recursive estimator, and the bound diagnostics that accompany them.

use crate::dynamics::{LinearSystem, Trajectory};
use crate::excitation::{controllability_gramian, gramian, InformationMatrix};
use crate::numerics::{cvec_norm, full_dft, op_norm, sigma_max, sym_eigenvalues, RealMatrix};

/// Batch least-squares estimate with its Gram matrix `Y_T = sum phi phi^T`.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimationResult {
    pub a_hat: RealMatrix,
    pub b_hat: RealMatrix,
    pub gram: RealMatrix,
    pub sample_count: usize,
}

/// Evaluated estimation-error bound, split into the ideal (noise-free,
/// fully-modeled) term and the unmodeled-disturbance term.
///
/// All hidden constants are set to 1, so the report is a relative
/// diagnostic for comparing designs, never an absolute certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub ideal_term: f64,
    pub unmodeled_term: f64,
    pub total: f64,
    pub sample_count: usize,
    pub sigma_min: f64,
}

/// One step of the normalized recursive estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct RecursiveState {
    pub theta: Vec<f64>,
    pub gamma: f64,
}

/// Errors raised by the estimation routines.
#[derive(Debug, Clone, PartialEq)]
pub enum EstimationError {
    /// The regressor Gram matrix is numerically rank deficient — the input
    /// did not excite the system enough to identify it.
    RankDeficient,
    DimensionMismatch(String),
    /// A matrix that must be positive definite is not.
    NonPositiveDefinite,
}

impl std::fmt::Display for EstimationError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EstimationError::RankDeficient => {
                write!(f, "regressor Gram matrix is numerically rank deficient")
            }
            EstimationError::DimensionMismatch(msg) => write!(f, "dimension mismatch: {msg}"),
            EstimationError::NonPositiveDefinite => {
                write!(f, "matrix is not positive definite")
            }
        }
    }
}

impl std::error::Error for EstimationError {}

/// Least-squares solve of the stacked system `Phi Theta = X` by Householder
/// QR with column pivoting. `phi_rows` are the rows of `Phi` (T x d),
/// `rhs_rows` the rows of `X` (T x n). Returns `Theta` (d x n).
fn qr_solve_pivoted(phi_rows: &[Vec<f64>], rhs_rows: &[Vec<f64>]) -> RealMatrix {
    let t_len = phi_rows.len();
    let d = phi_rows[0].len();
    let n_rhs = rhs_rows[0].len();
    debug_assert!(t_len >= d);

    // Working matrix [Phi | X], column-major for cheap column swaps.
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(d + n_rhs);
    for j in 0..d {
        cols.push(phi_rows.iter().map(|r| r[j]).collect());
    }
    for j in 0..n_rhs {
        cols.push(rhs_rows.iter().map(|r| r[j]).collect());
    }
    let mut perm: Vec<usize> = (0..d).collect();

    for step in 0..d {
        // Pivot: bring the remaining column with the largest tail norm in.
        let (pivot, _) = (step..d)
            .map(|j| (j, cols[j][step..].iter().map(|v| v * v).sum::<f64>()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("pivot search over a nonempty range");
        cols.swap(step, pivot);
        perm.swap(step, pivot);

        // Householder reflector for rows step.. of the pivot column.
        let norm = cols[step][step..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if cols[step][step] >= 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = cols[step][step..].to_vec();
        v[0] -= alpha;
        let vsq: f64 = v.iter().map(|x| x * x).sum();
        if vsq == 0.0 {
            continue;
        }
        let beta = 2.0 / vsq;
        for col in cols.iter_mut().skip(step) {
            let dot: f64 = v.iter().zip(&col[step..]).map(|(a, b)| a * b).sum();
            let scale = beta * dot;
            for (vi, ci) in v.iter().zip(&mut col[step..]) {
                *ci -= scale * vi;
            }
        }
    }

    // Back-substitution: R theta_perm = Q^T X (top d rows).
    let mut theta = RealMatrix::zeros(d, n_rhs);
    for rhs in 0..n_rhs {
        let mut sol = vec![0.0; d];
        for i in (0..d).rev() {
            let mut acc = cols[d + rhs][i];
            for j in i + 1..d {
                acc -= cols[j][i] * sol[j];
            }
            sol[i] = acc / cols[i][i];
        }
        for j in 0..d {
            theta[(perm[j], rhs)] = sol[j];
        }
    }
    theta
}

/// Batch least squares over a trajectory: minimizes
/// `sum_k || x_{k+1} - A x_k - B u_k ||^2` and splits the stacked solution
/// into `(A_hat, B_hat)`.
pub fn least_squares(traj: &Trajectory) -> Result<EstimationResult, EstimationError> {
    let t_len = traj.len();
    let n = traj.state_dim();
    let m = traj.input_dim();
    let d = n + m;
    assert!(t_len >= d, "least squares needs at least n + m = {d} samples, got {t_len}");

    let phis = traj.regressors();
    let mut gram = RealMatrix::zeros(d, d);
    for phi in &phis {
        for i in 0..d {
            for j in 0..=i {
                gram[(i, j)] += phi[i] * phi[j];
            }
        }
    }
    for i in 0..d {
        for j in i + 1..d {
            gram[(i, j)] = gram[(j, i)];
        }
    }

    let eigs = sym_eigenvalues(&gram);
    let smallest = eigs[0].max(0.0);
    if smallest <= 1e-10 * gram.trace() {
        return Err(EstimationError::RankDeficient);
    }

    let targets: Vec<Vec<f64>> = (1..=t_len).map(|k| traj.states[k].clone()).collect();
    let theta = qr_solve_pivoted(&phis, &targets);

    let a_hat = RealMatrix::from_fn(n, n, |i, j| theta[(j, i)]);
    let b_hat = RealMatrix::from_fn(n, m, |i, j| theta[(n + j, i)]);
    Ok(EstimationResult { a_hat, b_hat, gram, sample_count: t_len })
}

/// `max(||A_hat - A||, ||B_hat - B||)` in operator norms.
pub fn estimation_error(
    result: &EstimationResult,
    truth: &LinearSystem,
) -> Result<f64, EstimationError> {
    if result.a_hat.rows() != truth.a.rows() || result.a_hat.cols() != truth.a.cols() {
        return Err(EstimationError::DimensionMismatch(format!(
            "A_hat is {}x{}, truth is {}x{}",
            result.a_hat.rows(),
            result.a_hat.cols(),
            truth.a.rows(),
            truth.a.cols()
        )));
    }
    if result.b_hat.rows() != truth.b.rows() || result.b_hat.cols() != truth.b.cols() {
        return Err(EstimationError::DimensionMismatch(format!(
            "B_hat is {}x{}, truth is {}x{}",
            result.b_hat.rows(),
            result.b_hat.cols(),
            truth.b.rows(),
            truth.b.cols()
        )));
    }
    let err_a = op_norm(&(&result.a_hat - &truth.a));
    let err_b = op_norm(&(&result.b_hat - &truth.b));
    Ok(err_a.max(err_b))
}

/// Normalized recursive (gradient) estimator
/// `theta_{k+1} = theta_k - gamma phi_k (theta_k^T phi_k - y_k) / (1 + phi_k^T phi_k)`.
///
/// Returns the state after each `(phi, y)` pair; `theta0` is the start.
pub fn recursive_estimate(
    data: &[(Vec<f64>, f64)],
    theta0: &[f64],
    gamma: f64,
) -> Vec<RecursiveState> {
    assert!(
        gamma > 0.0 && gamma < 2.0,
        "normalized gradient gain must lie in (0, 2), got {gamma}"
    );
    let mut theta = theta0.to_vec();
    let mut out = Vec::with_capacity(data.len());
    for (phi, y) in data {
        assert_eq!(phi.len(), theta.len(), "regressor/estimate dimension mismatch");
        let prediction: f64 = theta.iter().zip(phi).map(|(t, p)| t * p).sum();
        let energy: f64 = phi.iter().map(|p| p * p).sum();
        let step = gamma * (prediction - y) / (1.0 + energy);
        for (t, p) in theta.iter_mut().zip(phi) {
            *t -= step * p;
        }
        out.push(RecursiveState { theta: theta.clone(), gamma });
    }
    out
}

/// Log-determinant of a symmetric positive definite matrix via Cholesky.
fn log_det_spd(m: &RealMatrix) -> Option<f64> {
    let chol = m.cholesky()?;
    let mut acc = 0.0;
    for i in 0..chol.rows() {
        let diag = chol[(i, i)];
        if diag <= 0.0 {
            return None;
        }
        acc += diag.ln();
    }
    Some(2.0 * acc)
}

/// Self-normalized martingale bound
/// `sigma sqrt(8 d ln(5 det(Y)^{1/(2d)} det(V)^{-1/(2d)} / delta^{1/d}))`
/// where `Y = gram + V` is the regularized Gram matrix.
pub fn martingale_bound(
    gram_plus_v: &RealMatrix,
    v: &RealMatrix,
    sigma: f64,
    delta: f64,
    d: usize,
) -> Result<f64, EstimationError> {
    assert!(delta > 0.0 && delta <= 1.0, "confidence level must lie in (0, 1], got {delta}");
    assert!(sigma >= 0.0, "noise scale must be nonnegative");
    assert_eq!(gram_plus_v.rows(), d, "regularized Gram must be {d}x{d}");
    assert_eq!(v.rows(), d, "regularizer must be {d}x{d}");
    let log_det_y = log_det_spd(gram_plus_v).ok_or(EstimationError::NonPositiveDefinite)?;
    let log_det_v = log_det_spd(v).ok_or(EstimationError::NonPositiveDefinite)?;
    let df = d as f64;
    let log_arg = 5f64.ln() + (log_det_y - log_det_v) / (2.0 * df) - delta.ln() / df;
    Ok(sigma * (8.0 * df * log_arg).sqrt())
}

/// Deterministic high-probability upper bound on the Gram spectrum:
/// `(sigma^2 T tr(G_{T-1}(A)) + T u_M^2 tr(G_{T-1}(A, B)) + T u_M^2) / delta`
/// with `G` the partial-sum Gramians.
pub fn deterministic_gram_upper_bound(
    system: &LinearSystem,
    t_len: usize,
    u_max: f64,
    delta: f64,
) -> f64 {
    assert!(delta > 0.0 && delta < 1.0, "confidence level must lie in (0, 1), got {delta}");
    assert!(t_len >= 1, "horizon must be positive");
    let tf = t_len as f64;
    let state_tr = gramian(&system.a, t_len - 1).trace();
    let input_tr = controllability_gramian(&system.a, &system.b, t_len - 1).trace();
    let sig2 = system.sigma * system.sigma;
    (sig2 * tf * state_tr + tf * u_max * u_max * input_tr + tf * u_max * u_max) / delta
}

/// Estimation-error bound split into the ideal term `sqrt(1/(T sigma_min^2))`
/// and the unmodeled term
/// `(1/(T sigma_min^2)) sum_k (||phi_dft_k|| ||w_dft_k|| + ||w_dft_k||/sqrt(T))`
/// over normalized DFTs `(1/T) * DFT` of the recorded regressors and
/// unmodeled disturbances.
pub fn theorem_bound(info: &InformationMatrix, traj: &Trajectory, t_len: usize) -> BoundReport {
    assert!(t_len >= 1, "horizon must be positive");
    assert!(
        traj.len() >= t_len,
        "trajectory has {} steps, bound evaluated over {t_len}",
        traj.len()
    );
    let sigma_min = info.sigma_min;
    assert!(sigma_min > 0.0, "bound undefined for a singular information matrix");
    let tf = t_len as f64;
    let denom = tf * sigma_min * sigma_min;
    let ideal_term = (1.0 / denom).sqrt();

    let phis = traj.regressors();
    let phi_dft = full_dft(&phis[..t_len]);
    let w_dft = full_dft(&traj.unmodeled[..t_len]);
    let mut sum = 0.0;
    for k in 0..t_len {
        let phi_norm = cvec_norm(&phi_dft[k]) / tf;
        let w_norm = cvec_norm(&w_dft[k]) / tf;
        sum += phi_norm * w_norm + w_norm / tf.sqrt();
    }
    let unmodeled_term = sum / denom;
    BoundReport {
        ideal_term,
        unmodeled_term,
        total: ideal_term + unmodeled_term,
        sample_count: t_len,
        sigma_min,
    }
}

/// Operator norm of `sum_k ((1/T) u_dft_k)((1/T) w_dft_k)^*` — the
/// input/disturbance spectral cross term that governs the estimation
/// lower bound. The pairing conjugates the disturbance DFT, so by
/// Parseval the sum equals the time-domain lag-0 cross term
/// `(1/T) sum_t u_t w_t^T`; a plain transpose would instead pair grid
/// point `k` with `-k` and cancel the constant term for white noise.
pub fn cross_term_tau(traj: &Trajectory) -> f64 {
    let t_len = traj.len();
    assert!(t_len >= 1, "cross term of an empty trajectory");
    let m = traj.input_dim();
    let n = traj.state_dim();
    let u_dft = full_dft(&traj.inputs);
    let w_dft = full_dft(&traj.unmodeled);
    let scale = 1.0 / (t_len as f64 * t_len as f64);
    let mut outer = crate::numerics::ComplexMatrix::zeros(m, n);
    for k in 0..t_len {
        for i in 0..m {
            for j in 0..n {
                outer[(i, j)] += u_dft[k][i] * w_dft[k][j].conj() * scale;
            }
        }
    }
    sigma_max(&outer)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{companion_system, simulate, NoUnmodeled};
    use crate::excitation::{multisine_information_matrix, MultiSine};
    use crate::numerics::{vec_norm, RngSpec};
    use proptest::prelude::*;

    /// Trajectory of a noiseless linear recursion under the given inputs.
    fn noiseless_trajectory(system: &LinearSystem, x0: &[f64], inputs: &[Vec<f64>]) -> Trajectory {
        let n = system.state_dim();
        let mut states = vec![x0.to_vec()];
        for u in inputs {
            let x = states.last().unwrap();
            states.push(system.step(x, u));
        }
        Trajectory {
            states,
            inputs: inputs.to_vec(),
            unmodeled: vec![vec![0.0; n]; inputs.len()],
            noises: vec![vec![0.0; n]; inputs.len()],
        }
    }

    fn scalar_system(a: f64, b: f64) -> LinearSystem {
        LinearSystem::new(
            RealMatrix::from_rows(&[vec![a]]),
            RealMatrix::from_rows(&[vec![b]]),
            0.0,
        )
    }

    #[test]
    fn scalar_least_squares_by_hand() {
        // A=0.5, B=1, u = {1, 0, 1} from x0=0: states {0, 1, 0.5, 1.25}.
        let sys = scalar_system(0.5, 1.0);
        let traj = noiseless_trajectory(&sys, &[0.0], &[vec![1.0], vec![0.0], vec![1.0]]);
        assert_eq!(traj.states, vec![vec![0.0], vec![1.0], vec![0.5], vec![1.25]]);
        let est = least_squares(&traj).unwrap();
        assert!((est.a_hat[(0, 0)] - 0.5).abs() < 1e-12);
        assert!((est.b_hat[(0, 0)] - 1.0).abs() < 1e-12);
        assert_eq!(est.sample_count, 3);
    }

    #[test]
    fn noiseless_multisine_identifies_exactly() {
        let sys = companion_system(&[0.048, -0.44, 1.2], 0.0);
        let ms = MultiSine::unit(vec![10.0 / 200.0, 30.0 / 200.0]);
        let traj = simulate(
            &sys,
            &mut NoUnmodeled::new(3),
            &mut |k, _| vec![ms.sample(k)],
            200,
            RngSpec::new(7, 0),
            &[0.0; 3],
        )
        .unwrap();
        let est = least_squares(&traj).unwrap();
        let err = estimation_error(&est, &sys).unwrap();
        assert!(err < 1e-8, "noiseless identification error {err}");
    }

    #[test]
    fn zero_input_is_rank_deficient() {
        let sys = scalar_system(0.5, 1.0);
        let traj = noiseless_trajectory(&sys, &[0.0], &vec![vec![0.0]; 10]);
        assert_eq!(least_squares(&traj), Err(EstimationError::RankDeficient));
    }

    #[test]
    fn estimation_error_by_hand() {
        let sys = companion_system(&[0.048, -0.44, 1.2], 0.0);
        let exact = EstimationResult {
            a_hat: sys.a.clone(),
            b_hat: sys.b.clone(),
            gram: RealMatrix::identity(4),
            sample_count: 4,
        };
        assert_eq!(estimation_error(&exact, &sys).unwrap(), 0.0);

        // A + 0.1 e1 e1^T
        let mut bumped_a = sys.a.clone();
        bumped_a[(0, 0)] += 0.1;
        let bumped = EstimationResult { a_hat: bumped_a, ..exact.clone() };
        assert!((estimation_error(&bumped, &sys).unwrap() - 0.1).abs() < 1e-10);

        // B + v with ||v|| = 0.3
        let mut bumped_b = sys.b.clone();
        let v = [0.3 * (2.0 / 3.0), 0.3 * (2.0 / 3.0), 0.3 * (1.0 / 3.0)];
        for (i, vi) in v.iter().enumerate() {
            bumped_b[(i, 0)] += vi;
        }
        assert!((vec_norm(&v) - 0.3).abs() < 1e-15);
        let bumped = EstimationResult { b_hat: bumped_b, ..exact.clone() };
        assert!((estimation_error(&bumped, &sys).unwrap() - 0.3).abs() < 1e-10);

        let wrong = EstimationResult {
            a_hat: RealMatrix::identity(2),
            b_hat: RealMatrix::zeros(2, 1),
            gram: RealMatrix::identity(3),
            sample_count: 3,
        };
        assert!(matches!(
            estimation_error(&wrong, &sys),
            Err(EstimationError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn recursive_error_halves_on_constant_regressor() {
        // theta_* = 2, phi = 1, gamma = 1: error factor 1/2 per step.
        let data = vec![(vec![1.0], 2.0); 2];
        let states = recursive_estimate(&data, &[0.0], 1.0);
        assert!((states[0].theta[0] - 1.0).abs() < 1e-15);
        assert!((states[1].theta[0] - 1.5).abs() < 1e-15);
        assert_eq!(states[0].gamma, 1.0);
    }

    #[test]
    fn recursive_fixed_point_never_moves() {
        let theta0 = vec![0.7, -1.2];
        let data: Vec<(Vec<f64>, f64)> = (0..20)
            .map(|k| {
                let phi = vec![(k as f64).sin(), (k as f64).cos()];
                let y = 0.7 * phi[0] - 1.2 * phi[1];
                (phi, y)
            })
            .collect();
        for state in recursive_estimate(&data, &theta0, 0.8) {
            assert!((state.theta[0] - 0.7).abs() < 1e-15);
            assert!((state.theta[1] + 1.2).abs() < 1e-15);
        }
    }

    #[test]
    fn recursive_converges_under_alternating_basis() {
        let truth = [3.0, -2.0];
        let data: Vec<(Vec<f64>, f64)> = (0..100)
            .map(|k| {
                let phi = if k % 2 == 0 { vec![1.0, 0.0] } else { vec![0.0, 1.0] };
                let y = truth[0] * phi[0] + truth[1] * phi[1];
                (phi, y)
            })
            .collect();
        let states = recursive_estimate(&data, &[0.0, 0.0], 1.0);
        let last = &states.last().unwrap().theta;
        let err = ((last[0] - truth[0]).powi(2) + (last[1] - truth[1]).powi(2)).sqrt();
        assert!(err < 1e-6, "alternating-basis recursion error {err}");
    }

    #[test]
    fn martingale_bound_by_hand() {
        let v = RealMatrix::identity(1);
        let b = martingale_bound(&v, &v, 1.0, 0.05, 1).unwrap();
        assert!((b - (8.0 * 100f64.ln()).sqrt()).abs() < 1e-12);
        assert!((b - 6.0697).abs() < 1e-4);

        let b1 = martingale_bound(&v, &v, 1.0, 1.0, 1).unwrap();
        assert!((b1 - (8.0 * 5f64.ln()).sqrt()).abs() < 1e-12);
        assert!((b1 - 3.588).abs() < 1e-3);

        let doubled = martingale_bound(&v, &v, 2.0, 0.05, 1).unwrap();
        assert!((doubled - 2.0 * b).abs() < 1e-12);
    }

    #[test]
    fn martingale_bound_grows_with_data() {
        let v = RealMatrix::identity(2);
        let gram_plus = RealMatrix::from_rows(&[vec![11.0, 0.0], vec![0.0, 5.0]]);
        let no_data = martingale_bound(&v, &v, 1.0, 0.1, 2).unwrap();
        let with_data = martingale_bound(&gram_plus, &v, 1.0, 0.1, 2).unwrap();
        assert!(with_data > no_data);
    }

    #[test]
    fn martingale_bound_rejects_indefinite_regularizer() {
        let v = RealMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]]);
        let y = RealMatrix::identity(2);
        assert_eq!(
            martingale_bound(&y, &v, 1.0, 0.1, 2),
            Err(EstimationError::NonPositiveDefinite)
        );
        let zero = RealMatrix::zeros(2, 2);
        assert_eq!(
            martingale_bound(&y, &zero, 1.0, 0.1, 2),
            Err(EstimationError::NonPositiveDefinite)
        );
    }

    #[test]
    fn deterministic_bound_by_hand() {
        let sys = LinearSystem::new(
            RealMatrix::from_rows(&[vec![0.0]]),
            RealMatrix::from_rows(&[vec![1.0]]),
            1.0,
        );
        let b = deterministic_gram_upper_bound(&sys, 10, 1.0, 0.5);
        assert!((b - 60.0).abs() < 1e-12);

        let silent = sys.with_sigma(0.0);
        assert_eq!(deterministic_gram_upper_bound(&silent, 10, 0.0, 0.5), 0.0);

        let halved = deterministic_gram_upper_bound(&sys, 10, 1.0, 0.25);
        assert!((halved - 2.0 * b).abs() < 1e-12);
    }

    fn flat_info(sigma_min: f64) -> InformationMatrix {
        InformationMatrix {
            frequencies: vec![0.0, 0.5],
            matrix: crate::numerics::ComplexMatrix::identity(2),
            sigma_min,
        }
    }

    #[test]
    fn theorem_bound_without_unmodeled_term() {
        let sys = scalar_system(0.5, 1.0);
        let inputs: Vec<Vec<f64>> = (0..200).map(|k| vec![(k as f64 * 0.37).sin()]).collect();
        let traj = noiseless_trajectory(&sys, &[0.0], &inputs);

        let report = theorem_bound(&flat_info(2f64.sqrt()), &traj, 100);
        assert!((report.ideal_term - (1.0 / 200.0_f64).sqrt()).abs() < 1e-12);
        assert!((report.ideal_term - 0.070711).abs() < 1e-6);
        assert_eq!(report.unmodeled_term, 0.0);
        assert!((report.total - report.ideal_term).abs() < 1e-15);

        let doubled = theorem_bound(&flat_info(2f64.sqrt()), &traj, 200);
        assert!((report.total / doubled.total - 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn theorem_bound_unmodeled_term_is_linear_in_w() {
        let sys = scalar_system(0.5, 1.0);
        let inputs: Vec<Vec<f64>> = (0..64).map(|k| vec![(k as f64 * 0.61).cos()]).collect();
        let mut traj = noiseless_trajectory(&sys, &[0.0], &inputs);
        for (k, w) in traj.unmodeled.iter_mut().enumerate() {
            w[0] = 0.05 * (k as f64 * 0.23).sin();
        }
        let base = theorem_bound(&flat_info(1.0), &traj, 64);
        assert!(base.unmodeled_term > 0.0);
        assert!((base.total - base.ideal_term - base.unmodeled_term).abs() < 1e-15);

        let mut scaled = traj.clone();
        for w in scaled.unmodeled.iter_mut() {
            w[0] *= 3.0;
        }
        let tripled = theorem_bound(&flat_info(1.0), &scaled, 64);
        assert!(
            (tripled.unmodeled_term - 3.0 * base.unmodeled_term).abs()
                < 1e-12 * base.unmodeled_term.max(1.0),
            "unmodeled term must scale linearly with w"
        );
        assert_eq!(tripled.ideal_term, base.ideal_term);
    }

    #[test]
    fn cross_term_vanishes_without_disturbance() {
        let sys = scalar_system(0.5, 1.0);
        let inputs: Vec<Vec<f64>> = (0..32).map(|k| vec![(k as f64 * 0.7).sin()]).collect();
        let traj = noiseless_trajectory(&sys, &[0.0], &inputs);
        assert!(cross_term_tau(&traj) < 1e-14);
    }

    #[test]
    fn cross_term_is_linear_in_input() {
        let sys = scalar_system(0.5, 1.0);
        let inputs: Vec<Vec<f64>> = (0..32).map(|k| vec![(k as f64 * 0.7).sin()]).collect();
        let mut traj = noiseless_trajectory(&sys, &[0.0], &inputs);
        for (k, w) in traj.unmodeled.iter_mut().enumerate() {
            w[0] = 0.1 * (k as f64 * 1.3).cos();
        }
        let tau = cross_term_tau(&traj);
        assert!(tau > 0.0);

        let mut scaled = traj.clone();
        for u in scaled.inputs.iter_mut() {
            u[0] *= 2.5;
        }
        let tau_scaled = cross_term_tau(&scaled);
        assert!((tau_scaled - 2.5 * tau).abs() < 1e-12 * tau.max(1.0));
    }

    #[test]
    fn cross_term_matches_time_domain_by_parseval() {
        // The conjugated frequency pairing equals the lag-0 time-domain
        // cross term (1/T) sum_t u_t w_t^T.
        let sys = scalar_system(0.5, 1.0);
        let t_len = 64;
        let inputs: Vec<Vec<f64>> =
            (0..t_len).map(|k| vec![(k as f64 * 0.7).sin() + 0.3]).collect();
        let mut traj = noiseless_trajectory(&sys, &[0.2], &inputs);
        for (k, w) in traj.unmodeled.iter_mut().enumerate() {
            w[0] = 0.4 * (k as f64 * 1.3).cos() + 0.1;
        }
        let mut acc = 0.0;
        for (u, w) in traj.inputs.iter().zip(&traj.unmodeled) {
            acc += u[0] * w[0];
        }
        let time_domain = (acc / t_len as f64).abs();
        let tau = cross_term_tau(&traj);
        assert!(
            (tau - time_domain).abs() <= 1e-12 * time_domain.max(1.0),
            "frequency-domain tau {tau} vs time-domain {time_domain}"
        );
    }

    #[test]
    fn recursive_passes_reach_batch_solution() {
        // On deterministic PE data the normalized recursion converges to
        // the (exact) least-squares solution after repeated passes.
        let sys = scalar_system(0.7, 1.0);
        let inputs: Vec<Vec<f64>> = (0..40)
            .map(|k| vec![(std::f64::consts::PI * k as f64 / 2.0).cos()])
            .collect();
        let traj = noiseless_trajectory(&sys, &[0.0], &inputs);
        let batch = least_squares(&traj).unwrap();

        let single_pass: Vec<(Vec<f64>, f64)> = traj
            .regressors()
            .into_iter()
            .zip(traj.states.iter().skip(1))
            .map(|(phi, x_next)| (phi, x_next[0]))
            .collect();
        let mut data = Vec::new();
        for _ in 0..5000 {
            data.extend(single_pass.iter().cloned());
        }
        let states = recursive_estimate(&data, &[0.0, 0.0], 1.0);
        let theta = &states.last().unwrap().theta;
        assert!((theta[0] - batch.a_hat[(0, 0)]).abs() < 1e-5);
        assert!((theta[1] - batch.b_hat[(0, 0)]).abs() < 1e-5);
    }

    #[test]
    fn multisine_bound_tracks_design_strength() {
        // A design with larger sigma_min yields a smaller ideal term at
        // the same horizon.
        let sys = scalar_system(0.5, 1.0);
        let strong = multisine_information_matrix(&sys, &[0.125], &[2.0]).unwrap();
        let weak = multisine_information_matrix(&sys, &[0.125], &[0.4]).unwrap();
        let inputs: Vec<Vec<f64>> = (0..100).map(|_| vec![0.0]).collect();
        let traj = noiseless_trajectory(&sys, &[0.0], &inputs);
        let strong_report = theorem_bound(&strong, &traj, 100);
        let weak_report = theorem_bound(&weak, &traj, 100);
        assert!(strong_report.total < weak_report.total);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn normal_equation_residual_is_small(
            seed in 0u64..1000,
            n in 1usize..4,
            m in 1usize..3,
            t_len in 12usize..48,
        ) {
            let mut stream = crate::numerics::gaussian_stream(RngSpec::new(seed, 0));
            let scale = 0.6 / n as f64;
            let a = RealMatrix::from_fn(n, n, |_, _| scale * stream.gaussian());
            let b = RealMatrix::from_fn(n, m, |_, _| stream.gaussian());
            let sys = LinearSystem::new(a, b, 0.0);
            let inputs: Vec<Vec<f64>> =
                (0..t_len).map(|_| (0..m).map(|_| stream.gaussian()).collect()).collect();
            let traj = noiseless_trajectory(&sys, &vec![0.0; n], &inputs);
            if let Ok(est) = least_squares(&traj) {
                let d = n + m;
                // gram * theta - sum phi x_{k+1}^T
                let theta = RealMatrix::from_fn(d, n, |r, c| {
                    if r < n { est.a_hat[(c, r)] } else { est.b_hat[(c, r - n)] }
                });
                let mut rhs = RealMatrix::zeros(d, n);
                for (phi, x_next) in traj.regressors().iter().zip(traj.states.iter().skip(1)) {
                    for i in 0..d {
                        for j in 0..n {
                            rhs[(i, j)] += phi[i] * x_next[j];
                        }
                    }
                }
                let residual = &(&est.gram * &theta) - &rhs;
                prop_assert!(
                    residual.frobenius_norm() <= 1e-8 * est.gram.frobenius_norm(),
                    "residual {} vs gram norm {}",
                    residual.frobenius_norm(),
                    est.gram.frobenius_norm()
                );
            }
        }
    }
}
