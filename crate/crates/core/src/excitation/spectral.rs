//! Spectral-line estimation, transfer amplitudes, the expected information
//! matrix, and excitation diagnostics.

use num_complex::Complex64;

use crate::dynamics::LinearSystem;
use crate::numerics::{
    complex_solve, sigma_min as complex_sigma_min, sym_eigenvalues, ComplexMatrix, RealMatrix,
    RngSpec,
};

use super::signals::InputSignal;
use super::ExcitationError;

/// A finite-window spectral-line estimate
/// `(1/(S+1)) sum_{k=i}^{i+S} y_k e^{-j 2 pi w0 k}` (global time index).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralLineEstimate {
    /// Frequency in cycles per step.
    pub frequency: f64,
    /// One complex amplitude per sequence component.
    pub amplitude: Vec<Complex64>,
    /// Window `(i, S)`: samples `i ..= i + S`.
    pub window: (usize, usize),
    /// Scale of the deviation from the deterministic amplitude, when known
    /// (set by Monte-Carlo estimation; 0 for a plain estimate).
    pub empirical_deviation: f64,
}

/// Columns of spectral-line amplitudes at chosen frequencies; its smallest
/// singular value governs identifiability.
#[derive(Debug, Clone, PartialEq)]
pub struct InformationMatrix {
    pub frequencies: Vec<f64>,
    pub matrix: ComplexMatrix,
    pub sigma_min: f64,
}

/// Eigen-extremes of a regressor Gram sum over a window, with the finite
/// excitation verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcitationReport {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub window: (usize, usize),
    /// Finite-excitation constants: the same eigen-extremes, exported under
    /// their role as the lower/upper Gram bounds.
    pub rho1: f64,
    pub rho2: f64,
    pub verdict: bool,
}

/// Is `f` representable as `q/(S+1)` for integer `q`?
fn on_grid(f: f64, window_len: usize) -> bool {
    let scaled = f * window_len as f64;
    (scaled - scaled.round()).abs() <= 1e-9
}

/// Spectral-line estimate of a vector-valued sequence over the window
/// `[i, i+S]` at frequency `w0` (cycles per step, signed).
///
/// The frequency must lie on the window grid `q/(S+1)` unless
/// `allow_leakage` is set: off-grid estimation is biased by leakage, which
/// callers must opt into explicitly.
pub fn estimate_spectral_line(
    sequence: &[Vec<f64>],
    w0: f64,
    i: usize,
    s: usize,
    allow_leakage: bool,
) -> Result<SpectralLineEstimate, ExcitationError> {
    let end = i.checked_add(s).expect("window end overflows");
    assert!(
        end < sequence.len(),
        "window [{i}, {end}] exceeds the sequence length {}",
        sequence.len()
    );
    if !allow_leakage && !on_grid(w0, s + 1) {
        return Err(ExcitationError::FrequencyOffGrid { frequency: w0, window_len: s + 1 });
    }
    let dim = sequence[i].len();
    let mut acc = vec![Complex64::new(0.0, 0.0); dim];
    for k in i..=end {
        let angle = -2.0 * std::f64::consts::PI * w0 * k as f64;
        let twiddle = Complex64::new(angle.cos(), angle.sin());
        for (a, &x) in acc.iter_mut().zip(&sequence[k]) {
            *a += twiddle * x;
        }
    }
    let scale = 1.0 / (s + 1) as f64;
    for a in &mut acc {
        *a *= scale;
    }
    Ok(SpectralLineEstimate {
        frequency: w0,
        amplitude: acc,
        window: (i, s),
        empirical_deviation: 0.0,
    })
}

/// Scalar-sequence convenience wrapper around [`estimate_spectral_line`].
pub fn estimate_spectral_line_scalar(
    sequence: &[f64],
    w0: f64,
    i: usize,
    s: usize,
    allow_leakage: bool,
) -> Result<Complex64, ExcitationError> {
    let wrapped: Vec<Vec<f64>> = sequence.iter().map(|&x| vec![x]).collect();
    Ok(estimate_spectral_line(&wrapped, w0, i, s, allow_leakage)?.amplitude[0])
}

/// Steady-state regressor amplitude at frequency `w0` for input amplitude
/// `u_amp`: stacks `(e^{j 2 pi w0} I - A)^{-1} B u_amp` over `u_amp`.
pub fn transfer_amplitude(
    system: &LinearSystem,
    w0: f64,
    u_amp: &[Complex64],
) -> Result<Vec<Complex64>, ExcitationError> {
    let n = system.state_dim();
    let m = system.input_dim();
    assert_eq!(u_amp.len(), m, "one input amplitude per input channel");
    let angle = 2.0 * std::f64::consts::PI * w0;
    let z = Complex64::new(angle.cos(), angle.sin());
    let mut zia = system.a.scale(-1.0).to_complex();
    for i in 0..n {
        zia[(i, i)] += z;
    }
    let b = system.b.to_complex();
    let rhs = b.mul_vec(u_amp);
    let x_amp = complex_solve(&zia, &rhs)
        .map_err(|_| ExcitationError::ResonantFrequency { frequency: w0 })?;
    let mut out = x_amp;
    out.extend_from_slice(u_amp);
    Ok(out)
}

/// Expected information matrix: column `j` is the transfer amplitude at
/// `frequencies[j]` under input amplitude `u_amps[j]`. Needs exactly
/// `n + m` pairwise-distinct frequencies.
pub fn information_matrix(
    system: &LinearSystem,
    frequencies: &[f64],
    u_amps: &[Vec<Complex64>],
) -> Result<InformationMatrix, ExcitationError> {
    let d = system.regressor_dim();
    assert_eq!(frequencies.len(), d, "need d = n + m frequencies");
    assert_eq!(u_amps.len(), d, "need one input amplitude per frequency");
    for (i, f) in frequencies.iter().enumerate() {
        for g in &frequencies[..i] {
            if (f - g).abs() <= 1e-12 {
                return Err(ExcitationError::DuplicateFrequency { frequency: *f });
            }
        }
    }
    let mut matrix = ComplexMatrix::zeros(d, d);
    for (j, (f, amp)) in frequencies.iter().zip(u_amps).enumerate() {
        let col = transfer_amplitude(system, *f, amp)?;
        matrix.set_col(j, &col);
    }
    let sigma_min = complex_sigma_min(&matrix);
    Ok(InformationMatrix { frequencies: frequencies.to_vec(), matrix, sigma_min })
}

/// Information matrix of a real multi-sine: each cosine at `f_j` contributes
/// the conjugate line pair `+/- f_j` with input amplitude `M_j / 2` each
/// (a line at exactly 0 or 1/2 is unpaired and carries `M_j`). The first
/// `n + m` lines, in pair order, form the columns.
pub fn multisine_information_matrix(
    system: &LinearSystem,
    frequencies: &[f64],
    amplitudes: &[f64],
) -> Result<InformationMatrix, ExcitationError> {
    assert_eq!(frequencies.len(), amplitudes.len(), "one amplitude per frequency");
    let d = system.regressor_dim();
    let mut line_freqs = Vec::with_capacity(2 * frequencies.len());
    let mut line_amps: Vec<Vec<Complex64>> = Vec::with_capacity(2 * frequencies.len());
    for (f, m) in frequencies.iter().zip(amplitudes) {
        let unpaired = *f == 0.0 || (*f - 0.5).abs() <= 1e-12;
        if unpaired {
            line_freqs.push(*f);
            line_amps.push(vec![Complex64::new(*m, 0.0)]);
        } else {
            line_freqs.push(*f);
            line_amps.push(vec![Complex64::new(m / 2.0, 0.0)]);
            line_freqs.push(-*f);
            line_amps.push(vec![Complex64::new(m / 2.0, 0.0)]);
        }
    }
    assert!(
        line_freqs.len() >= d,
        "multi-sine supplies {} spectral lines, need {d}",
        line_freqs.len()
    );
    line_freqs.truncate(d);
    line_amps.truncate(d);
    information_matrix(system, &line_freqs, &line_amps)
}

/// Eigen-extremes of `sum_k phi_k phi_k^T` over the supplied regressors,
/// reported against the finite-excitation tolerance `1e-10`.
pub fn finite_excitation_check(phis: &[Vec<f64>]) -> ExcitationReport {
    assert!(!phis.is_empty(), "excitation check needs a nonempty window");
    let d = phis[0].len();
    let mut gram = RealMatrix::zeros(d, d);
    for phi in phis {
        assert_eq!(phi.len(), d, "ragged regressor window");
        for i in 0..d {
            for j in 0..d {
                gram[(i, j)] += phi[i] * phi[j];
            }
        }
    }
    let eigs = sym_eigenvalues(&gram);
    let lambda_min = eigs[0].max(0.0);
    let lambda_max = eigs[eigs.len() - 1];
    ExcitationReport {
        lambda_min,
        lambda_max,
        window: (0, phis.len() - 1),
        rho1: lambda_min,
        rho2: lambda_max,
        verdict: lambda_min > 1e-10,
    }
}

/// Excitation lower bound `sigma_min(info)^2 / (2n)` on the Gram spectrum.
pub fn pe_lower_bound(info: &InformationMatrix, n: usize) -> f64 {
    assert!(n >= 1, "state dimension must be positive");
    info.sigma_min * info.sigma_min / (2.0 * n as f64)
}

/// Partial-sum Gramian `sum_{i=0}^{k} A^i (A^i)^T`.
pub fn gramian(a: &RealMatrix, k: usize) -> RealMatrix {
    assert!(a.is_square(), "Gramian of a non-square matrix");
    let n = a.rows();
    let mut power = RealMatrix::identity(n);
    let mut sum = RealMatrix::zeros(n, n);
    for i in 0..=k {
        sum = &sum + &(&power * &power.transpose());
        if i < k {
            power = a * &power;
        }
    }
    sum
}

/// Partial-sum controllability Gramian `sum_{i=0}^{k} A^i B B^T (A^i)^T`.
pub fn controllability_gramian(a: &RealMatrix, b: &RealMatrix, k: usize) -> RealMatrix {
    assert!(a.is_square(), "Gramian of a non-square matrix");
    assert_eq!(a.rows(), b.rows(), "A and B row counts differ");
    let n = a.rows();
    let mut reachable = b.clone();
    let mut sum = RealMatrix::zeros(n, n);
    for i in 0..=k {
        sum = &sum + &(&reachable * &reachable.transpose());
        if i < k {
            reachable = a * &reachable;
        }
    }
    sum
}

/// Monte-Carlo scale of the spectral-line deviation: the pooled sample
/// standard deviation (real and imaginary parts together) of
/// `sqrt(S+1) * (line estimate - deterministic amplitude)` across `reps`
/// independent rebindings of the signal.
pub fn empirical_radius(
    signal: &dyn InputSignal,
    w0: f64,
    s: usize,
    reps: usize,
    rng: RngSpec,
) -> f64 {
    assert!(reps >= 30, "radius estimation needs at least 30 replications");
    assert!(on_grid(w0, s + 1), "radius estimation requires an on-grid frequency");
    let truth = signal.mean_line_amplitude(w0);
    let scale = ((s + 1) as f64).sqrt();
    let mut deviations = Vec::with_capacity(2 * reps);
    for rep in 0..reps {
        let bound = signal.rebind(rng.substream(rep as u64));
        let seq = bound.generate(s + 1);
        let line = estimate_spectral_line_scalar(&seq, w0, 0, s, false)
            .expect("frequency checked on-grid above");
        let dev = (line - truth) * scale;
        deviations.push(dev.re);
        deviations.push(dev.im);
    }
    let mean = deviations.iter().sum::<f64>() / deviations.len() as f64;
    let var = deviations.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
        / (deviations.len() - 1) as f64;
    var.sqrt()
}

/// Render spectral-line estimates as CSV with columns
/// `freq,re_amp_1..re_amp_d,im_amp_1..im_amp_d,radius`, one row per line.
/// All estimates must share the same component count `d`.
pub fn spectral_report_to_csv(lines: &[SpectralLineEstimate]) -> String {
    let d = lines.first().map_or(0, |l| l.amplitude.len());
    let mut out = String::from("freq");
    for i in 1..=d {
        out.push_str(&format!(",re_amp_{i}"));
    }
    for i in 1..=d {
        out.push_str(&format!(",im_amp_{i}"));
    }
    out.push_str(",radius\n");
    for line in lines {
        assert_eq!(line.amplitude.len(), d, "all estimates must share one dimension");
        out.push_str(&format!("{:.16e}", line.frequency));
        for a in &line.amplitude {
            out.push_str(&format!(",{:.16e}", a.re));
        }
        for a in &line.amplitude {
            out.push_str(&format!(",{:.16e}", a.im));
        }
        out.push_str(&format!(",{:.16e}\n", line.empirical_deviation));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::companion_system;
    use crate::excitation::signals::{MultiSine, WhiteNoiseInput};
    use crate::numerics::vec_norm;

    fn scalar_system(a: f64, b: f64) -> LinearSystem {
        LinearSystem::new(
            RealMatrix::from_rows(&[vec![a]]),
            RealMatrix::from_rows(&[vec![b]]),
            0.0,
        )
    }

    fn cosine_sequence(f: f64, len: usize) -> Vec<f64> {
        (0..len).map(|k| (2.0 * std::f64::consts::PI * f * k as f64).cos()).collect()
    }

    #[test]
    fn on_grid_cosine_line_is_half() {
        let seq = cosine_sequence(5.0 / 64.0, 64);
        let amp = estimate_spectral_line_scalar(&seq, 5.0 / 64.0, 0, 63, false).unwrap();
        assert!((amp - Complex64::new(0.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn orthogonal_frequency_reads_zero() {
        let seq = cosine_sequence(5.0 / 64.0, 64);
        let amp = estimate_spectral_line_scalar(&seq, 7.0 / 64.0, 0, 63, false).unwrap();
        assert!(amp.norm() < 1e-12);
    }

    #[test]
    fn dc_line_of_constant_sequence() {
        let seq = vec![1.0; 32];
        let amp = estimate_spectral_line_scalar(&seq, 0.0, 0, 31, false).unwrap();
        assert!((amp - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn shifted_window_uses_global_time_index() {
        // With the global-k convention the pure on-grid cosine reads 1/2
        // from any window start (the conjugate term still cancels because
        // 2 f is also on the window grid).
        let seq = cosine_sequence(5.0 / 64.0, 192);
        for &start in &[0usize, 32, 64, 100] {
            let amp =
                estimate_spectral_line_scalar(&seq, 5.0 / 64.0, start, 63, false).unwrap();
            assert!(
                (amp - Complex64::new(0.5, 0.0)).norm() < 1e-12,
                "window start {start} broke the line estimate"
            );
        }
    }

    #[test]
    fn off_grid_rejected_unless_allowed() {
        let seq = cosine_sequence(0.1, 64);
        let err = estimate_spectral_line_scalar(&seq, 0.013, 0, 63, false);
        assert!(matches!(err, Err(ExcitationError::FrequencyOffGrid { .. })));
        let ok = estimate_spectral_line_scalar(&seq, 0.013, 0, 63, true);
        assert!(ok.is_ok());
    }

    #[test]
    fn transfer_amplitude_by_hand() {
        // scalar A=0.5, B=1, w=0: 1/(1-0.5) = 2
        let sys = scalar_system(0.5, 1.0);
        let amp = transfer_amplitude(&sys, 0.0, &[Complex64::new(1.0, 0.0)]).unwrap();
        assert!((amp[0] - Complex64::new(2.0, 0.0)).norm() < 1e-12);
        assert!((amp[1] - Complex64::new(1.0, 0.0)).norm() < 1e-15);

        // scalar A=0, B=1, w=1/2 (z=-1): 1/(-1) = -1
        let sys = scalar_system(0.0, 1.0);
        let amp = transfer_amplitude(&sys, 0.5, &[Complex64::new(1.0, 0.0)]).unwrap();
        assert!((amp[0] - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn transfer_amplitude_zero_state_matrix() {
        // A = 0 (2x2), w=0: (I)^{-1} B u = B u
        let sys = LinearSystem::new(
            RealMatrix::zeros(2, 2),
            RealMatrix::from_rows(&[vec![0.7], vec![-0.2]]),
            0.0,
        );
        let amp = transfer_amplitude(&sys, 0.0, &[Complex64::new(2.0, 0.0)]).unwrap();
        assert!((amp[0] - Complex64::new(1.4, 0.0)).norm() < 1e-12);
        assert!((amp[1] - Complex64::new(-0.4, 0.0)).norm() < 1e-12);
        assert!((amp[2] - Complex64::new(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn resonance_reported() {
        let sys = scalar_system(1.0, 1.0);
        let res = transfer_amplitude(&sys, 0.0, &[Complex64::new(1.0, 0.0)]);
        assert!(matches!(res, Err(ExcitationError::ResonantFrequency { .. })));
    }

    #[test]
    fn information_matrix_by_hand() {
        // scalar A=0, B=1: columns at w=0 -> [1;1], w=1/2 -> [-1;1]
        let sys = scalar_system(0.0, 1.0);
        let unit = vec![Complex64::new(1.0, 0.0)];
        let info =
            information_matrix(&sys, &[0.0, 0.5], &[unit.clone(), unit]).unwrap();
        assert!((info.matrix[(0, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((info.matrix[(0, 1)] - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        assert!((info.matrix[(1, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((info.matrix[(1, 1)] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((info.sigma_min - 2f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn zero_amplitudes_carry_no_information() {
        let sys = scalar_system(0.3, 1.0);
        let zero = vec![Complex64::new(0.0, 0.0)];
        let info =
            information_matrix(&sys, &[0.1, 0.2], &[zero.clone(), zero]).unwrap();
        assert!(info.sigma_min.abs() < 1e-12);
    }

    #[test]
    fn duplicate_frequency_rejected() {
        let sys = scalar_system(0.3, 1.0);
        let unit = vec![Complex64::new(1.0, 0.0)];
        let err = information_matrix(&sys, &[0.1, 0.1], &[unit.clone(), unit]);
        assert!(matches!(err, Err(ExcitationError::DuplicateFrequency { .. })));
    }

    #[test]
    fn multisine_pairing_produces_conjugate_columns() {
        let sys = scalar_system(0.5, 1.0);
        let info = multisine_information_matrix(&sys, &[0.125], &[2.0]).unwrap();
        assert_eq!(info.frequencies, vec![0.125, -0.125]);
        for i in 0..2 {
            let plus = info.matrix[(i, 0)];
            let minus = info.matrix[(i, 1)];
            assert!(
                (plus.conj() - minus).norm() < 1e-12,
                "real input must give conjugate line pairs"
            );
        }
        assert!(info.sigma_min > 0.0);
    }

    #[test]
    fn excitation_check_rank_one_fails() {
        let phis = vec![vec![1.0, 0.0]; 6];
        let report = finite_excitation_check(&phis);
        assert!(report.lambda_min.abs() < 1e-12);
        assert!(!report.verdict);
        assert!((report.lambda_max - 6.0).abs() < 1e-10);
    }

    #[test]
    fn excitation_check_alternating_basis() {
        let phis = vec![
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
        ];
        let report = finite_excitation_check(&phis);
        assert!((report.lambda_min - 2.0).abs() < 1e-10);
        assert!((report.lambda_max - 2.0).abs() < 1e-10);
        assert!(report.verdict);
        assert_eq!(report.window, (0, 3));
        assert_eq!(report.rho1, report.lambda_min);
        assert_eq!(report.rho2, report.lambda_max);
    }

    #[test]
    fn pe_lower_bound_formula() {
        let info = InformationMatrix {
            frequencies: vec![0.0, 0.5],
            matrix: ComplexMatrix::identity(2),
            sigma_min: 2f64.sqrt(),
        };
        assert!((pe_lower_bound(&info, 1) - 1.0).abs() < 1e-12);
        let zero = InformationMatrix {
            frequencies: vec![0.0, 0.5],
            matrix: ComplexMatrix::zeros(2, 2),
            sigma_min: 0.0,
        };
        assert_eq!(pe_lower_bound(&zero, 1), 0.0);
        let unit = InformationMatrix {
            frequencies: vec![0.0, 0.5],
            matrix: ComplexMatrix::identity(2),
            sigma_min: 1.0,
        };
        assert!((pe_lower_bound(&unit, 2) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn pe_lower_bound_scales_quadratically() {
        // Scaling all input amplitudes by gamma scales sigma_min by gamma
        // and the bound by gamma^2 exactly.
        let sys = scalar_system(0.5, 1.0);
        for gamma in [0.5, 2.0, 3.5] {
            let base = multisine_information_matrix(&sys, &[0.125], &[1.0]).unwrap();
            let scaled = multisine_information_matrix(&sys, &[0.125], &[gamma]).unwrap();
            let ratio = pe_lower_bound(&scaled, 1) / pe_lower_bound(&base, 1);
            assert!((ratio - gamma * gamma).abs() < 1e-9 * gamma * gamma);
        }
    }

    #[test]
    fn gramian_by_hand() {
        let zero = RealMatrix::zeros(3, 3);
        let g = gramian(&zero, 7);
        assert!((&g - &RealMatrix::identity(3)).max_abs() < 1e-15);

        let half = RealMatrix::from_rows(&[vec![0.5]]);
        assert!((gramian(&half, 1)[(0, 0)] - 1.25).abs() < 1e-15);
        assert!((gramian(&half, 40)[(0, 0)] - 4.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn gramian_telescopes() {
        let a = RealMatrix::from_rows(&[vec![0.3, 0.2], vec![-0.1, 0.4]]);
        for k in 1..8 {
            let prev = gramian(&a, k - 1);
            let next = gramian(&a, k);
            // A^k (A^k)^T
            let mut power = RealMatrix::identity(2);
            for _ in 0..k {
                power = &a * &power;
            }
            let increment = &power * &power.transpose();
            let diff = &next - &(&prev + &increment);
            assert!(diff.max_abs() < 1e-12, "telescoping failed at k = {k}");
        }
    }

    #[test]
    fn controllability_gramian_by_hand() {
        let g = controllability_gramian(&RealMatrix::zeros(2, 2), &RealMatrix::identity(2), 5);
        assert!((&g - &RealMatrix::identity(2)).max_abs() < 1e-15);

        let a = RealMatrix::from_rows(&[vec![0.5]]);
        let b = RealMatrix::from_rows(&[vec![1.0]]);
        assert!((controllability_gramian(&a, &b, 1)[(0, 0)] - 1.25).abs() < 1e-15);

        let zero_b = RealMatrix::zeros(2, 1);
        let a2 = RealMatrix::from_rows(&[vec![0.3, 0.0], vec![0.0, 0.4]]);
        assert!(controllability_gramian(&a2, &zero_b, 9).max_abs() < 1e-15);
    }

    #[test]
    fn deterministic_signal_has_zero_radius() {
        let ms = MultiSine::new(vec![5.0 / 256.0], vec![1.3]);
        let r = empirical_radius(&ms, 5.0 / 256.0, 255, 40, RngSpec::new(11, 0));
        assert!(r < 1e-12, "deterministic radius should vanish, got {r}");
    }

    #[test]
    fn gaussian_radius_near_inverse_sqrt_two() {
        let wn = WhiteNoiseInput::new(1.0, RngSpec::new(21, 0));
        let r = empirical_radius(&wn, 16.0 / 256.0, 255, 500, RngSpec::new(21, 1));
        let expect = 0.5f64.sqrt();
        assert!(
            (r - expect).abs() < 0.15 * expect,
            "pooled radius {r} should sit near {expect}"
        );
    }

    #[test]
    fn noisy_multisine_radius_matches_noise_alone() {
        // A multi-sine plus white noise deviates from its mean line only
        // through the noise, so its radius matches the pure-noise radius.
        #[derive(Clone)]
        struct NoisyMultiSine {
            tone: MultiSine,
            noise: WhiteNoiseInput,
        }
        impl InputSignal for NoisyMultiSine {
            fn name(&self) -> &'static str {
                "noisy_multi_sine"
            }
            fn is_stochastic(&self) -> bool {
                true
            }
            fn generate(&self, len: usize) -> Vec<f64> {
                self.tone
                    .generate(len)
                    .into_iter()
                    .zip(self.noise.generate(len))
                    .map(|(a, b)| a + b)
                    .collect()
            }
            fn mean_line_amplitude(&self, f: f64) -> Complex64 {
                self.tone.mean_line_amplitude(f)
            }
            fn rebind(&self, spec: RngSpec) -> Box<dyn InputSignal> {
                Box::new(NoisyMultiSine {
                    tone: self.tone.clone(),
                    noise: WhiteNoiseInput::new(self.noise.std, spec),
                })
            }
            fn clone_box(&self) -> Box<dyn InputSignal> {
                Box::new(self.clone())
            }
        }

        let sigma = 0.8;
        let mixed = NoisyMultiSine {
            tone: MultiSine::new(vec![16.0 / 256.0], vec![2.0]),
            noise: WhiteNoiseInput::new(sigma, RngSpec::new(31, 0)),
        };
        let pure = WhiteNoiseInput::new(sigma, RngSpec::new(31, 0));
        let rm = empirical_radius(&mixed, 16.0 / 256.0, 255, 400, RngSpec::new(31, 1));
        let rp = empirical_radius(&pure, 16.0 / 256.0, 255, 400, RngSpec::new(31, 1));
        assert!((rm - rp).abs() < 1e-12, "deviation is noise-only: {rm} vs {rp}");
        assert!((rm - sigma * 0.5f64.sqrt()).abs() < 0.15 * sigma);
    }

    #[test]
    fn radius_scale_invariant_in_window_length() {
        let wn = WhiteNoiseInput::new(1.0, RngSpec::new(41, 0));
        let r1 = empirical_radius(&wn, 16.0 / 256.0, 255, 300, RngSpec::new(41, 1));
        let r2 = empirical_radius(&wn, 64.0 / 1024.0, 1023, 300, RngSpec::new(41, 1));
        assert!(
            (r1 - r2).abs() < 0.2 * r1,
            "radius should be window-invariant: {r1} vs {r2}"
        );
    }

    #[test]
    fn multisine_trajectory_is_finitely_exciting() {
        // A d-line multi-sine driving a stable plant yields a full-rank
        // regressor Gram.
        use crate::dynamics::{simulate, NoUnmodeled};
        let sys = companion_system(&[0.048, -0.44, 1.2], 0.0);
        let ms = MultiSine::unit(vec![8.0 / 512.0, 24.0 / 512.0]);
        let traj = simulate(
            &sys,
            &mut NoUnmodeled::new(3),
            &mut |k, _| vec![ms.sample(k)],
            512,
            RngSpec::new(1, 0),
            &[0.0; 3],
        )
        .unwrap();
        let report = finite_excitation_check(&traj.regressors());
        assert!(report.verdict, "multi-sine of d/2 lines must excite the plant");
        assert!(report.lambda_min > 1e-6);
        assert!(vec_norm(&traj.final_state()) < 100.0);
    }

    #[test]
    fn spectral_report_csv_layout() {
        let lines = vec![
            SpectralLineEstimate {
                frequency: 0.25,
                amplitude: vec![Complex64::new(1.0, -2.0), Complex64::new(0.5, 0.0)],
                window: (0, 63),
                empirical_deviation: 0.125,
            },
            SpectralLineEstimate {
                frequency: -0.25,
                amplitude: vec![Complex64::new(1.0, 2.0), Complex64::new(0.5, 0.0)],
                window: (0, 63),
                empirical_deviation: 0.125,
            },
        ];
        let csv = spectral_report_to_csv(&lines);
        let rows: Vec<&str> = csv.lines().collect();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0], "freq,re_amp_1,re_amp_2,im_amp_1,im_amp_2,radius");
        let first: Vec<&str> = rows[1].split(',').collect();
        assert_eq!(first.len(), 6);
        assert!(first[0].starts_with("2.5000000000000000e-1"));
        assert!(first[2].starts_with("5.0000000000000000e-1"));
        assert!(first[3].starts_with("-2.0000000000000000e0"));
        assert!(first[5].starts_with("1.2500000000000000e-1"));
        assert_eq!(spectral_report_to_csv(&[]), "freq,radius\n");
    }
}
