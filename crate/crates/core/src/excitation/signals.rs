//! Scalar excitation signals: deterministic multi-sines, Gaussian white
//! noise, and pseudo-random binary sequences, behind a common trait so
//! experiments can swap input designs by registry name.

use num_complex::Complex64;

use crate::numerics::{gaussian_stream, RngSpec};

use super::ExcitationError;

/// A scalar input design. Stochastic signals own their RNG spec, so
/// generation is a pure function of the signal value; `rebind` re-keys a
/// copy for per-replication streams.
pub trait InputSignal: Send {
    /// Registry name of this signal family.
    fn name(&self) -> &'static str;
    fn is_stochastic(&self) -> bool;
    /// The sequence `u_0 .. u_{len-1}`.
    fn generate(&self, len: usize) -> Vec<f64>;
    /// Deterministic spectral-line amplitude at frequency `f` (cycles per
    /// step, may be negative): the mean of `(1/T) sum u_k e^{-j 2 pi f k}`.
    fn mean_line_amplitude(&self, f: f64) -> Complex64;
    /// Copy of this signal keyed to a different stream.
    fn rebind(&self, spec: RngSpec) -> Box<dyn InputSignal>;
    /// Exact copy, stream key included.
    fn clone_box(&self) -> Box<dyn InputSignal>;
}

impl Clone for Box<dyn InputSignal> {
    fn clone(&self) -> Self {
        self.clone_box()
    }
}

/// A sum of cosines `u_k = sum_j M_j cos(2 pi f_j k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiSine {
    pub frequencies: Vec<f64>,
    pub amplitudes: Vec<f64>,
}

impl MultiSine {
    pub fn new(frequencies: Vec<f64>, amplitudes: Vec<f64>) -> Self {
        assert_eq!(frequencies.len(), amplitudes.len(), "one amplitude per frequency");
        for (i, f) in frequencies.iter().enumerate() {
            assert!(
                *f >= 0.0 && *f <= 0.5,
                "frequencies must lie in [0, 0.5] cycles/step"
            );
            for g in &frequencies[..i] {
                assert!((f - g).abs() > 0.0, "frequencies must be pairwise distinct");
            }
        }
        MultiSine { frequencies, amplitudes }
    }

    /// Unit-amplitude cosines at the given frequencies.
    pub fn unit(frequencies: Vec<f64>) -> Self {
        let amplitudes = vec![1.0; frequencies.len()];
        MultiSine::new(frequencies, amplitudes)
    }

    pub fn sample(&self, k: usize) -> f64 {
        let kf = k as f64;
        self.frequencies
            .iter()
            .zip(&self.amplitudes)
            .map(|(f, m)| m * (2.0 * std::f64::consts::PI * f * kf).cos())
            .sum()
    }

    /// Rescale all amplitudes by a common factor so the realized energy over
    /// a horizon matches white noise of standard deviation `e0`:
    /// `sum_{k<T} u_k^2 = T e0^2`.
    pub fn normalize_energy(&self, e0: f64, t_len: usize) -> Result<MultiSine, ExcitationError> {
        assert!(t_len >= 1, "normalization horizon must be positive");
        if e0 == 0.0 {
            return Ok(MultiSine::new(
                self.frequencies.clone(),
                vec![0.0; self.amplitudes.len()],
            ));
        }
        let realized: f64 = (0..t_len).map(|k| self.sample(k).powi(2)).sum();
        if realized <= 0.0 {
            return Err(ExcitationError::DegenerateSignal);
        }
        let scale = (t_len as f64 * e0 * e0 / realized).sqrt();
        Ok(MultiSine::new(
            self.frequencies.clone(),
            self.amplitudes.iter().map(|m| m * scale).collect(),
        ))
    }
}

impl InputSignal for MultiSine {
    fn name(&self) -> &'static str {
        "multi_sine"
    }

    fn is_stochastic(&self) -> bool {
        false
    }

    fn generate(&self, len: usize) -> Vec<f64> {
        (0..len).map(|k| self.sample(k)).collect()
    }

    fn mean_line_amplitude(&self, f: f64) -> Complex64 {
        // cos(2 pi f_j k) splits into lines of amplitude M_j/2 at +/- f_j,
        // which merge to a single line of amplitude M_j at f_j in {0, 1/2}.
        for (fj, m) in self.frequencies.iter().zip(&self.amplitudes) {
            if (f.abs() - fj).abs() < 1e-12 {
                let single = *fj == 0.0 || (*fj - 0.5).abs() < 1e-12;
                return Complex64::new(if single { *m } else { m / 2.0 }, 0.0);
            }
        }
        Complex64::new(0.0, 0.0)
    }

    fn rebind(&self, _spec: RngSpec) -> Box<dyn InputSignal> {
        Box::new(self.clone())
    }

    fn clone_box(&self) -> Box<dyn InputSignal> {
        Box::new(self.clone())
    }
}

/// I.i.d. Gaussian input `u_k ~ N(0, std^2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WhiteNoiseInput {
    pub std: f64,
    pub rng: RngSpec,
}

impl WhiteNoiseInput {
    pub fn new(std: f64, rng: RngSpec) -> Self {
        assert!(std >= 0.0, "noise scale must be nonnegative");
        WhiteNoiseInput { std, rng }
    }
}

impl InputSignal for WhiteNoiseInput {
    fn name(&self) -> &'static str {
        "white_noise"
    }

    fn is_stochastic(&self) -> bool {
        true
    }

    fn generate(&self, len: usize) -> Vec<f64> {
        let mut stream = gaussian_stream(self.rng);
        (0..len).map(|_| self.std * stream.gaussian()).collect()
    }

    fn mean_line_amplitude(&self, _f: f64) -> Complex64 {
        Complex64::new(0.0, 0.0)
    }

    fn rebind(&self, spec: RngSpec) -> Box<dyn InputSignal> {
        Box::new(WhiteNoiseInput::new(self.std, spec))
    }

    fn clone_box(&self) -> Box<dyn InputSignal> {
        Box::new(self.clone())
    }
}

/// Maximal-length LFSR feedback masks (Galois right-shift form) per register
/// length; bit `i` set means the polynomial has a degree-(i+1) term.
const LFSR_TAPS: [(usize, u32); 15] = [
    (2, 0b11),
    (3, 0b110),
    (4, 0b1100),
    (5, 0b10100),
    (6, 0b110000),
    (7, 0b1100000),
    (8, 0b10111000),
    (9, 0b100010000),
    (10, 0b1001000000),
    (11, 0b10100000000),
    (12, 0b111000001000),
    (13, 0b1110010000000),
    (14, 0b11100000000010),
    (15, 0b110000000000000),
    (16, 0b1101000000001000),
];

/// Pseudo-random binary sequence from a maximal-length shift register,
/// mapped to `{-amplitude, +amplitude}`. The register length is the
/// smallest whose full period `2^r - 1` is at least `period`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrbsInput {
    pub amplitude: f64,
    pub period: usize,
    pub seed: u64,
    register_len: usize,
}

impl PrbsInput {
    pub fn new(amplitude: f64, period: usize, seed: u64) -> Self {
        assert!(period >= 1, "PRBS period must be positive");
        let register_len = LFSR_TAPS
            .iter()
            .map(|(r, _)| *r)
            .find(|r| (1usize << r) - 1 >= period)
            .unwrap_or(16);
        PrbsInput { amplitude, period, seed, register_len }
    }

    fn taps(&self) -> u32 {
        LFSR_TAPS
            .iter()
            .find(|(r, _)| *r == self.register_len)
            .map(|(_, t)| *t)
            .expect("register length always in the tap table")
    }
}

impl InputSignal for PrbsInput {
    fn name(&self) -> &'static str {
        "prbs"
    }

    fn is_stochastic(&self) -> bool {
        // Deterministic given the seed, but seed-dependent like a stream.
        true
    }

    fn generate(&self, len: usize) -> Vec<f64> {
        let modulus = (1u64 << self.register_len) - 1;
        let mut state = (self.seed % modulus + 1) as u32;
        let mask = self.taps();
        (0..len)
            .map(|_| {
                let lsb = state & 1;
                state >>= 1;
                if lsb == 1 {
                    state ^= mask;
                }
                if lsb == 1 {
                    self.amplitude
                } else {
                    -self.amplitude
                }
            })
            .collect()
    }

    fn mean_line_amplitude(&self, _f: f64) -> Complex64 {
        Complex64::new(0.0, 0.0)
    }

    fn rebind(&self, spec: RngSpec) -> Box<dyn InputSignal> {
        let seed = spec.master_seed ^ spec.stream_index.rotate_left(17);
        Box::new(PrbsInput::new(self.amplitude, self.period, seed))
    }

    fn clone_box(&self) -> Box<dyn InputSignal> {
        Box::new(self.clone())
    }
}

/// Registry names accepted by [`build_input_signal`].
pub fn signal_kinds() -> &'static [&'static str] {
    &["multi_sine", "white_noise", "prbs"]
}

/// Construct a signal by registry name at a common energy scale: every kind
/// realizes (or targets) `sum_{k<t_len} u_k^2 = t_len * e0^2`.
pub fn build_input_signal(
    kind: &str,
    e0: f64,
    frequencies: &[f64],
    t_len: usize,
    spec: RngSpec,
) -> Result<Box<dyn InputSignal>, ExcitationError> {
    match kind {
        "multi_sine" => {
            let ms = MultiSine::unit(frequencies.to_vec()).normalize_energy(e0, t_len)?;
            Ok(Box::new(ms))
        }
        "white_noise" => Ok(Box::new(WhiteNoiseInput::new(e0, spec))),
        "prbs" => {
            let seed = spec.master_seed ^ spec.stream_index.rotate_left(17);
            Ok(Box::new(PrbsInput::new(e0, t_len.max(1), seed)))
        }
        other => Err(ExcitationError::UnknownSignalKind(other.to_string())),
    }
}

/// Render a scalar input sequence as CSV with columns `k,u`.
pub fn signal_to_csv(samples: &[f64]) -> String {
    let mut out = String::from("k,u\n");
    for (k, u) in samples.iter().enumerate() {
        out.push_str(&format!("{k},{u:.16e}\n"));
    }
    out
}
