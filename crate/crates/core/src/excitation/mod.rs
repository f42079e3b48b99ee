//! Input signal designs and spectral-line analysis.
//!
//! Excitation signals (multi-sines, white noise, PRBS) live behind the
//! [`InputSignal`] trait so experiments can swap them by name. The spectral
//! half of the module estimates finite-window spectral lines, predicts their
//! steady-state amplitudes through a known plant, and condenses a signal
//! design into an information matrix whose smallest singular value bounds
//! the excitation the signal delivers.

pub mod actuator;
pub mod signals;
pub mod spectral;

pub use actuator::ActuatorFilter;
pub use signals::{
    build_input_signal, signal_kinds, signal_to_csv, InputSignal, MultiSine, PrbsInput,
    WhiteNoiseInput,
};
pub use spectral::{
    controllability_gramian, empirical_radius, estimate_spectral_line,
    estimate_spectral_line_scalar, finite_excitation_check, gramian, information_matrix,
    multisine_information_matrix, pe_lower_bound, spectral_report_to_csv, transfer_amplitude,
    ExcitationReport, InformationMatrix, SpectralLineEstimate,
};

/// Errors raised while designing signals or analysing their spectra.
#[derive(Debug, Clone, PartialEq)]
pub enum ExcitationError {
    /// A signal with zero energy cannot be rescaled to a target energy.
    DegenerateSignal,
    /// The registry knows no signal of the requested name.
    UnknownSignalKind(String),
    /// The frequency does not sit on the window's DFT grid, so the line
    /// estimate would suffer leakage bias.
    FrequencyOffGrid { frequency: f64, window_len: usize },
    /// The plant has a pole on the unit circle at this frequency; the
    /// steady-state amplitude is undefined.
    ResonantFrequency { frequency: f64 },
    /// Information-matrix columns must use pairwise-distinct frequencies.
    DuplicateFrequency { frequency: f64 },
}

impl std::fmt::Display for ExcitationError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExcitationError::DegenerateSignal => {
                write!(f, "signal has zero energy and cannot be rescaled")
            }
            ExcitationError::UnknownSignalKind(kind) => {
                write!(f, "unknown input signal kind `{kind}`")
            }
            ExcitationError::FrequencyOffGrid { frequency, window_len } => write!(
                f,
                "frequency {frequency} is off the grid of a window of length {window_len}"
            ),
            ExcitationError::ResonantFrequency { frequency } => {
                write!(f, "plant is resonant at frequency {frequency}")
            }
            ExcitationError::DuplicateFrequency { frequency } => {
                write!(f, "frequency {frequency} appears more than once")
            }
        }
    }
}

impl std::error::Error for ExcitationError {}
