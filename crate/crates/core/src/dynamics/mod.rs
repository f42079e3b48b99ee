//! Plant models, unmodeled-dynamics maps, and trajectory simulation.
//!
//! The plant is the linear recursion `x_{k+1} = A x_k + B u_k + w_k + eta_k`
//! with Gaussian process noise `eta_k` and a deterministic, input-driven
//! disturbance `w_k` produced by an [`UnmodeledMap`]. Maps form an open
//! strategy family: see [`unmodeled_kinds`] for the built-in registry.

pub mod simulate;
pub mod system;
pub mod unmodeled;

pub use simulate::{simulate, simulate_with, Trajectory, DEFAULT_STATE_GUARD};
pub use system::{companion_system, LinearSystem};
pub use unmodeled::{
    build_unmodeled_map, high_pass_response, unmodeled_kinds, HighPassNonlinearity,
    LinearHighPass, NoUnmodeled, UnmodeledMap,
};

/// Failures surfaced by plant simulation.
#[derive(Debug, Clone, PartialEq)]
pub enum DynamicsError {
    /// Inconsistent dimensions between plant, policy, map, or initial state.
    DimensionMismatch(String),
    /// The state norm crossed the divergence guard.
    StateBlowup { step: usize, norm: f64 },
}

impl std::fmt::Display for DynamicsError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DynamicsError::DimensionMismatch(msg) => write!(f, "dimension mismatch: {msg}"),
            DynamicsError::StateBlowup { step, norm } => {
                write!(f, "state norm {norm:.3e} crossed the divergence guard at step {step}")
            }
        }
    }
}

impl std::error::Error for DynamicsError {}
