//! Self-contained numerical kernels: dense matrices, singular values and
//! eigenvalues, linear solves, DFTs, reproducible random streams, and small
//! statistics helpers.
//!
//! Everything here is written for the modest problem sizes of this crate
//! (state dimensions up to roughly a dozen), favoring simple, verifiably
//! accurate algorithms over asymptotic speed.

pub mod dft;
pub mod eig;
pub mod matrix;
pub mod rng;
pub mod solve;
pub mod stats;
pub mod svd;

pub use dft::{dft, dft_scalar, full_dft, full_dft_scalar};
pub use eig::{eigenvalues, spectral_radius};
pub use matrix::{cvec_norm, vec_dot, vec_norm, ComplexMatrix, RealMatrix};
pub use rng::{gaussian_stream, GaussianStream, RngSpec};
pub use solve::{complex_solve, complex_solve_matrix};
pub use stats::{lag_autocorrelation, mean, median, percentile_nearest_rank, population_std};
pub use svd::{
    op_norm, real_sigma_min, real_singular_values, sigma_max, sigma_min, singular_values,
    sym_eigen, sym_eigenvalues,
};

/// Failures surfaced by the numerical kernels.
#[derive(Debug, Clone, PartialEq)]
pub enum NumericsError {
    /// A linear solve met a pivot indistinguishable from zero.
    SingularMatrix,
    /// An iteration exhausted its budget without deflating.
    NonConvergence { iterations: usize },
    /// A DFT was requested at a frequency index outside `[0, len)`.
    FrequencyOffGrid { index: usize, len: usize },
    /// A statistic is undefined for the given sequence (e.g. zero variance).
    DegenerateSequence,
}

impl std::fmt::Display for NumericsError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NumericsError::SingularMatrix => write!(f, "matrix is singular to working precision"),
            NumericsError::NonConvergence { iterations } => {
                write!(f, "iteration failed to converge after {iterations} steps")
            }
            NumericsError::FrequencyOffGrid { index, len } => {
                write!(f, "frequency index {index} outside the {len}-point grid")
            }
            NumericsError::DegenerateSequence => {
                write!(f, "statistic undefined for a degenerate sequence")
            }
        }
    }
}

impl std::error::Error for NumericsError {}
