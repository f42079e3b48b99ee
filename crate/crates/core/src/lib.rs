//! Spectral-line excitation design, linear system identification, and
//! adaptive LQR experiments.
//!
//! The crate is organised as a stack:
//!
//! * [`numerics`] — small dense real/complex linear algebra, DFTs, and
//!   reproducible Gaussian streams. Everything else builds on it.
//! * [`dynamics`] — linear plants `x_{k+1} = A x_k + B u_k + w_k + eta_k`,
//!   unmodeled input-driven maps `w_k`, and trajectory simulation.
//! * [`excitation`] — input-signal strategies (multisine, white noise,
//!   PRBS), spectral-line estimation, information matrices, and
//!   finite-excitation diagnostics.
//! * [`estimation`] — batch least squares, a normalized recursive
//!   estimator, and estimation-bound diagnostics.
//! * [`control`] — Riccati/LQR machinery, regret accounting, and the
//!   epoch-doubling explore-estimate-redesign loop.
//! * [`harness`] — config-driven experiment scenarios with seeded,
//!   worker-pooled replications and deterministic CSV output.
//!
//! Input signals and unmodeled maps are strategy families: each variant
//! implements a common trait and is selected by name at runtime (see
//! [`excitation::signal_kinds`] and [`dynamics::unmodeled_kinds`]).

pub mod control;
pub mod dynamics;
pub mod estimation;
pub mod excitation;
pub mod harness;
pub mod numerics;
