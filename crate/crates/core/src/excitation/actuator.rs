//! First-order actuator smoothing and its frequency response.

use num_complex::Complex64;

/// One-pole low-pass actuator `y_k = (1 - lambda) y_{k-1} + lambda u_k`,
/// started from rest. `lambda = 1` passes the input through unchanged; the
/// DC gain is 1 for every admissible `lambda`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActuatorFilter {
    lambda: f64,
}

impl ActuatorFilter {
    pub fn new(lambda: f64) -> Self {
        assert!(
            lambda > 0.0 && lambda <= 1.0,
            "actuator pole requires lambda in (0, 1], got {lambda}"
        );
        ActuatorFilter { lambda }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Run the filter over a full sequence from rest (`y_{-1} = 0`).
    pub fn apply(&self, input: &[f64]) -> Vec<f64> {
        let mut y = 0.0;
        let keep = 1.0 - self.lambda;
        input
            .iter()
            .map(|&u| {
                y = keep * y + self.lambda * u;
                y
            })
            .collect()
    }

    /// Frequency response `H(f) = lambda / (1 - (1 - lambda) e^{-j 2 pi f})`
    /// in cycles per step.
    pub fn transfer(&self, f: f64) -> Complex64 {
        let angle = -2.0 * std::f64::consts::PI * f;
        let z_inv = Complex64::new(angle.cos(), angle.sin());
        Complex64::new(self.lambda, 0.0)
            / (Complex64::new(1.0, 0.0) - z_inv * (1.0 - self.lambda))
    }
}
