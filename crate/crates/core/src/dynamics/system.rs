//! Linear time-invariant plant models.

use crate::numerics::RealMatrix;

/// Discrete-time linear plant `x_{k+1} = A x_k + B u_k + w_k + eta_k` with
/// process noise `eta_k ~ N(0, sigma^2 I)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    pub a: RealMatrix,
    pub b: RealMatrix,
    /// Process-noise scale (standard deviation per state coordinate).
    pub sigma: f64,
}

impl LinearSystem {
    pub fn new(a: RealMatrix, b: RealMatrix, sigma: f64) -> Self {
        assert!(a.is_square(), "state matrix must be square");
        assert_eq!(a.rows(), b.rows(), "A and B row counts differ");
        assert!(sigma >= 0.0, "noise scale must be nonnegative");
        LinearSystem { a, b, sigma }
    }

    pub fn state_dim(&self) -> usize {
        self.a.rows()
    }

    pub fn input_dim(&self) -> usize {
        self.b.cols()
    }

    /// Regressor dimension n + m.
    pub fn regressor_dim(&self) -> usize {
        self.state_dim() + self.input_dim()
    }

    /// Noise-free one-step map `A x + B u`.
    pub fn step(&self, x: &[f64], u: &[f64]) -> Vec<f64> {
        let ax = self.a.mul_vec(x);
        let bu = self.b.mul_vec(u);
        ax.iter().zip(&bu).map(|(p, q)| p + q).collect()
    }

    /// Same system with a different noise scale.
    pub fn with_sigma(&self, sigma: f64) -> Self {
        LinearSystem::new(self.a.clone(), self.b.clone(), sigma)
    }
}

/// Control-canonical (companion) single-input plant: ones on the
/// superdiagonal, `coeffs` as the bottom row, `B` the last standard basis
/// vector. The characteristic polynomial is
/// `l^n - a_n l^{n-1} - ... - a_1`.
pub fn companion_system(coeffs: &[f64], sigma: f64) -> LinearSystem {
    let n = coeffs.len();
    assert!(n >= 1, "companion form needs at least one coefficient");
    let a = RealMatrix::from_fn(n, n, |i, j| {
        if i + 1 == n {
            coeffs[j]
        } else if j == i + 1 {
            1.0
        } else {
            0.0
        }
    });
    let b = RealMatrix::from_fn(n, 1, |i, _| if i + 1 == n { 1.0 } else { 0.0 });
    LinearSystem::new(a, b, sigma)
}
