//! Unmodeled-dynamics maps: causal, input-driven residuals added to the
//! linear plant. The built-in family is a first-order high-pass filter
//! followed by either a squaring nonlinearity or the identity, broadcast
//! along a fixed direction vector.
//!
//! New map families plug in by implementing [`UnmodeledMap`] and extending
//! [`build_unmodeled_map`] / [`unmodeled_kinds`].

use num_complex::Complex64;

/// A causal map from the scalar input sequence to a state-dimension
/// disturbance `w_k`. Implementations carry their own filter state.
pub trait UnmodeledMap: Send {
    /// Registry name of this map family.
    fn name(&self) -> &'static str;
    /// Consume `u_k` (scalar input, length-1 slice) and emit `w_k`.
    fn step(&mut self, u: &[f64]) -> Vec<f64>;
    /// Return to the rest state (zero filter state, zero previous input).
    fn reset(&mut self);
    /// Clone into a fresh boxed map (same parameters, current state).
    fn clone_box(&self) -> Box<dyn UnmodeledMap>;
}

impl Clone for Box<dyn UnmodeledMap> {
    fn clone(&self) -> Self {
        self.clone_box()
    }
}

/// The trivial map `w_k = 0`.
#[derive(Debug, Clone)]
pub struct NoUnmodeled {
    dim: usize,
}

impl NoUnmodeled {
    pub fn new(dim: usize) -> Self {
        NoUnmodeled { dim }
    }
}

impl UnmodeledMap for NoUnmodeled {
    fn name(&self) -> &'static str {
        "none"
    }

    fn step(&mut self, _u: &[f64]) -> Vec<f64> {
        vec![0.0; self.dim]
    }

    fn reset(&mut self) {}

    fn clone_box(&self) -> Box<dyn UnmodeledMap> {
        Box::new(self.clone())
    }
}

/// Shared first-order high-pass recursion
/// `wbar_k = alpha wbar_{k-1} + alpha (u_k - beta u_{k-1})`
/// from rest (`wbar_{-1} = 0`, `u_{-1} = 0`).
#[derive(Debug, Clone)]
struct HighPassFilter {
    alpha: f64,
    beta: f64,
    filter_state: f64,
    prev_input: f64,
}

impl HighPassFilter {
    fn new(alpha: f64, beta: f64) -> Self {
        assert!(alpha.abs() < 1.0, "high-pass filter pole must be stable");
        HighPassFilter { alpha, beta, filter_state: 0.0, prev_input: 0.0 }
    }

    fn step(&mut self, u: f64) -> f64 {
        self.filter_state = self.alpha * self.filter_state + self.alpha * (u - self.beta * self.prev_input);
        self.prev_input = u;
        self.filter_state
    }

    fn reset(&mut self) {
        self.filter_state = 0.0;
        self.prev_input = 0.0;
    }
}

/// Frequency response `alpha (z - beta) / (z - alpha)` of the high-pass
/// filter at `z = e^{j 2 pi f}`, `f` in cycles per step.
pub fn high_pass_response(alpha: f64, beta: f64, f: f64) -> Complex64 {
    let angle = 2.0 * std::f64::consts::PI * f;
    let z = Complex64::new(angle.cos(), angle.sin());
    (z - beta) / (z - alpha) * alpha
}

/// High-pass filter followed by a squaring nonlinearity:
/// `w_k = direction * c * wbar_k^2`.
#[derive(Debug, Clone)]
pub struct HighPassNonlinearity {
    filter: HighPassFilter,
    c: f64,
    direction: Vec<f64>,
}

impl HighPassNonlinearity {
    /// All-ones direction of length `dim`.
    pub fn new(alpha: f64, beta: f64, c: f64, dim: usize) -> Self {
        Self::with_direction(alpha, beta, c, vec![1.0; dim])
    }

    pub fn with_direction(alpha: f64, beta: f64, c: f64, direction: Vec<f64>) -> Self {
        assert!(!direction.is_empty(), "direction vector must be nonempty");
        HighPassNonlinearity { filter: HighPassFilter::new(alpha, beta), c, direction }
    }

    /// Response of the linear filter stage (the nonlinearity has no
    /// transfer function).
    pub fn frequency_response(&self, f: f64) -> Complex64 {
        high_pass_response(self.filter.alpha, self.filter.beta, f)
    }
}

impl UnmodeledMap for HighPassNonlinearity {
    fn name(&self) -> &'static str {
        "high_pass_square"
    }

    fn step(&mut self, u: &[f64]) -> Vec<f64> {
        assert_eq!(u.len(), 1, "high-pass maps take a scalar input");
        let wbar = self.filter.step(u[0]);
        let scale = self.c * wbar * wbar;
        self.direction.iter().map(|d| d * scale).collect()
    }

    fn reset(&mut self) {
        self.filter.reset();
    }

    fn clone_box(&self) -> Box<dyn UnmodeledMap> {
        Box::new(self.clone())
    }
}

/// High-pass filter without the squaring stage: `w_k = direction * c * wbar_k`.
#[derive(Debug, Clone)]
pub struct LinearHighPass {
    filter: HighPassFilter,
    c: f64,
    direction: Vec<f64>,
}

impl LinearHighPass {
    pub fn new(alpha: f64, beta: f64, c: f64, dim: usize) -> Self {
        Self::with_direction(alpha, beta, c, vec![1.0; dim])
    }

    pub fn with_direction(alpha: f64, beta: f64, c: f64, direction: Vec<f64>) -> Self {
        assert!(!direction.is_empty(), "direction vector must be nonempty");
        LinearHighPass { filter: HighPassFilter::new(alpha, beta), c, direction }
    }

    pub fn frequency_response(&self, f: f64) -> Complex64 {
        high_pass_response(self.filter.alpha, self.filter.beta, f)
    }
}

impl UnmodeledMap for LinearHighPass {
    fn name(&self) -> &'static str {
        "high_pass_linear"
    }

    fn step(&mut self, u: &[f64]) -> Vec<f64> {
        assert_eq!(u.len(), 1, "high-pass maps take a scalar input");
        let wbar = self.filter.step(u[0]);
        let scale = self.c * wbar;
        self.direction.iter().map(|d| d * scale).collect()
    }

    fn reset(&mut self) {
        self.filter.reset();
    }

    fn clone_box(&self) -> Box<dyn UnmodeledMap> {
        Box::new(self.clone())
    }
}

/// Registry names accepted by [`build_unmodeled_map`].
pub fn unmodeled_kinds() -> &'static [&'static str] {
    &["none", "high_pass_square", "high_pass_linear"]
}

/// Construct a map by registry name with all-ones direction.
pub fn build_unmodeled_map(
    kind: &str,
    dim: usize,
    alpha: f64,
    beta: f64,
    c: f64,
) -> Result<Box<dyn UnmodeledMap>, String> {
    match kind {
        "none" => Ok(Box::new(NoUnmodeled::new(dim))),
        "high_pass_square" => Ok(Box::new(HighPassNonlinearity::new(alpha, beta, c, dim))),
        "high_pass_linear" => Ok(Box::new(LinearHighPass::new(alpha, beta, c, dim))),
        other => Err(format!(
            "unknown unmodeled map kind '{other}' (expected one of {:?})",
            unmodeled_kinds()
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_one_kills_dc() {
        // alpha=0.5, beta=1, c=1, constant u=1: wbar halves every step.
        let mut map = HighPassNonlinearity::new(0.5, 1.0, 1.0, 1);
        let w0 = map.step(&[1.0])[0];
        assert!((w0 - 0.25).abs() < 1e-15, "wbar_0 = 0.5 so w_0 = 0.25, got {w0}");
        let w1 = map.step(&[1.0])[0];
        assert!((w1 - 0.0625).abs() < 1e-15, "wbar_1 = 0.25 so w_1 = 0.0625, got {w1}");
        let mut last = w1;
        for _ in 0..60 {
            last = map.step(&[1.0])[0];
        }
        assert!(last.abs() < 1e-12, "DC gain is zero when beta = 1");
    }

    #[test]
    fn linear_dc_gain_matches_formula() {
        // alpha=0.1, beta=0.9: DC gain alpha(1-beta)/(1-alpha) = 1/90.
        let expected: f64 = 0.1 * (1.0 - 0.9) / (1.0 - 0.1);
        assert!((expected - 1.0 / 90.0).abs() < 1e-15);
        let mut map = LinearHighPass::new(0.1, 0.9, 1.0, 1);
        let mut w = 0.0;
        for _ in 0..400 {
            w = map.step(&[1.0])[0];
        }
        assert!((w - expected).abs() < 1e-12, "steady state {w} vs {expected}");
        assert!((high_pass_response(0.1, 0.9, 0.0).re - expected).abs() < 1e-15);
        assert!(high_pass_response(0.1, 0.9, 0.0).im.abs() < 1e-15);
    }

    #[test]
    fn nyquist_magnitude_by_hand() {
        // |H(-1)| = alpha(1+beta)/(1+alpha) = 0.1*1.9/1.1
        let h = high_pass_response(0.1, 0.9, 0.5);
        assert!((h.norm() - 0.19 / 1.1).abs() < 1e-12);
        assert!((h.norm() - 0.17272727272727273).abs() < 1e-10);
    }

    #[test]
    fn beta_one_zero_at_dc_exactly() {
        let h = high_pass_response(0.3, 1.0, 0.0);
        assert!(h.norm() < 1e-15);
    }

    #[test]
    fn zero_gain_is_inert() {
        let mut map = HighPassNonlinearity::new(0.5, 0.3, 0.0, 3);
        for k in 0..10 {
            let w = map.step(&[k as f64]);
            assert!(w.iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn squaring_quadruples_under_doubled_input() {
        let inputs = [0.7, -1.1, 0.4, 2.0, -0.3, 0.9];
        let mut m1 = HighPassNonlinearity::new(0.4, 0.6, 2.0, 2);
        let mut m2 = HighPassNonlinearity::new(0.4, 0.6, 2.0, 2);
        for &u in &inputs {
            let w1 = m1.step(&[u]);
            let w2 = m2.step(&[2.0 * u]);
            for (a, b) in w1.iter().zip(&w2) {
                assert!((4.0 * a - b).abs() < 1e-12, "squaring map must scale quadratically");
            }
        }
    }

    #[test]
    fn linear_map_superposes() {
        let u1 = [0.7, -1.1, 0.4, 2.0];
        let u2 = [0.2, 0.3, -0.9, 1.5];
        let mut ma = LinearHighPass::new(0.4, 0.6, 1.3, 1);
        let mut mb = LinearHighPass::new(0.4, 0.6, 1.3, 1);
        let mut mc = LinearHighPass::new(0.4, 0.6, 1.3, 1);
        for (&a, &b) in u1.iter().zip(&u2) {
            let wa = ma.step(&[a])[0];
            let wb = mb.step(&[b])[0];
            let wc = mc.step(&[a + b])[0];
            assert!((wa + wb - wc).abs() < 1e-12);
        }
    }

    #[test]
    fn reset_restores_rest_state() {
        let mut map = HighPassNonlinearity::new(0.5, 0.2, 1.0, 1);
        let first = map.step(&[1.0])[0];
        map.step(&[0.4]);
        map.reset();
        let again = map.step(&[1.0])[0];
        assert_eq!(first, again);
    }

    #[test]
    fn registry_builds_every_kind() {
        for kind in unmodeled_kinds() {
            let mut map = build_unmodeled_map(kind, 2, 0.1, 0.9, 1.0).unwrap();
            assert_eq!(map.name(), *kind);
            assert_eq!(map.step(&[1.0]).len(), 2);
        }
        assert!(build_unmodeled_map("bogus", 1, 0.1, 0.9, 1.0).is_err());
    }
}
