//! Reproducible random-number streams.
//!
//! Every random quantity in the crate is drawn from a [`GaussianStream`]
//! keyed by an [`RngSpec`] — a `(master_seed, stream_index)` pair. Distinct
//! stream indices give statistically independent streams of the same master
//! seed, which lets Monte-Carlo replications run concurrently while staying
//! bit-reproducible regardless of scheduling.

use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

/// Key identifying one reproducible random stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RngSpec {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl RngSpec {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        RngSpec { master_seed, stream_index }
    }

    /// Derives a child stream. The multiplier is an odd 64-bit constant, so
    /// the map `(parent, child) -> index` is injective for a fixed parent
    /// and collisions across parents are negligible.
    pub fn substream(self, child: u64) -> Self {
        RngSpec {
            master_seed: self.master_seed,
            stream_index: self
                .stream_index
                .wrapping_mul(0x9e37_79b9_7f4a_7c15)
                .wrapping_add(child)
                .wrapping_add(1),
        }
    }
}

/// Infinite stream of standard normal variates.
///
/// Backed by a ChaCha12 counter generator (seeded by `master_seed`, stream
/// selected by `stream_index`) with the polar transform on top. The polar
/// method produces two variates per accepted uniform pair; the spare is
/// cached.
pub struct GaussianStream {
    rng: ChaCha12Rng,
    spare: Option<f64>,
}

impl GaussianStream {
    pub fn new(spec: RngSpec) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(spec.master_seed);
        rng.set_stream(spec.stream_index);
        GaussianStream { rng, spare: None }
    }

    /// Uniform draw in [0, 1) with 53 random mantissa bits.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in [0, n) without modulo bias (Lemire reduction is
    /// unnecessary at these ranges; widening multiply suffices).
    pub fn uniform_index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        ((self.rng.next_u64() as u128 * n as u128) >> 64) as usize
    }

    /// One standard normal draw via the polar transform.
    pub fn gaussian(&mut self) -> f64 {
        if let Some(v) = self.spare.take() {
            return v;
        }
        loop {
            let u = 2.0 * self.uniform() - 1.0;
            let v = 2.0 * self.uniform() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let f = (-2.0 * s.ln() / s).sqrt();
                self.spare = Some(v * f);
                return u * f;
            }
        }
    }

    pub fn gaussian_vec(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.gaussian()).collect()
    }
}

/// Spec-keyed constructor; same spec, same sequence.
pub fn gaussian_stream(spec: RngSpec) -> GaussianStream {
    GaussianStream::new(spec)
}

impl Iterator for GaussianStream {
    type Item = f64;
    fn next(&mut self) -> Option<f64> {
        Some(self.gaussian())
    }
}
