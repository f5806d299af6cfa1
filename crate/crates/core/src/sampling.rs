//! Seeded test-point generation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::theta::{ModularContext, C64};

/// Deterministic sampler; the same seed gives the same points on every platform.
#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..hi)
    }

    /// A point of `[0.05, 0.95] x [0.05 Im tau, 0.95 Im tau]`, away from the
    /// lattice zeros of theta.
    pub fn cell_point(&mut self, ctx: &ModularContext) -> C64 {
        let t = ctx.tau_im();
        C64::new(self.uniform(0.05, 0.95), self.uniform(0.05 * t, 0.95 * t))
    }

    /// A point of the box `[-r, r] x [-r, r]`.
    pub fn complex_box(&mut self, r: f64) -> C64 {
        C64::new(self.uniform(-r, r), self.uniform(-r, r))
    }

    pub fn child(&mut self) -> Sampler {
        Sampler::new(self.rng.gen())
    }
}
