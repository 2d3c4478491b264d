//! Seeded Gaussian sampling.
//!
//! All randomness in this crate (noise injection, sketching matrices) flows
//! through [`GaussianSource`]: a ChaCha8 stream seeded from a 64-bit value,
//! mapped to standard normals with the Box-Muller transform. Fixing both the
//! generator and the transform keeps noise realizations and sketches
//! reproducible bit-for-bit across runs and platforms.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Standard-normal stream over ChaCha8 with Box-Muller.
pub struct GaussianSource {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl GaussianSource {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    /// Uniform in (0, 1], from the high 53 bits of the stream.
    fn uniform_open(&mut self) -> f64 {
        let bits = self.rng.next_u64() >> 11;
        (bits as f64 + 1.0) / (1u64 << 53) as f64
    }

    /// Next standard normal deviate.
    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.uniform_open();
        let u2 = self.uniform_open();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(radius * angle.sin());
        radius * angle.cos()
    }

    /// Fill a slice in order; the fill order is part of the determinism
    /// contract for sketching matrices.
    pub fn fill(&mut self, out: &mut [f64]) {
        for value in out.iter_mut() {
            *value = self.next_normal();
        }
    }
}
