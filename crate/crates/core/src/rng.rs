//! Seeded random streams.
//!
//! Every random quantity is drawn from a ChaCha8 stream keyed by a 64-bit seed.
//! Independent streams (bootstrap replicates, grid points, Monte Carlo series)
//! get their own seed via [`derive_seed`], so results do not depend on the
//! order in which streams are consumed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of stream `stream` under parent `seed`:
/// `mix64(seed ^ mix64(stream + 1) · φ)` with φ the 64-bit golden-ratio constant.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    mix64(seed ^ mix64(stream.wrapping_add(1)).wrapping_mul(GOLDEN))
}

pub fn stream(seed: u64, stream_id: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, stream_id))
}

/// Standard normal variates by the Box–Muller transform.
///
/// Each pair of uniforms `u1 ∈ (0, 1]`, `u2 ∈ [0, 1)` (53-bit, from `Rng::gen`)
/// yields `r cos θ` and then `r sin θ`, with `r = √(−2 ln u1)` and `θ = 2π u2`.
#[derive(Debug, Clone)]
pub struct Gaussian<R> {
    rng: R,
    spare: Option<f64>,
}

impl<R: Rng> Gaussian<R> {
    pub fn new(rng: R) -> Self {
        Self { rng, spare: None }
    }

    pub fn draw(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = 1.0 - self.rng.gen::<f64>();
        let u2 = self.rng.gen::<f64>();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        self.spare = Some(r * s);
        r * c
    }

    pub fn fill(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.draw()).collect()
    }
}

pub fn gaussian(seed: u64, stream_id: u64) -> Gaussian<ChaCha8Rng> {
    Gaussian::new(stream(seed, stream_id))
}
