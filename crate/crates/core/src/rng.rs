//! Seedable, splittable randomness.
//!
//! Every random draw in the crate flows through a [`RandomSource`], a
//! `(seed, stream)` pair that names one ChaCha8 keystream. Two sources with
//! the same pair replay the same uniforms; different stream ids under one
//! seed select disjoint keystreams of the same key. Nested work (one stream
//! per replication, one sub-stream per chunk inside a replication) uses
//! [`RandomSource::substream`], which re-keys from the parent pair so that
//! children of different parents never share a keystream.
//!
//! Parallel code partitions work statically and hands each unit its own
//! stream, so results never depend on the number of worker threads.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// The concrete generator behind a [`RandomSource`].
pub type StreamRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RandomSource {
    seed: u64,
    stream: u64,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self { seed, stream: 0 }
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Derives an independent child source identified by `id`.
    pub fn substream(&self, id: u64) -> Self {
        let key = splitmix64(self.seed ^ splitmix64(self.stream ^ 0xA076_1D64_78BD_642F));
        Self { seed: key, stream: id }
    }

    /// A fresh generator positioned at the start of this source's stream.
    pub fn rng(&self) -> StreamRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A uniform variate in `[0, 1)` with 53 random bits.
#[inline]
pub(crate) fn uniform<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Poisson(1) sampler by table inversion on raw 64-bit words.
///
/// The table holds `floor(P(X <= k) * 2^64)`; a draw is the number of
/// thresholds the word clears. One word per draw.
#[derive(Debug, Clone)]
pub(crate) struct UnitPoisson {
    thresholds: [u64; UnitPoisson::LEN],
}

impl UnitPoisson {
    const LEN: usize = 20;
    const FAST: usize = 7;

    pub(crate) fn new() -> Self {
        let mut thresholds = [u64::MAX; Self::LEN];
        let mut pmf = (-1.0f64).exp();
        let mut cdf = 0.0;
        for (k, slot) in thresholds.iter_mut().enumerate() {
            cdf += pmf;
            pmf /= (k + 1) as f64;
            // saturating cast; the tail beyond the last finite entry is below 2^-64
            *slot = (cdf * 18_446_744_073_709_551_616.0) as u64;
        }
        Self { thresholds }
    }

    #[inline]
    pub(crate) fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> u32 {
        let word = rng.next_u64();
        // branchless count over the first FAST thresholds; P(X >= FAST) ~ 1e-4
        let t = &self.thresholds;
        let k = (0..Self::FAST).map(|j| u32::from(word >= t[j])).sum::<u32>();
        if k < Self::FAST as u32 {
            return k;
        }
        let mut k = Self::FAST;
        while k < Self::LEN && word >= t[k] {
            k += 1;
        }
        k as u32
    }
}
