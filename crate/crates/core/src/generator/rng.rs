//! Sampling primitives with a fixed, documented algorithm so that a seed
//! reproduces the same output on every platform.
//!
//! The bit source is ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64(seed)` and switched to stream `stream`. On top of it:
//!
//! * `unit()` = `(next_u64() >> 11) * 2^-53`, uniform in `[0, 1)`;
//! * `below(n)` = `min(floor(unit() * n), n - 1)`;
//! * `weighted(w)` draws `u = unit() * sum(w)` and returns the first index
//!   whose running sum exceeds `u` (falling back to the last positive weight);
//! * `bernoulli(p)` is `unit() < p`;
//! * `shuffle` is Fisher-Yates from the last position down, `j = below(i + 1)`.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Sampler { rng }
    }

    pub fn unit(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn below(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        ((self.unit() * n as f64) as usize).min(n - 1)
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.unit() < p
    }

    /// Index drawn with probability proportional to `weights[i]`. Negative
    /// weights count as zero. `None` when no weight is positive.
    pub fn weighted<I>(&mut self, weights: I) -> Option<usize>
    where
        I: IntoIterator<Item = f64>,
        I::IntoIter: Clone,
    {
        let weights = weights.into_iter();
        let total: f64 = weights.clone().map(|w| w.max(0.0)).sum();
        if !(total > 0.0) {
            return None;
        }
        let target = self.unit() * total;
        let mut acc = 0.0;
        let mut last = None;
        for (i, w) in weights.enumerate() {
            let w = w.max(0.0);
            if w > 0.0 {
                last = Some(i);
                acc += w;
                if target < acc {
                    return Some(i);
                }
            }
        }
        last
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }
}
