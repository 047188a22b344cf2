//! Seedable tie-breaking RNG.
//!
//! Every random decision in the crate goes through [`TieRng`], which wraps
//! `ChaCha8Rng::seed_from_u64` (ChaCha with 8 rounds; the `u64` seed is
//! expanded to a 32-byte key with PCG32 as documented by `rand_core`).
//! Bounded draws use rejection sampling on `next_u64`:
//! reject `x < 2^64 mod n`, return `x mod n`. Both pieces are fully
//! specified, so orders replay identically across platforms.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct TieRng {
    inner: ChaCha8Rng,
}

impl TieRng {
    pub fn new(seed: u64) -> Self {
        TieRng {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform index in `0..n`. Panics if `n == 0`.
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0, "cannot draw from an empty range");
        let n = n as u64;
        let threshold = n.wrapping_neg() % n;
        loop {
            let x = self.inner.next_u64();
            if x >= threshold {
                return (x % n) as usize;
            }
        }
    }

    /// Picks one position from a tie set of size `n`.
    ///
    /// A singleton tie set consumes no randomness, so the RNG stream only
    /// advances on genuine ties.
    pub fn pick_tied(&mut self, n: usize) -> usize {
        if n == 1 {
            0
        } else {
            self.below(n)
        }
    }

    /// In-place Fisher-Yates shuffle (from the back, `j = below(i + 1)`).
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }
}
