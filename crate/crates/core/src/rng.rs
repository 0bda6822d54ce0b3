//! Seeded counter-based pseudo-random generator (SplitMix64).
//!
//! Every randomized component of the crate (instance generators, quickselect
//! pivots, sampling heuristics) draws from this generator so that runs are
//! bit-reproducible for a fixed seed, independent of platform or crate
//! versions.

#[derive(Debug, Clone)]
pub struct Rng {
    state: u64,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng { state: seed }
    }

    /// Next raw 64-bit value.
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform value in `[lo, hi]` (inclusive). `lo <= hi` required.
    pub fn uniform(&mut self, lo: u64, hi: u64) -> u64 {
        debug_assert!(lo <= hi);
        let span = hi - lo;
        if span == u64::MAX {
            return self.next_u64();
        }
        // Lemire's multiply-shift rejection method: unbiased and fast.
        let s = span + 1;
        loop {
            let x = self.next_u64();
            let m = (x as u128) * (s as u128);
            let l = m as u64;
            if l >= s.wrapping_neg() % s {
                return lo + (m >> 64) as u64;
            }
        }
    }

    /// Uniform index in `[0, n)`. `n > 0` required.
    pub fn index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        self.uniform(0, n as u64 - 1) as usize
    }

    /// Derive an independent stream, e.g. one per generated instance.
    pub fn fork(&mut self, tag: u64) -> Rng {
        Rng::new(self.next_u64() ^ tag.wrapping_mul(0xa076_1d64_78bd_642f))
    }
}
