// SPDX-License-Identifier: Apache-2.0

//! Self-contained pseudo-random number generation.
//!
//! The generator is xoshiro256++ (Blackman & Vigna 2019) seeded through
//! SplitMix64, the standard pairing recommended by the xoshiro authors.
//! Keeping the generator in-crate pins the byte-exact output of every
//! experiment to this repository rather than to an external crate version.
//!
//! Stream derivation is splittable: the state for `(seed, stream_index)`
//! is obtained by hashing the pair through SplitMix64, so logical streams
//! are reproducible and statistically independent no matter how work is
//! scheduled across threads.

/// SplitMix64 step (Steele, Lea & Flood 2014). Bijective finalizer, used
/// both for seeding and for stream splitting.
#[derive(Debug, Clone)]
pub(crate) struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub(crate) fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub(crate) fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
}

/// xoshiro256++ generator with splittable `(seed, stream_index)` derivation.
#[derive(Debug, Clone)]
pub struct StreamRng {
    s: [u64; 4],
}

impl StreamRng {
    /// Derive the generator state for a logical stream.
    ///
    /// Distinct `(seed, stream_index)` pairs give unrelated streams; the
    /// same pair always gives the same sequence.
    pub fn from_seed_pair(seed: u64, stream_index: u64) -> Self {
        // Two SplitMix64 rounds decorrelate seed and index before expansion.
        let mut outer = SplitMix64::new(seed);
        let mixed = outer
            .next_u64()
            .wrapping_add(stream_index.wrapping_mul(0xA076_1D64_78BD_642F));
        let mut inner = SplitMix64::new(mixed);
        let mut s = [
            inner.next_u64(),
            inner.next_u64(),
            inner.next_u64(),
            inner.next_u64(),
        ];
        if s == [0, 0, 0, 0] {
            s[0] = 1; // xoshiro state must not be all zero
        }
        Self { s }
    }

    pub fn next_u64(&mut self) -> u64 {
        let result = self.s[0]
            .wrapping_add(self.s[3])
            .rotate_left(23)
            .wrapping_add(self.s[0]);
        let t = self.s[1] << 17;
        self.s[2] ^= self.s[0];
        self.s[3] ^= self.s[1];
        self.s[1] ^= self.s[2];
        self.s[0] ^= self.s[3];
        self.s[2] ^= t;
        self.s[3] = self.s[3].rotate_left(45);
        result
    }

    /// Uniform draw in the open interval (0, 1); never returns 0 or 1,
    /// so it is safe under `ln`.
    pub fn open01(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Standard normal draw via the Marsaglia polar method.
    pub fn standard_normal(&mut self) -> f64 {
        loop {
            let u = 2.0 * self.open01() - 1.0;
            let v = 2.0 * self.open01() - 1.0;
            let s = u * u + v * v;
            if s < 1.0 && s > 0.0 {
                return u * (-2.0 * s.ln() / s).sqrt();
            }
        }
    }
}
