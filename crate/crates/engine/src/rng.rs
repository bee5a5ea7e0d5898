//! Counter-based splittable normal streams.
//!
//! Every Gaussian draw is a pure function of the tuple
//! `(seed, outer index, inner index, step, factor)`. Outer and inner paths can
//! therefore be simulated in any order and on any number of threads while
//! producing bit-identical draws. No mutable generator state is carried
//! between steps.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const SALT_U2: u64 = 0x243F_6A88_85A3_08D3;

/// SplitMix64 finalizer (Vigna); a bijective avalanche mix on 64 bits.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
fn absorb(h: u64, v: u64) -> u64 {
    mix64(h ^ v.wrapping_mul(GOLDEN).wrapping_add(GOLDEN))
}

/// Risk-driver channel within one simulation step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Factor {
    Variance = 0,
    Rate = 1,
    Equity = 2,
}

/// Handle for one path's draws; `Copy`, cheap to construct per path.
#[derive(Clone, Copy, Debug)]
pub struct PathStream {
    key: u64,
}

impl PathStream {
    pub fn new(seed: u64, outer: u64, inner: u64) -> Self {
        let mut h = mix64(seed.wrapping_add(GOLDEN));
        h = absorb(h, outer);
        h = absorb(h, inner);
        Self { key: h }
    }

    /// Standard-normal draw for `(step, factor)` on this path.
    ///
    /// Box-Muller on two derived 53-bit uniforms; the first uniform lies in
    /// (0, 1] so the logarithm is always finite.
    #[inline]
    pub fn normal(&self, step: u32, factor: Factor) -> f64 {
        let k = absorb(self.key, ((step as u64) << 2) | factor as u64);
        let u1 = (((k >> 11) + 1) as f64) * (1.0 / 9_007_199_254_740_992.0);
        let k2 = mix64(k ^ SALT_U2);
        let u2 = ((k2 >> 11) as f64) * (1.0 / 9_007_199_254_740_992.0);
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}
