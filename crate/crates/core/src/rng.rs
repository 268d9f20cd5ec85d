//! Reproducible random streams.
//!
//! Every stream is a xoshiro256** generator whose 256-bit state is expanded
//! from a 64-bit seed with SplitMix64 (the `seed_from_u64` of
//! `rand_xoshiro`). Derived quantities are defined bit-exactly so another
//! implementation can replay them:
//!
//! * uniform: `u = 1 − (next_u64() >> 11) · 2⁻⁵³`, which lies in `(0, 1]`;
//! * normal: Box–Muller cosine branch, `√(−2 ln u₁) · cos(2π u₂)` with
//!   `u₁` drawn before `u₂`; the sine branch is discarded;
//! * signs: entry `k` of a Rademacher vector is `+1` when bit `k mod 64` of
//!   the `⌊k/64⌋`-th `next_u64()` word is set, `−1` otherwise;
//! * per-trial seeds: [`derive_seed`].

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

pub type SimRng = Xoshiro256StarStar;

pub fn rng_from_seed(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// SplitMix64 output function.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for trial `trial` of amplitude point `point` under `master`:
/// `mix64(mix64(mix64(master) ^ point) ^ trial)`.
pub fn derive_seed(master: u64, point: u64, trial: u64) -> u64 {
    mix64(mix64(mix64(master) ^ point) ^ trial)
}

pub fn uniform_open01(rng: &mut SimRng) -> f64 {
    1.0 - (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub fn standard_normal(rng: &mut SimRng) -> f64 {
    let u1 = uniform_open01(rng);
    let u2 = uniform_open01(rng);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Fills `out` with independent `±amplitude` entries.
pub fn fill_rademacher(rng: &mut SimRng, amplitude: f64, out: &mut [f64]) {
    for chunk in out.chunks_mut(64) {
        let word = rng.next_u64();
        for (k, v) in chunk.iter_mut().enumerate() {
            *v = if (word >> k) & 1 == 1 { amplitude } else { -amplitude };
        }
    }
}
