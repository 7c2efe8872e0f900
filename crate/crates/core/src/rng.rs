//! Pinned random number streams.
//!
//! Every random quantity in the crate is drawn from a ChaCha8 stream keyed by
//! `(seed, stream)`: the 64-bit seed is expanded with `SeedableRng::seed_from_u64`
//! and the stream id selects one of ChaCha's 2^64 independent counters via
//! `set_stream`. Because ChaCha is counter based, streams never overlap and
//! the output is identical across platforms and thread counts.
//!
//! Batch runs derive a per-path seed with [`path_seed`] (a SplitMix64 mix of
//! the base seed and the path index), then open the usual streams on it.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Name recorded in manifests.
pub const PRNG_NAME: &str = "ChaCha8Rng(rand_chacha 0.9; seed_from_u64 + set_stream)";

/// Stream ids used by the samplers.
pub mod streams {
    pub const STRIP_POSITIVE: u64 = 0;
    pub const STRIP_NEGATIVE: u64 = 1;
    pub const TEMPERED: u64 = 2;
    pub const STABLE: u64 = 3;
}

pub type StreamRng = ChaCha8Rng;

/// Opens substream `stream` of `seed`.
pub fn substream(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// SplitMix64 finaliser.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of path `index` in a batch started from `seed`.
pub fn path_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index.wrapping_add(0x5851_f42d_4c95_7f2d)))
}

/// Uniform draw on the open interval (0, 1), 53-bit resolution.
#[inline]
pub fn open_unit<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Exponential draw with the given rate, by inversion.
#[inline]
pub fn exponential<R: RngCore + ?Sized>(rng: &mut R, rate: f64) -> f64 {
    -open_unit(rng).ln() / rate
}

/// Fair ±1.
#[inline]
pub fn sign<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    if rng.random::<bool>() {
        1.0
    } else {
        -1.0
    }
}
