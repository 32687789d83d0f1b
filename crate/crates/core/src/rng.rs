//! Deterministic random number generation.
//!
//! All sampling in the crate goes through ChaCha8 with an explicit seed and a
//! stream-splitting rule: sample index `i` of a run seeded with `s` always
//! draws from `substream(s, i)`. Results are therefore independent of thread
//! count and iteration order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::op::C64;

/// The generator for sample index `index` of a run seeded with `seed`.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Standard complex Gaussian: independent N(0, 1) real and imaginary parts.
pub fn complex_gaussian(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}
