// SPDX-License-Identifier: Apache-2.0

//! Seeded random streams.
//!
//! Sample `i` of a run seeded with `seed` always draws from ChaCha8 stream
//! `i` of that seed, independent of which thread evaluates it.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
