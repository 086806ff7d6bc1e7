//! Seeding for Monte-Carlo work.
//!
//! Every trial or iteration gets its own ChaCha stream derived from the master seed, so the
//! draws seen by iteration `i` never depend on how iterations are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator for the `stream`-th independent chunk under `master_seed`.
pub fn stream_rng(master_seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}
