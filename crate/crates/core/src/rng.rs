//! Seeded substreams for reproducible parallel Monte Carlo.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Independent random stream for one unit of Monte Carlo work.
///
/// Every network realization (and every oracle sample chunk) owns the stream
/// addressed by its index, so results are bit-identical no matter how the
/// work is split across threads.
pub fn substream(master_seed: u64, index: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}
