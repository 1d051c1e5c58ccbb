use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Counter-style generator: the same `(seed, key)` always yields the same stream,
/// independently of which thread asks for it or in what order.
pub fn keyed_rng(seed: u64, key: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(key);
    rng
}
