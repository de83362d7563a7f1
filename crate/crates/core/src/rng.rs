//! Keyed counter-based random streams.
//!
//! Every random object is drawn from a ChaCha8 stream whose 256-bit key is
//! derived from a domain tag and the user seed, and whose 64-bit stream id
//! selects a replication. A replication therefore sees the same numbers no
//! matter which thread runs it or in which order replications are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Domain tags. Distinct tags give statistically independent streams for the
/// same seed.
pub mod tag {
    pub const UNIFORM: &str = "uniform-sample";
    pub const SPACINGS: &str = "uniform-spacings";
    pub const WINDOW: &str = "uniform-window";
    pub const POISSONIZED: &str = "poissonized";
    pub const GAUSSIAN: &str = "gaussian-path";
    pub const POISSON_PATH: &str = "poisson-path";
    pub const SMALL_BALL: &str = "small-ball";
    pub const CLUSTER_TAIL: &str = "cluster-tail";
    pub const POIS_CHECK_POIS: &str = "poissonization-poisson";
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01B3)
    })
}

/// The stream for replication `index` of `(tag, seed)`.
pub fn stream(tag: &str, seed: u64, index: u64) -> StreamRng {
    let mut state = fnv1a(tag.as_bytes());
    let mixed = splitmix64(&mut state) ^ seed;
    let mut state = mixed;
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}
