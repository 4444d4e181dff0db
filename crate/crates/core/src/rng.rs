//! Deterministic random substreams.
//!
//! Every stochastic routine takes a master seed and addresses its randomness
//! by a `(stream, slot)` pair, e.g. `(run, 0)` for a single-home simulation
//! run or `(replication, home)` for a portfolio. Each pair maps to a disjoint
//! window of one ChaCha8 keystream, so a result never depends on how the
//! work is split across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Words of keystream reserved per slot (2^32 words = 16 GiB).
const SLOT_WORDS: u128 = 1 << 32;

/// Tags that separate keystreams of different consumers of the same seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Domain {
    Simulation = 0x5349_4d55_4c41_5445,
    Portfolio = 0x504f_5254_464f_4c49,
    StateSampling = 0x5354_4154_4553_414d,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Factory for counter-addressed substreams derived from one master seed.
#[derive(Debug, Clone)]
pub struct StreamFactory {
    base: ChaCha8Rng,
}

impl StreamFactory {
    pub fn new(master_seed: u64, domain: Domain) -> Self {
        let mut state = master_seed ^ (domain as u64);
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        Self {
            base: ChaCha8Rng::from_seed(key),
        }
    }

    /// Generator positioned at the start of the `(stream, slot)` window.
    pub fn stream(&self, stream: u64, slot: u32) -> ChaCha8Rng {
        let mut rng = self.base.clone();
        rng.set_stream(stream);
        rng.set_word_pos(u128::from(slot) * SLOT_WORDS);
        rng
    }
}
