//! Deterministic splittable seeding: every draw sequence is a pure
//! function of (master_seed, stream_id), and distinct stream ids give
//! independent ChaCha streams.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_id: u64,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl SeedSpec {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        SeedSpec { master_seed, stream_id }
    }

    /// The ChaCha key is expanded from the master seed only; the stream id
    /// selects the cipher stream, so streams never overlap.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut state = self.master_seed;
        let mut key = [0u8; 32];
        for chunk in key.chunks_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(self.stream_id);
        rng
    }

    /// Derived sub-stream: hash-mixes the child index into the stream id.
    pub fn child(&self, index: u64) -> SeedSpec {
        let mut state = self
            .stream_id
            .wrapping_mul(0x2545_f491_4f6c_dd1d)
            ^ index.wrapping_add(0x9e37_79b9_7f4a_7c15);
        SeedSpec {
            master_seed: self.master_seed,
            stream_id: splitmix64(&mut state),
        }
    }
}
