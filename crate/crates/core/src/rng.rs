//! Seeded random streams.
//!
//! Replication `r` of an experiment with base seed `b` uses seed `b ^ r`.
//! Each replication splits into independent ChaCha streams so that the
//! instance layout, the policy's internal draws and the reward noise never
//! share state.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Instance = 0,
    Policy = 1,
    Reward = 2,
}

pub fn replication_seed(base_seed: u64, replication: usize) -> u64 {
    base_seed ^ replication as u64
}

pub fn stream_rng(seed: u64, stream: Stream) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// Derive an independent generator from `parent`, advancing it once.
pub fn fork(parent: &mut SimRng) -> SimRng {
    use rand::RngCore;
    ChaCha8Rng::seed_from_u64(parent.next_u64())
}
