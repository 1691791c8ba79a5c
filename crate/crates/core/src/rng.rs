//! Seeded, splittable random streams.
//!
//! Every stream is a ChaCha8 generator keyed by a 64-bit seed and positioned
//! on an independent stream id, so `(seed, stream)` pins the whole draw
//! sequence and parallel workers never share state.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        RngStream { seed, stream, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Draws a key naming one joint realization of all triggering sets.
    pub fn world(&mut self) -> WorldKey {
        WorldKey(self.inner.next_u64())
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.inner.try_fill_bytes(dest)
    }
}

/// A live-edge realization. The triggering set of node `v` in this world is
/// drawn from its own stream, so it does not depend on the order in which
/// nodes are visited; lazy forward simulation and eager live-edge sampling
/// see the same sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WorldKey(pub u64);

impl WorldKey {
    pub fn node_rng(self, v: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(v as u64);
        rng
    }
}
