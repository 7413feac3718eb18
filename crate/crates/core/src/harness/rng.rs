//! Named random streams derived from the master seed.
//!
//! Each concern draws from its own ChaCha stream so that adding draws in one
//! place never shifts the sequence seen by another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Init = 1,
    ReproductionChoice = 2,
    Mutation = 3,
    Genesis = 4,
    Sacrifice = 5,
    Cognition = 6,
}

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct RngStreams {
    /// Initial poses, tags, gait phases and genotypes.
    pub init: ChaCha8Rng,
    /// Random-vs-inherited draw at each birth.
    pub reproduction: ChaCha8Rng,
    pub mutation: ChaCha8Rng,
    /// Fresh random genotypes after the initial population.
    pub genesis: ChaCha8Rng,
    pub sacrifice: ChaCha8Rng,
    /// Only consumed by the coin-flip controller.
    pub cognition: ChaCha8Rng,
}

impl RngStreams {
    pub fn new(seed: u64) -> Self {
        let s = |st: Stream| stream_rng(seed, st as u64);
        Self {
            init: s(Stream::Init),
            reproduction: s(Stream::ReproductionChoice),
            mutation: s(Stream::Mutation),
            genesis: s(Stream::Genesis),
            sacrifice: s(Stream::Sacrifice),
            cognition: s(Stream::Cognition),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_independent_and_reproducible() {
        let mut a = RngStreams::new(42);
        let mut b = RngStreams::new(42);
        // draining one stream leaves the others untouched
        for _ in 0..100 {
            let _: f64 = a.mutation.random();
        }
        assert_eq!(a.sacrifice.random::<u64>(), b.sacrifice.random::<u64>());
        assert_ne!(a.init.random::<u64>(), a.genesis.random::<u64>());
    }
}
