use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

/// Generator name recorded in output metadata. Change it together with the
/// type below.
pub const RNG_NAME: &str = "chacha12";

/// A reproducible random stream: ChaCha12 keyed by `seed`, with the
/// replication index selecting one of its 2^64 independent streams.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha12Rng,
}

/// The `(seed, stream_id)` pair, for metadata.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StreamKey {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self { seed, stream_id, rng }
    }

    pub fn key(&self) -> StreamKey {
        StreamKey { seed: self.seed, stream_id: self.stream_id }
    }

    /// `true` with probability `p`.
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.rng.random::<f64>() < p
    }

    /// Uniform index in `0..n`; `n` must be positive.
    pub fn index(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    /// Exponential variate with the given rate.
    pub fn exponential(&mut self, rate: f64) -> f64 {
        // 1 - U lies in (0, 1], so the log is finite.
        -(1.0 - self.rng.random::<f64>()).ln() / rate
    }
}
