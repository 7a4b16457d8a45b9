//! Sample generation for `simulate` and `compare`.
//!
//! Stream ids pack the λ-grid position, the process and the chunk:
//! `grid << 32 | process << 24 | chunk`. Busy periods are split over a fixed
//! number of chunks, so the samples do not depend on the thread count.

use rayon::prelude::*;

use crate::error::Result;
use crate::laws::{ServerLoad, StableRate};
use crate::simulation::{run_ranked_servers_capped, run_station_process_capped, BusyPeriodSampler, RngStream};

pub const PROCESS_MM1: u64 = 0;
pub const PROCESS_STATIONS: u64 = 1;
pub const PROCESS_RANKED: u64 = 2;
pub const PROCESS_RUIN: u64 = 3;

pub fn stream_id(grid_index: usize, process: u64, chunk: u64) -> u64 {
    (grid_index as u64) << 32 | process << 24 | chunk
}

/// `N` and `K` for each of `periods` busy periods.
pub fn mm1_samples(
    seed: u64,
    grid_index: usize,
    rate: StableRate,
    periods: u64,
    chunks: u64,
    event_cap: u64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let sampler = BusyPeriodSampler::new(rate)?.with_event_cap(event_cap);
    let chunks = chunks.clamp(1, 1 << 24);
    let parts: Vec<Result<Vec<(f64, f64)>>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let count = periods / chunks + u64::from(c < periods % chunks);
            let mut rng = RngStream::new(seed, stream_id(grid_index, PROCESS_MM1, c));
            (0..count).map(|_| sampler.sample_summary(&mut rng).map(|s| (s.n as f64, s.k as f64))).collect()
        })
        .collect();
    let mut n = Vec::with_capacity(periods as usize);
    let mut k = Vec::with_capacity(periods as usize);
    for part in parts {
        for (a, b) in part? {
            n.push(a);
            k.push(b);
        }
    }
    Ok((n, k))
}

/// `I` for `recorded` arrivals after `warmup` discarded ones.
pub fn station_samples(
    seed: u64,
    grid_index: usize,
    rate: StableRate,
    recorded: u64,
    warmup: u64,
    event_cap: u64,
) -> Result<Vec<f64>> {
    let mut rng = RngStream::new(seed, stream_id(grid_index, PROCESS_STATIONS, 0));
    let raw = run_station_process_capped(&mut rng, rate, recorded + warmup, warmup, event_cap)?;
    Ok(raw.into_iter().map(f64::from).collect())
}

/// `L` for `recorded` arrivals after `warmup` discarded ones.
pub fn ranked_samples(
    seed: u64,
    grid_index: usize,
    load: ServerLoad,
    recorded: u64,
    warmup: u64,
    event_cap: u64,
) -> Result<Vec<f64>> {
    let mut rng = RngStream::new(seed, stream_id(grid_index, PROCESS_RANKED, 0));
    let raw = run_ranked_servers_capped(&mut rng, load, recorded + warmup, warmup, event_cap)?;
    Ok(raw.into_iter().map(f64::from).collect())
}
