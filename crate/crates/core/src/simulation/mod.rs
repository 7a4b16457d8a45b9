//! Monte Carlo engines for the M/M/1 busy period, the ordered waiting
//! stations and the ranked M/M/∞ servers.
//!
//! Each replication draws from its own [`RngStream`]; a fixed
//! `(seed, stream_id)` reproduces a run sample for sample.

mod estimate;
mod processes;
mod rng;
mod trace;

pub use estimate::{
    estimate_mean, estimate_moments, estimate_tails, z_score, MeanEstimate, MomentEstimate, SampleKind, TailEstimate,
    DEFAULT_BATCHES, MIN_BATCH_SIZE,
};
pub use processes::{
    attach_holding_times, default_ranked_warmup, default_station_warmup, gamblers_ruin_sim, run_ranked_servers,
    run_ranked_servers_capped, run_station_process, run_station_process_capped, sample_busy_period, BusyPeriodSampler,
    BusySummary, RuinEstimate, ServerBank, StationState, DEFAULT_EVENT_CAP, MIN_WARMUP,
};
pub use rng::{RngStream, StreamKey, RNG_NAME};
pub use trace::{Event, EventTrace};
