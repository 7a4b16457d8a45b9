//! Exact laws of the busy-period size `N`, the maximum occupancy `K`, the
//! ranked-server index `L` and the station index `I`.
//!
//! Probabilities come back clamped to `[0, 1]`. A raw value more than `1e-12`
//! outside that range is reported as [`Error::Internal`] rather than hidden.

mod busy;
mod lambert;
mod occupancy;
mod rate;
mod search;

pub use busy::{busy_size_factorial_moment, busy_size_moment, busy_size_pmf, BusySizeDistribution};
pub use lambert::{divisor_terms_needed, lambert_t, lambert_t_with_sieve, q_polygamma, LambertMethod, MAX_SIEVE_LEN};
pub use occupancy::{
    gamblers_ruin, max_occupancy_moment, max_occupancy_pmf, max_occupancy_tail, FairCoin, MomentMethod,
};
pub use rate::{ServerLoad, StableRate};
pub use search::{
    backward_difference, erlang_denominator, erlang_denominators, server_search_body_approx, server_search_moment,
    server_search_tail, station_search_moment, station_search_tail,
};

use crate::error::{Error, Result};

const CLAMP_SLACK: f64 = 1e-12;

pub(crate) fn clamp_probability(value: f64) -> Result<f64> {
    if value.is_nan() || !(-CLAMP_SLACK..=1.0 + CLAMP_SLACK).contains(&value) {
        return Err(Error::Internal(format!("probability evaluated to {value}")));
    }
    Ok(value.clamp(0.0, 1.0))
}

/// `k ↦ Pr[X > k]` for one of the integer-valued laws.
pub trait TailFunction {
    fn tail(&self, k: u64) -> Result<f64>;

    /// `Pr[X = k] = Pr[X > k-1] - Pr[X > k]` for `k >= 1`.
    fn pmf(&self, k: u64) -> Result<f64> {
        if k == 0 {
            return Ok(1.0 - self.tail(0)?);
        }
        Ok((self.tail(k - 1)? - self.tail(k)?).max(0.0))
    }
}

/// Tail of `K`.
#[derive(Debug, Clone, Copy)]
pub struct MaxOccupancy(pub StableRate);

/// Tail of `L`.
#[derive(Debug, Clone, Copy)]
pub struct ServerSearch(pub ServerLoad);

/// Tail of `I`.
#[derive(Debug, Clone, Copy)]
pub struct StationSearch(pub StableRate);

impl TailFunction for MaxOccupancy {
    fn tail(&self, k: u64) -> Result<f64> {
        max_occupancy_tail(self.0, k)
    }
}

impl TailFunction for ServerSearch {
    fn tail(&self, k: u64) -> Result<f64> {
        server_search_tail(self.0, k)
    }
}

impl TailFunction for StationSearch {
    fn tail(&self, k: u64) -> Result<f64> {
        station_search_tail(self.0, k)
    }
}
