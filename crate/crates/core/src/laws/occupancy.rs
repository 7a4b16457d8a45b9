//! Maximum occupancy `K` of an M/M/1 busy period and the gambler's-ruin law
//! it is derived from.

use serde::{Deserialize, Serialize};

use super::lambert::{lambert_t, LambertMethod};
use super::{clamp_probability, StableRate};
use crate::error::{Error, Result};
use crate::numbers::{binomial, check_tol, CompensatedSum, MAX_SERIES_TERMS, VALUE_FLOOR};
use num_traits::ToPrimitive;

/// `Pr[K > k] = (1-λ) λ^k / (1 - λ^{k+1})`, and `1/(k+1)` at `λ = 1`.
pub fn max_occupancy_tail(rate: StableRate, k: u64) -> Result<f64> {
    if k == 0 {
        return Ok(1.0);
    }
    if rate.is_critical() {
        return Ok(1.0 / (k as f64 + 1.0));
    }
    let lambda = rate.lambda();
    let log_l = lambda.ln();
    let kf = k as f64;
    // 1 - λ^{k+1} through expm1 keeps full precision for λ near one.
    let value = (1.0 - lambda) * (kf * log_l).exp() / -((kf + 1.0) * log_l).exp_m1();
    clamp_probability(value)
}

/// `Pr[K = k] = (1-λ)^2 λ^{k-1} / ((1-λ^k)(1-λ^{k+1}))` for `k >= 1`.
///
/// Written without the subtraction of adjacent tails, so it keeps full
/// relative precision deep into the tail.
pub fn max_occupancy_pmf(rate: StableRate, k: u64) -> Result<f64> {
    if k == 0 {
        return Ok(0.0);
    }
    let kf = k as f64;
    if rate.is_critical() {
        return Ok(1.0 / (kf * (kf + 1.0)));
    }
    let lambda = rate.lambda();
    let log_l = lambda.ln();
    let one_minus = 1.0 - lambda;
    let value =
        one_minus * one_minus * ((kf - 1.0) * log_l).exp() / ((kf * log_l).exp_m1() * ((kf + 1.0) * log_l).exp_m1());
    clamp_probability(value)
}

/// How to treat a fair coin in [`gamblers_ruin`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FairCoin {
    /// `p = 1/2` is an error; the biased formula is undefined there.
    Reject,
    /// `p = 1/2` returns the symmetric answer `v / (v + w)`.
    Allow,
}

/// Probability that `Q` (holding `w`) is ruined by `P` (holding `v`) when `P`
/// wins each unit bet with probability `p`:
/// `((q/p)^v - 1) / ((q/p)^{v+w} - 1)`.
pub fn gamblers_ruin(p: f64, v: u64, w: u64, fair: FairCoin) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("win probability must satisfy 0 < p < 1, got {p}")));
    }
    if v == 0 || w == 0 {
        return Err(Error::domain("both players must start with at least one unit"));
    }
    if p == 0.5 {
        return match fair {
            FairCoin::Allow => Ok(v as f64 / (v + w) as f64),
            FairCoin::Reject => {
                Err(Error::domain("the biased ruin formula needs p != 1/2; allow the fair-coin branch explicitly"))
            }
        };
    }
    let log_ratio = ((1.0 - p) / p).ln();
    let value = (v as f64 * log_ratio).exp_m1() / ((v + w) as f64 * log_ratio).exp_m1();
    clamp_probability(value)
}

/// Evaluation route for the moments of `K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum MomentMethod {
    /// Linear combination of Lambert series `T_l(λ)`.
    #[default]
    Lambert,
    /// Term-by-term `Σ k^m Pr[K = k]` with a geometric tail bound.
    Direct,
}

/// `Ex[K^m]` for `0 < λ < 1`.
///
/// The Lambert route evaluates
/// `((1-λ)/λ) Σ_{l<m} C(m,l) (-1)^{m-1-l} T_l(λ)`; the direct route sums the
/// distribution. The two share no code beyond `λ` itself.
pub fn max_occupancy_moment(rate: StableRate, m: u32, tol: f64, method: MomentMethod) -> Result<f64> {
    if m == 0 {
        return Err(Error::domain("moment order m must be >= 1"));
    }
    check_tol(tol)?;
    rate.require_subcritical("Ex[K^m]")?;
    match method {
        MomentMethod::Lambert => moment_via_lambert(rate, m, tol),
        MomentMethod::Direct => moment_direct(rate, m, tol),
    }
}

fn moment_via_lambert(rate: StableRate, m: u32, tol: f64) -> Result<f64> {
    let lambda = rate.lambda();
    let inner_tol = tol / 16.0;
    let mut acc = CompensatedSum::new();
    for l in 0..m {
        let c = binomial(m as u64, l as u64).to_f64().unwrap_or(f64::INFINITY);
        let sign = if (m - 1 - l).is_multiple_of(2) { 1.0 } else { -1.0 };
        let t = lambert_t(l, rate, inner_tol, LambertMethod::Direct)?;
        acc.add(sign * c * t.value);
    }
    Ok((1.0 - lambda) / lambda * acc.value())
}

fn moment_direct(rate: StableRate, m: u32, tol: f64) -> Result<f64> {
    let lambda = rate.lambda();
    let mut acc = CompensatedSum::new();
    let mut k: u64 = 0;
    loop {
        k += 1;
        let kf = k as f64;
        let term = kf.powi(m as i32) * max_occupancy_pmf(rate, k)?;
        acc.add(term);
        let sum = acc.value().max(VALUE_FLOOR);
        // For j > k: Pr[K = j] <= c λ^{j-1}, c = (1-λ)^2 / (1-λ^{k+1})^2, and
        // j^m λ^{j-1} shrinks at least by rho per step.
        let rho = ((kf + 2.0) / (kf + 1.0)).powi(m as i32) * lambda;
        if rho < 1.0 && term <= tol * sum {
            let one_minus_next = -((kf + 1.0) * lambda.ln()).exp_m1();
            let c = (1.0 - lambda).powi(2) / (one_minus_next * one_minus_next);
            let bound = c * (kf + 1.0).powi(m as i32) * lambda.powf(kf) / (1.0 - rho);
            if bound <= tol * sum {
                return Ok(acc.value());
            }
        }
        if k >= MAX_SERIES_TERMS {
            return Err(Error::NotConverged { terms: k, last_term: term });
        }
    }
}
