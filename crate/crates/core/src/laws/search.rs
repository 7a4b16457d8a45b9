//! Search indices: the ranked-server index `L` of an M/M/∞ system with
//! numbered servers, and the station index `I` of the numbered waiting
//! stations in front of one M/M/1 server.

use super::occupancy::{max_occupancy_moment, max_occupancy_tail, MomentMethod};
use super::{clamp_probability, ServerLoad, StableRate};
use crate::error::{Error, Result};
use crate::numbers::{check_tol, CompensatedSum, MAX_SERIES_TERMS, VALUE_FLOOR};

/// `Δ_m(j) = j^m - (j-1)^m`.
pub fn backward_difference(m: u32, j: u64) -> f64 {
    let j = j as f64;
    j.powi(m as i32) - (j - 1.0).powi(m as i32)
}

/// Erlang denominator `D_l = Σ_{k<=l} l! / ((l-k)! λ^k)` via
/// `D_0 = 1`, `D_l = 1 + (l/λ) D_{l-1}`.
pub fn erlang_denominator(load: ServerLoad, l: u64) -> f64 {
    let lambda = load.lambda();
    (1..=l).fold(1.0, |d, j| 1.0 + j as f64 / lambda * d)
}

/// `[D_0, ..., D_l]`.
pub fn erlang_denominators(load: ServerLoad, l: u64) -> Vec<f64> {
    let lambda = load.lambda();
    let mut out = Vec::with_capacity(l as usize + 1);
    let mut d = 1.0;
    out.push(d);
    for j in 1..=l {
        d = 1.0 + j as f64 / lambda * d;
        out.push(d);
    }
    out
}

/// `Pr[L > l] = 1/D_l`: all of the first `l` servers are busy when a
/// customer arrives (the Erlang loss formula).
pub fn server_search_tail(load: ServerLoad, l: u64) -> Result<f64> {
    clamp_probability(1.0 / erlang_denominator(load, l))
}

/// `Ex[L^m] = Σ_{l>=0} Δ_m(l+1) Pr[L > l]`.
///
/// Summation runs at least to `λ + 10√λ`; past that it stops once the term
/// and a ratio bound on the remainder (`Pr[L>l+1] <= λ/(l+1) Pr[L>l]`) are
/// both below `tol` relative to the sum.
pub fn server_search_moment(load: ServerLoad, m: u32, tol: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::domain("moment order m must be >= 1"));
    }
    check_tol(tol)?;
    let lambda = load.lambda();
    let horizon = lambda + 10.0 * load.spread();
    let mf = m as f64;
    let mut acc = CompensatedSum::new();
    let mut d = 1.0;
    let mut l: u64 = 0;
    loop {
        if l > 0 {
            d = 1.0 + l as f64 / lambda * d;
        }
        let tail = clamp_probability(1.0 / d)?;
        let term = backward_difference(m, l + 1) * tail;
        acc.add(term);
        let lf = l as f64;
        if lf > horizon {
            let sum = acc.value().max(VALUE_FLOOR);
            // Δ_m(j+1) <= m (j+1)^{m-1}; the majorant's step ratio is below rho for j > l.
            let rho = ((lf + 3.0) / (lf + 2.0)).powi(m as i32 - 1) * lambda / (lf + 2.0);
            let next = mf * (lf + 2.0).powi(m as i32 - 1) * tail * lambda / (lf + 1.0);
            if rho < 1.0 && term <= tol * sum && next / (1.0 - rho) <= tol * sum {
                return Ok(acc.value());
            }
        }
        l += 1;
        if l >= MAX_SERIES_TERMS {
            return Err(Error::NotConverged { terms: l, last_term: term });
        }
    }
}

/// Two-term approximation `(1 - l/λ) + 1/(λ(1 - l/λ))` to `Pr[L > l]` in the
/// body `l <= λ - √λ`. Its error is `O(1/λ) + O(1/(λ²(1 - l/λ)³))`.
pub fn server_search_body_approx(load: ServerLoad, l: u64) -> Result<f64> {
    let lambda = load.lambda();
    if l as f64 > load.body_edge() {
        return Err(Error::domain(format!("body approximation needs l <= λ - √λ = {}, got l = {l}", load.body_edge())));
    }
    let x = 1.0 - l as f64 / lambda;
    Ok(x + 1.0 / (lambda * x))
}

/// `Pr[I > i] = (1-λ) λ^{i+1} / (1 - λ^{i+1})`, evaluated as `λ Pr[K > i]` so
/// the identity between the two laws holds bit for bit.
pub fn station_search_tail(rate: StableRate, i: u64) -> Result<f64> {
    rate.require_subcritical("the station index law")?;
    clamp_probability(rate.lambda() * max_occupancy_tail(rate, i)?)
}

/// `Ex[I^m] = λ Ex[K^m]`.
pub fn station_search_moment(rate: StableRate, m: u32, tol: f64) -> Result<f64> {
    rate.require_subcritical("Ex[I^m]")?;
    Ok(rate.lambda() * max_occupancy_moment(rate, m, tol, MomentMethod::Lambert)?)
}
