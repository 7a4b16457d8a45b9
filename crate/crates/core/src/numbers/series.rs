//! Truncated evaluation of convergent series: `ζ(m)` and `Li_k(λ)`.

use std::f64::consts::PI;

use serde::Serialize;

use super::combinatorial::{bernoulli_numbers, rational_to_f64};
use super::sum::CompensatedSum;
use crate::error::{Error, Result};

/// Hard cap on the number of terms any series may use.
pub const MAX_SERIES_TERMS: u64 = 100_000_000;

/// Denominator floor for relative convergence tests, so a zero partial sum
/// does not demand an exactly zero tail.
pub const VALUE_FLOOR: f64 = 1e-300;

/// A truncated infinite sum together with how it was truncated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: f64,
    pub terms_used: u64,
    /// Magnitude of the final term included in `value`.
    pub last_term: f64,
    pub converged: bool,
}

impl SeriesValue {
    /// Relative tolerance scale `max(|value|, VALUE_FLOOR)`.
    pub fn scale(&self) -> f64 {
        self.value.abs().max(VALUE_FLOOR)
    }
}

pub(crate) fn check_tol(tol: f64) -> Result<()> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("tolerance must be positive and finite, got {tol}")))
    }
}

/// `ζ(m) = Σ_{n>=1} n^{-m}` for integer `m >= 2`.
///
/// After `N` terms the remaining tail lies between `∫_{N+1}^∞ x^{-m} dx` and
/// `∫_N^∞ x^{-m} dx`; the midpoint of that bracket is added to the partial sum
/// and summation stops once both the bracket half-width and the last term are
/// below `tol` relative to the value.
pub fn zeta_int(m: u32, tol: f64) -> Result<SeriesValue> {
    if m <= 1 {
        return Err(Error::domain(format!("ζ(m) diverges for m = {m} <= 1")));
    }
    check_tol(tol)?;
    let mf = m as f64;
    let tail = |n: f64| n.powf(1.0 - mf) / (mf - 1.0);
    let mut sum = CompensatedSum::new();
    let mut n: u64 = 0;
    loop {
        n += 1;
        let nf = n as f64;
        let term = nf.powi(-(m as i32));
        sum.add(term);
        let hi = tail(nf);
        let lo = tail(nf + 1.0);
        let value = sum.value() + 0.5 * (hi + lo);
        let scale = value.abs().max(VALUE_FLOOR);
        if term <= tol * scale && 0.5 * (hi - lo) <= tol * scale {
            return Ok(SeriesValue { value, terms_used: n, last_term: term, converged: true });
        }
        if n >= MAX_SERIES_TERMS {
            return Err(Error::NotConverged { terms: n, last_term: term });
        }
    }
}

/// `ζ(m)` to near double precision: the Bernoulli closed form for even `m`,
/// the bracketed series otherwise.
pub fn zeta(m: u32) -> Result<f64> {
    if m <= 1 {
        return Err(Error::domain(format!("ζ(m) diverges for m = {m} <= 1")));
    }
    if m.is_multiple_of(2) {
        // ζ(2k) = |B_2k| (2π)^{2k} / (2 (2k)!)
        let b = rational_to_f64(&bernoulli_numbers(m as usize)[m as usize]).abs();
        let mut v = 0.5 * b;
        for j in 1..=m {
            v *= 2.0 * PI / j as f64;
        }
        return Ok(v);
    }
    // Odd m >= 3 converges fast enough that 2e-16 costs at most ~1e5 terms.
    Ok(zeta_int(m, 2e-16)?.value)
}

/// `Li_k(λ) = Σ_{n>=1} λ^n / n^k`.
///
/// For `λ <= 0.9` the defining series is summed directly and truncated by the
/// geometric tail bound `λ^{N+1} / ((N+1)^k (1 - λ))`. Closer to one that
/// series needs too many terms, so the expansion in `μ = log λ`
///
/// `Li_k(e^μ) = μ^{k-1}/(k-1)! (H_{k-1} - log(-μ)) + Σ_{j != k-1} ζ(k-j) μ^j / j!`
///
/// is used instead, with `ζ(-n) = (-1)^n B_{n+1}/(n+1)` for the negative
/// arguments. At `λ = 1` and `k >= 2` the value is `ζ(k)`.
pub fn polylog(k: u32, lambda: f64, tol: f64) -> Result<SeriesValue> {
    if k == 0 {
        return Err(Error::domain("polylogarithm order k must be >= 1"));
    }
    check_tol(tol)?;
    if !(lambda > 0.0) || lambda.is_nan() {
        return Err(Error::domain(format!("Li_k(λ) requires λ > 0, got {lambda}")));
    }
    if lambda > 1.0 || (lambda == 1.0 && k == 1) {
        return Err(Error::domain(format!("Li_{k}(λ) diverges at λ = {lambda}; the series needs λ < 1")));
    }
    if lambda == 1.0 {
        return zeta_int(k, tol);
    }
    if lambda <= 0.9 {
        polylog_direct(k, lambda, tol)
    } else {
        polylog_log_series(k, lambda, tol)
    }
}

fn polylog_direct(k: u32, lambda: f64, tol: f64) -> Result<SeriesValue> {
    let mut sum = CompensatedSum::new();
    let mut power = 1.0;
    let mut n: u64 = 0;
    loop {
        n += 1;
        power *= lambda;
        let term = power / (n as f64).powi(k as i32);
        sum.add(term);
        let value = sum.value();
        let scale = value.abs().max(VALUE_FLOOR);
        let bound = power * lambda / ((n + 1) as f64).powi(k as i32) / (1.0 - lambda);
        if term <= tol * scale && bound <= tol * scale {
            return Ok(SeriesValue { value, terms_used: n, last_term: term, converged: true });
        }
        if n >= MAX_SERIES_TERMS {
            return Err(Error::NotConverged { terms: n, last_term: term });
        }
    }
}

fn polylog_log_series(k: u32, lambda: f64, tol: f64) -> Result<SeriesValue> {
    let mu = lambda.ln();
    let k = k as usize;
    const MAX_J: usize = 80;
    let bern = bernoulli_numbers(MAX_J + 2);
    let mut sum = CompensatedSum::new();
    let mut mu_pow_over_fact = 1.0; // μ^j / j!
    let mut last = 0.0;
    let mut terms = 0u64;
    for j in 0..=MAX_J {
        if j > 0 {
            mu_pow_over_fact *= mu / j as f64;
        }
        let term = if j + 1 == k {
            let harmonic: f64 = (1..k).map(|i| 1.0 / i as f64).sum();
            mu_pow_over_fact * (harmonic - (-mu).ln())
        } else if j + 2 <= k {
            zeta((k - j) as u32)? * mu_pow_over_fact
        } else {
            let neg = j - k; // ζ(-neg)
            let b = rational_to_f64(&bern[neg + 1]);
            let sign = if neg.is_multiple_of(2) { 1.0 } else { -1.0 };
            sign * b / (neg + 1) as f64 * mu_pow_over_fact
        };
        terms += 1;
        if term == 0.0 {
            continue;
        }
        sum.add(term);
        last = term.abs();
        let value = sum.value();
        // Past j = k the nonzero terms shrink by at least (μ/2π)^2 each, so the
        // tail is a small multiple of the last term.
        if j >= k && last <= 0.5 * tol * value.abs().max(VALUE_FLOOR) {
            return Ok(SeriesValue { value, terms_used: terms, last_term: last, converged: true });
        }
    }
    Err(Error::NotConverged { terms, last_term: last })
}
