//! Lambert series `T_l(λ) = Σ n^l λ^n / (1 - λ^n) = Σ σ_l(n) λ^n` and the
//! q-polygamma functions that express them in closed form.

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::StableRate;
use crate::error::{Error, Result};
use crate::numbers::{
    check_tol, eulerian_numbers, CompensatedSum, DivisorSieve, SeriesValue, MAX_SERIES_TERMS, VALUE_FLOOR,
};

/// Largest divisor sieve the `Divisor` route will allocate.
pub const MAX_SIEVE_LEN: usize = 20_000_000;

/// Summation route for [`lambert_t`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum LambertMethod {
    /// `Σ n^l λ^n / (1 - λ^n)`.
    #[default]
    Direct,
    /// `Σ σ_l(n) λ^n` with `σ_l` from a divisor sieve.
    Divisor,
}

/// `T_l(λ)` for `0 < λ < 1`, truncated once the tail bound falls below
/// `tol` relative to the partial sum.
pub fn lambert_t(l: u32, rate: StableRate, tol: f64, method: LambertMethod) -> Result<SeriesValue> {
    check_tol(tol)?;
    rate.require_subcritical("the Lambert series T_l(λ)")?;
    match method {
        LambertMethod::Direct => lambert_direct(l, rate.lambda(), tol),
        LambertMethod::Divisor => {
            let n = divisor_terms_needed(l, rate, tol)?;
            let sieve = DivisorSieve::new(l, n);
            lambert_t_with_sieve(&sieve, rate, tol)
        }
    }
}

fn lambert_direct(l: u32, lambda: f64, tol: f64) -> Result<SeriesValue> {
    let log_l = lambda.ln();
    let lf = l as i32;
    let mut acc = CompensatedSum::new();
    let mut n: u64 = 0;
    loop {
        n += 1;
        let nf = n as f64;
        let x = nf * log_l;
        let term = nf.powi(lf) * x.exp() / -x.exp_m1();
        acc.add(term);
        let sum = acc.value().max(VALUE_FLOOR);
        let rho = ((nf + 2.0) / (nf + 1.0)).powi(lf) * lambda;
        if rho < 1.0 && term <= tol * sum {
            // Σ_{j>n} j^l λ^j / (1-λ^j) <= (n+1)^l λ^{n+1} / ((1-ρ)(1-λ^{n+1}))
            let y = (nf + 1.0) * log_l;
            let bound = (nf + 1.0).powi(lf) * y.exp() / ((1.0 - rho) * -y.exp_m1());
            if bound <= tol * sum {
                return Ok(SeriesValue { value: acc.value(), terms_used: n, last_term: term, converged: true });
            }
        }
        if n >= MAX_SERIES_TERMS {
            return Err(Error::NotConverged { terms: n, last_term: term });
        }
    }
}

/// Sieve length needed by the divisor route: with `σ_l(n) <= n^{l+1}` and the
/// lower bound `T_l(λ) >= λ/(1-λ)`, the smallest `N` whose tail bound is
/// below `tol · λ/(1-λ)`.
pub fn divisor_terms_needed(l: u32, rate: StableRate, tol: f64) -> Result<usize> {
    check_tol(tol)?;
    rate.require_subcritical("the Lambert series T_l(λ)")?;
    let lambda = rate.lambda();
    let lower = lambda / (1.0 - lambda);
    let e = l as i32 + 1;
    let mut n: usize = 1;
    loop {
        let nf = n as f64;
        let rho = ((nf + 2.0) / (nf + 1.0)).powi(e) * lambda;
        if rho < 1.0 {
            let bound = (nf + 1.0).powi(e) * ((nf + 1.0) * lambda.ln()).exp() / (1.0 - rho);
            if bound <= tol * lower {
                return Ok(n);
            }
        }
        if n >= MAX_SIEVE_LEN {
            return Err(Error::NotConverged { terms: n as u64, last_term: f64::NAN });
        }
        // Grow geometrically once far from the answer.
        n = if n < 1024 { n + 1 } else { n + n / 64 };
    }
}

/// `Σ_{n<=N} σ_l(n) λ^n` using a prebuilt sieve (`N` = sieve length).
///
/// Fails if the sieve is too short for `tol`.
pub fn lambert_t_with_sieve(sieve: &DivisorSieve, rate: StableRate, tol: f64) -> Result<SeriesValue> {
    let needed = divisor_terms_needed(sieve.power(), rate, tol)?;
    if sieve.len() < needed {
        return Err(Error::domain(format!(
            "divisor sieve of length {} is shorter than the {needed} terms needed",
            sieve.len()
        )));
    }
    let lambda = rate.lambda();
    let mut acc = CompensatedSum::new();
    let mut power = 1.0;
    let mut last = 0.0;
    for &s in &sieve.as_slice()[..needed] {
        power *= lambda;
        last = s * power;
        acc.add(last);
    }
    Ok(SeriesValue { value: acc.value(), terms_used: needed as u64, last_term: last, converged: true })
}

/// The `l`-th q-polygamma function `ψ_q^{(l)}(x)`, `0 < q < 1`, `x > 0`.
///
/// `ψ_q(x) = -log(1-q) + log q Σ_{n>=0} q^{n+x} / (1 - q^{n+x})`, and for
/// `l >= 1` each term is differentiated in closed form: with `z = q^{n+x}`,
/// `d/dx = log q · z d/dz`, so the `l`-th derivative of `z/(1-z)` is
/// `(log q)^l z A_l(z) / (1-z)^{l+1}` with `A_l` the Eulerian polynomial.
pub fn q_polygamma(l: u32, q: f64, x: f64, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::domain(format!("q-polygamma needs 0 < q < 1, got {q}")));
    }
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::domain(format!("q-polygamma needs x > 0, got {x}")));
    }
    let log_q = q.ln();
    let eulerian: Vec<f64> = eulerian_numbers(l as usize).iter().map(|a| a.to_f64().unwrap_or(f64::INFINITY)).collect();
    let l_factorial: f64 = (1..=l).map(|j| j as f64).product();
    // z A_l(z) / (1-z)^{l+1}; for l = 0 this is z / (1-z).
    let term_at = |y: f64| {
        let z = (y * log_q).exp();
        let one_minus = -(y * log_q).exp_m1();
        let poly = eulerian.iter().rev().fold(0.0, |acc, &a| acc * z + a);
        z * poly / one_minus.powi(l as i32 + 1)
    };

    let mut acc = CompensatedSum::new();
    let mut n: u64 = 0;
    loop {
        let y = n as f64 + x;
        let term = term_at(y);
        acc.add(term);
        let sum = acc.value().abs().max(VALUE_FLOOR);
        let z_next = ((y + 1.0) * log_q).exp();
        let bound = l_factorial * z_next / ((1.0 - z_next).powi(l as i32 + 1) * (1.0 - q));
        if term <= tol * sum && bound <= tol * sum {
            break;
        }
        n += 1;
        if n >= MAX_SERIES_TERMS {
            return Err(Error::NotConverged { terms: n, last_term: term });
        }
    }
    let s = acc.value();
    if l == 0 {
        Ok(-(-q).ln_1p() + log_q * s)
    } else {
        Ok(log_q.powi(l as i32 + 1) * s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rate(l: f64) -> StableRate {
        StableRate::new(l).unwrap()
    }

    #[test]
    fn direct_and_divisor_agree() {
        for &lam in &[0.3, 0.5, 0.7, 0.9] {
            for l in 0..=3 {
                let d = lambert_t(l, rate(lam), 1e-15, LambertMethod::Direct).unwrap();
                let s = lambert_t(l, rate(lam), 1e-15, LambertMethod::Divisor).unwrap();
                assert!(d.converged && s.converged);
                assert!((d.value - s.value).abs() <= 1e-12 * d.value, "λ={lam} l={l}");
            }
        }
    }

    #[test]
    fn t0_at_half_matches_rearranged_sum() {
        // T_0(1/2) = Σ_{k>=0} 1/(2^{k+1} - 1)
        let oracle: f64 = (0..200).map(|k| 1.0 / (2f64.powi(k + 1) - 1.0)).sum();
        let t = lambert_t(0, rate(0.5), 1e-15, LambertMethod::Direct).unwrap();
        assert!((t.value - oracle).abs() < 1e-14);
        assert!((t.value - 1.606_695).abs() < 1e-6);
    }

    #[test]
    fn small_lambda_limit() {
        let lam = 1e-6;
        let t = lambert_t(0, rate(lam), 1e-15, LambertMethod::Direct).unwrap();
        assert!((t.value - lam).abs() < 3.0 * lam * lam);
    }

    #[test]
    fn rejects_critical_rate() {
        assert!(lambert_t(1, rate(1.0), 1e-10, LambertMethod::Direct).is_err());
    }

    #[test]
    fn sieve_reuse_across_lambda_grid() {
        let sieve = DivisorSieve::new(2, divisor_terms_needed(2, rate(0.9), 1e-14).unwrap());
        for &lam in &[0.3, 0.5, 0.9] {
            let a = lambert_t_with_sieve(&sieve, rate(lam), 1e-14).unwrap();
            let b = lambert_t(2, rate(lam), 1e-14, LambertMethod::Direct).unwrap();
            assert!((a.value - b.value).abs() <= 1e-12 * b.value);
        }
        assert!(lambert_t_with_sieve(&sieve, rate(0.99), 1e-14).is_err());
    }

    #[test]
    fn polygamma_identities() {
        for &lam in &[0.3, 0.5] {
            let psi = q_polygamma(0, lam, 1.0, 1e-15).unwrap();
            let t0 = (psi + (1.0 - lam).ln()) / lam.ln();
            let direct = lambert_t(0, rate(lam), 1e-15, LambertMethod::Direct).unwrap().value;
            assert!((t0 - direct).abs() <= 1e-10 * direct);
            for l in 1..=3 {
                let psi_l = q_polygamma(l, lam, 1.0, 1e-15).unwrap();
                let tl = psi_l / lam.ln().powi(l as i32 + 1);
                let direct = lambert_t(l, rate(lam), 1e-15, LambertMethod::Direct).unwrap().value;
                assert!((tl - direct).abs() <= 1e-9 * direct, "λ={lam} l={l}");
            }
        }
    }

    #[test]
    fn polygamma_is_derivative_of_digamma() {
        // central finite difference of ψ_q in x
        let (q, x, h) = (0.6, 1.7, 1e-4);
        let d = (q_polygamma(0, q, x + h, 1e-15).unwrap() - q_polygamma(0, q, x - h, 1e-15).unwrap()) / (2.0 * h);
        let psi1 = q_polygamma(1, q, x, 1e-15).unwrap();
        assert!((d - psi1).abs() < 1e-7 * psi1.abs().max(1.0));
        let d2 = (q_polygamma(1, q, x + h, 1e-15).unwrap() - q_polygamma(1, q, x - h, 1e-15).unwrap()) / (2.0 * h);
        let psi2 = q_polygamma(2, q, x, 1e-15).unwrap();
        assert!((d2 - psi2).abs() < 1e-7 * psi2.abs().max(1.0));
    }

    #[test]
    fn polygamma_converged_against_more_terms() {
        let a = q_polygamma(0, 0.8, 1.0, 1e-10).unwrap();
        let b = q_polygamma(0, 0.8, 1.0, 1e-15).unwrap();
        assert!((a - b).abs() <= 1e-9 * b.abs());
        assert!(q_polygamma(0, 1.0, 1.0, 1e-10).is_err());
        assert!(q_polygamma(0, 0.5, 0.0, 1e-10).is_err());
    }
}
