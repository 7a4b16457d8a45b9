//! Busy-period size `N`: the Catalan distribution and its moments.

use num_traits::ToPrimitive;

use super::{clamp_probability, StableRate};
use crate::error::{Error, Result};
use crate::numbers::{catalan, double_factorial_odd, stirling2_triangle};

/// Largest `n` for which `A_n` is converted to `f64` directly.
const EXACT_CATALAN_LIMIT: u64 = 60;

/// `Pr[N = n] = A_n p^{n-1} q^n`, valid for `0 < λ <= 1`.
pub fn busy_size_pmf(rate: StableRate, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("a busy period serves at least one customer (n >= 1)"));
    }
    let p = rate.arrival_prob();
    let q = rate.departure_prob();
    let value = if n <= EXACT_CATALAN_LIMIT {
        let a = catalan(n)?.to_f64().unwrap_or(f64::INFINITY);
        a * p.powi((n - 1) as i32) * q.powi(n as i32)
    } else {
        // log A_n = log Γ(2n-1) - log Γ(n) - log Γ(n+1)
        let nf = n as f64;
        let log_a = libm::lgamma(2.0 * nf - 1.0) - libm::lgamma(nf) - libm::lgamma(nf + 1.0);
        (log_a + (nf - 1.0) * p.ln() + nf * q.ln()).exp()
    };
    clamp_probability(value)
}

/// Iterator over `(n, Pr[N = n])` for `n = 1, 2, ...` using the ratio
/// `Pr[N = n+1] / Pr[N = n] = 2 (2n - 1) p q / (n + 1)`.
#[derive(Debug, Clone)]
pub struct BusySizeDistribution {
    pq: f64,
    n: u64,
    current: f64,
}

impl BusySizeDistribution {
    pub fn new(rate: StableRate) -> Self {
        Self { pq: rate.arrival_prob() * rate.departure_prob(), n: 0, current: rate.departure_prob() }
    }
}

impl Iterator for BusySizeDistribution {
    type Item = (u64, f64);

    fn next(&mut self) -> Option<Self::Item> {
        if self.n > 0 {
            let n = self.n as f64;
            self.current *= 2.0 * (2.0 * n - 1.0) * self.pq / (n + 1.0);
        }
        self.n += 1;
        Some((self.n, self.current))
    }
}

/// `Ex[N (N-1) ... (N-m+1)] = 2^{m-1} (2m-3)!! λ^{m-1} / (1-λ)^{2m-1}`.
///
/// This closed form is exact for every `m >= 1`.
pub fn busy_size_factorial_moment(rate: StableRate, m: u32) -> Result<f64> {
    if m == 0 {
        return Err(Error::domain("moment order m must be >= 1"));
    }
    rate.require_subcritical("Ex[N^m]")?;
    let lambda = rate.lambda();
    let coefficient = (double_factorial_odd(m as u64)? << (m as usize - 1)).to_f64().unwrap_or(f64::INFINITY);
    Ok(coefficient * lambda.powi(m as i32 - 1) / (1.0 - lambda).powi(2 * m as i32 - 1))
}

/// `Ex[N^m] = Σ_{l=1}^{m} {m l} Ex[N (N-1) ... (N-l+1)]`.
pub fn busy_size_moment(rate: StableRate, m: u32) -> Result<f64> {
    if m == 0 {
        return Err(Error::domain("moment order m must be >= 1"));
    }
    rate.require_subcritical("Ex[N^m]")?;
    let row = stirling2_triangle(m as usize).swap_remove(m as usize);
    let mut total = 0.0;
    for (l, s) in row.iter().enumerate().skip(1) {
        let s = s.to_f64().unwrap_or(f64::INFINITY);
        total += s * busy_size_factorial_moment(rate, l as u32)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rate(l: f64) -> StableRate {
        StableRate::new(l).unwrap()
    }

    #[test]
    fn pmf_examples() {
        assert!((busy_size_pmf(rate(0.5), 1).unwrap() - 2.0 / 3.0).abs() < 1e-16);
        assert!((busy_size_pmf(rate(0.5), 2).unwrap() - 4.0 / 27.0).abs() < 1e-16);
        assert!((busy_size_pmf(rate(0.5), 3).unwrap() - 16.0 / 243.0).abs() < 1e-16);
        assert!(busy_size_pmf(rate(0.5), 0).is_err());
        assert!(busy_size_pmf(rate(1.0), 1).unwrap() == 0.5);
    }

    #[test]
    fn log_form_continues_exact_form() {
        // The two evaluation routes meet at EXACT_CATALAN_LIMIT.
        for &l in &[0.3, 0.9, 1.0] {
            let r = rate(l);
            let mut it = BusySizeDistribution::new(r);
            for _ in 1..=(EXACT_CATALAN_LIMIT + 40) {
                let (n, via_ratio) = it.next().unwrap();
                let direct = busy_size_pmf(r, n).unwrap();
                assert!((direct - via_ratio).abs() <= 1e-12 * via_ratio, "λ={l} n={n}");
            }
        }
    }

    #[test]
    fn factorial_moment_examples() {
        assert!((busy_size_factorial_moment(rate(0.5), 1).unwrap() - 2.0).abs() < 1e-15);
        assert!((busy_size_factorial_moment(rate(0.9), 1).unwrap() - 10.0).abs() < 1e-12);
        assert!((busy_size_factorial_moment(rate(0.5), 2).unwrap() - 8.0).abs() < 1e-14);
        assert!(busy_size_factorial_moment(rate(1.0), 1).is_err());
    }

    #[test]
    fn factorial_moment_matches_pmf_sum() {
        let r = rate(0.5);
        let mut fm2 = 0.0;
        for (n, p) in BusySizeDistribution::new(r).take(2000) {
            let n = n as f64;
            fm2 += n * (n - 1.0) * p;
        }
        assert!((fm2 - 8.0).abs() < 1e-12);
    }

    #[test]
    fn ordinary_moment_examples() {
        assert!((busy_size_moment(rate(0.5), 1).unwrap() - 2.0).abs() < 1e-15);
        assert!((busy_size_moment(rate(0.5), 2).unwrap() - 10.0).abs() < 1e-13);
        for &l in &[0.1, 0.5, 0.93] {
            assert_eq!(busy_size_moment(rate(l), 1).unwrap(), busy_size_factorial_moment(rate(l), 1).unwrap());
        }
    }
}
