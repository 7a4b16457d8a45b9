use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};

/// `σ_l(n) = Σ_{d | n} d^l` by trial division up to `√n`.
pub fn divisor_power_sum(l: u32, n: u64) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::domain("divisor sums are defined for n >= 1"));
    }
    let mut acc = BigUint::zero();
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            acc += BigUint::from(d).pow(l);
            let e = n / d;
            if e != d {
                acc += BigUint::from(e).pow(l);
            }
        }
        d += 1;
    }
    Ok(acc)
}

/// Exact `σ_l(1..=n_max)` by a divisor sieve, `O(n_max log n_max)` additions.
///
/// Entry `i` of the result is `σ_l(i + 1)`. Fails if a sum overflows `u128`.
pub fn divisor_power_sums(l: u32, n_max: usize) -> Result<Vec<u128>> {
    let overflow = || Error::domain(format!("σ_{l}(n) overflows u128 below n = {n_max}"));
    let mut sums = vec![0u128; n_max];
    for d in 1..=n_max {
        let p = (d as u128).checked_pow(l).ok_or_else(overflow)?;
        for multiple in (d..=n_max).step_by(d) {
            let slot = &mut sums[multiple - 1];
            *slot = slot.checked_add(p).ok_or_else(overflow)?;
        }
    }
    Ok(sums)
}

/// Floating point `σ_l(n)` table for Lambert series evaluation.
///
/// Immutable once built, so one sieve can be shared across threads and across
/// a grid of `λ` values.
#[derive(Debug, Clone)]
pub struct DivisorSieve {
    power: u32,
    sums: Vec<f64>,
}

impl DivisorSieve {
    pub fn new(power: u32, n_max: usize) -> Self {
        let mut sums = vec![0.0f64; n_max];
        for d in 1..=n_max {
            let p = (d as f64).powi(power as i32);
            for multiple in (d..=n_max).step_by(d) {
                sums[multiple - 1] += p;
            }
        }
        Self { power, sums }
    }

    pub fn power(&self) -> u32 {
        self.power
    }

    pub fn len(&self) -> usize {
        self.sums.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sums.is_empty()
    }

    /// `σ_l(n)` for `1 <= n <= len()`.
    pub fn get(&self, n: usize) -> Option<f64> {
        n.checked_sub(1).and_then(|i| self.sums.get(i)).copied()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.sums
    }
}

/// Convenience for tests and the CLI: `σ_l(n)` for one small `n` as `u128`.
pub fn divisor_power_sum_u128(l: u32, n: u64) -> Result<u128> {
    let v = divisor_power_sum(l, n)?;
    let digits = v.to_u64_digits();
    match digits.len() {
        0 => Ok(0),
        1 => Ok(digits[0] as u128),
        2 => Ok(digits[0] as u128 | (digits[1] as u128) << 64),
        _ => Err(Error::domain("σ_l(n) does not fit in u128")),
    }
}
