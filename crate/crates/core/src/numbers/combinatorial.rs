//! Exact integer and rational combinatorial numbers.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Exact rational number in lowest terms with a positive denominator.
pub type ExactRational = BigRational;

/// Binomial coefficient `C(n, k)`, zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut c = BigUint::one();
    for i in 0..k {
        // C(n, i+1) = C(n, i) (n - i) / (i + 1), exact at every step.
        c = c * (n - i) / (i + 1);
    }
    c
}

/// The `n`-th Catalan number with 1-based indexing: `A_1 = 1, A_2 = 1, A_3 = 2, ...`.
///
/// `A_n = C(2n-2, n-1) / n` counts the orders of `n - 1` arrivals and `n`
/// departures that first empty the system at the final departure.
pub fn catalan(n: u64) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::domain("Catalan numbers are indexed from n = 1"));
    }
    Ok(binomial(2 * n - 2, n - 1) / n)
}

/// Rows `0..=m_max` of the Stirling triangle of the second kind.
pub fn stirling2_triangle(m_max: usize) -> Vec<Vec<BigUint>> {
    let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(m_max + 1);
    rows.push(vec![BigUint::one()]);
    for m in 1..=m_max {
        let prev = &rows[m - 1];
        let mut row = vec![BigUint::zero(); m + 1];
        for l in 1..=m {
            let mut v = if l < m { &prev[l] * l } else { BigUint::zero() };
            v += &prev[l - 1];
            row[l] = v;
        }
        rows.push(row);
    }
    rows
}

/// Stirling number of the second kind `{m l}`.
pub fn stirling2(m: usize, l: usize) -> Result<BigUint> {
    if l > m {
        return Err(Error::domain(format!("Stirling number {{{m} {l}}} requires l <= m")));
    }
    Ok(stirling2_triangle(m).swap_remove(m).swap_remove(l))
}

/// Bernoulli numbers `B_0..=B_{r_max}` in the `t/(e^t - 1)` convention, so `B_1 = -1/2`.
pub fn bernoulli_numbers(r_max: usize) -> Vec<ExactRational> {
    let mut b: Vec<ExactRational> = Vec::with_capacity(r_max + 1);
    b.push(ExactRational::one());
    for r in 1..=r_max {
        // sum_{j <= r} C(r+1, j) B_j = 0
        let mut acc = ExactRational::zero();
        for (j, bj) in b.iter().enumerate() {
            if bj.is_zero() {
                continue;
            }
            let c = BigInt::from(binomial(r as u64 + 1, j as u64));
            acc += bj * ExactRational::from_integer(c);
        }
        let br = -acc / ExactRational::from_integer(BigInt::from(r + 1));
        b.push(br);
    }
    b
}

/// The Bernoulli number `B_r`, with `B_1 = -1/2`.
pub fn bernoulli(r: usize) -> ExactRational {
    bernoulli_numbers(r).swap_remove(r)
}

/// Coefficients of the falling factorial `x (x-1) ... (x-r+1)` in powers of `x`
/// (signed Stirling numbers of the first kind), lowest power first.
pub fn falling_factorial_coefficients(r: usize) -> Vec<BigInt> {
    let mut poly = vec![BigInt::one()];
    for j in 0..r {
        // multiply by (x - j)
        let mut next = vec![BigInt::zero(); poly.len() + 1];
        for (k, c) in poly.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= c * BigInt::from(j);
        }
        poly = next;
    }
    poly
}

/// Bernoulli number of the second kind, `C_r = ∫_0^1 x (x-1) ... (x-r+1) dx`.
///
/// These are the coefficients of `t / log(1 + t) = Σ C_r t^r / r!`.
pub fn bernoulli_second_kind(r: usize) -> ExactRational {
    falling_factorial_coefficients(r)
        .into_iter()
        .enumerate()
        .map(|(k, c)| ExactRational::new(c, BigInt::from(k + 1)))
        .fold(ExactRational::zero(), |acc, t| acc + t)
}

/// `(2m - 3)!!` with the convention `(-1)!! = 1`.
pub fn double_factorial_odd(m: u64) -> Result<BigUint> {
    if m == 0 {
        return Err(Error::domain("(2m-3)!! is defined for m >= 1"));
    }
    let mut acc = BigUint::one();
    let mut k = 2 * m as i64 - 3;
    while k > 1 {
        acc *= k as u64;
        k -= 2;
    }
    Ok(acc)
}

/// Eulerian numbers `A(l, k)` for `k = 0..l`, so that
/// `Σ_{i>=1} i^l z^i = z Σ_k A(l, k) z^k / (1 - z)^{l+1}` for `l >= 1`.
pub fn eulerian_numbers(l: usize) -> Vec<BigUint> {
    if l == 0 {
        return vec![BigUint::one()];
    }
    let mut row = vec![BigUint::one()];
    for n in 2..=l {
        let mut next = vec![BigUint::zero(); n];
        for k in 0..n {
            if k < row.len() {
                next[k] += &row[k] * (k + 1);
            }
            if k >= 1 {
                next[k] += &row[k - 1] * (n - k);
            }
        }
        row = next;
    }
    row
}

/// Lossy conversion of an exact rational to `f64`, correct to a few ulp.
pub fn rational_to_f64(q: &ExactRational) -> f64 {
    use num_traits::ToPrimitive;
    if let Some(v) = q.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Fall back to scaling when numerator or denominator overflow f64.
    let n_bits = q.numer().bits() as i64;
    let d_bits = q.denom().bits() as i64;
    let shift_n = (n_bits - 1000).max(0) as u64;
    let shift_d = (d_bits - 1000).max(0) as u64;
    let n = (q.numer() >> shift_n).to_f64().unwrap_or(f64::NAN);
    let d = (q.denom() >> shift_d).to_f64().unwrap_or(f64::NAN);
    n / d * 2f64.powi((shift_n as i64 - shift_d as i64) as i32)
}
