use std::f64::consts::PI;

use num_traits::ToPrimitive;

use super::expansion::{t_0_expansion, t_l_expansion, EULER_GAMMA};
use crate::error::{Error, Result};
use crate::laws::{busy_size_factorial_moment, ServerLoad, StableRate};
use crate::numbers::{binomial, check_tol, polylog, zeta, CompensatedSum};

fn log_inv_one_minus(rate: StableRate) -> f64 {
    -(-rate.lambda()).ln_1p()
}

fn factorial_f64(m: u32) -> f64 {
    (1..=m).map(f64::from).product()
}

/// Leading term of `Ex[K^m]`: `log(1/(1-λ))` for `m = 1`, and
/// `m! ζ(m) / (1-λ)^{m-1}` for `m >= 2`.
pub fn k_moment_leading(rate: StableRate, m: u32) -> Result<f64> {
    rate.require_subcritical("Ex[K^m]")?;
    match m {
        0 => Err(Error::domain("moment order m must be >= 1")),
        1 => Ok(log_inv_one_minus(rate)),
        _ => Ok(factorial_f64(m) * zeta(m)? / (1.0 - rate.lambda()).powi(m as i32 - 1)),
    }
}

/// `Ex[K^m]` keeping the terms that do not vanish as `λ → 1`, with
/// `L = log(1/(1-λ))`:
///
/// * `m = 1`: `L + γ`
/// * `m = 2`: `π²/(3(1-λ)) - L - γ - 1`
/// * `m >= 3`: the leading term `m! ζ(m) / (1-λ)^{m-1}`
pub fn k_moment_expansion(rate: StableRate, m: u32) -> Result<f64> {
    rate.require_subcritical("Ex[K^m]")?;
    let big_l = log_inv_one_minus(rate);
    match m {
        0 => Err(Error::domain("moment order m must be >= 1")),
        1 => Ok(big_l + EULER_GAMMA),
        2 => Ok(PI * PI / (3.0 * (1.0 - rate.lambda())) - big_l - EULER_GAMMA - 1.0),
        _ => k_moment_leading(rate, m),
    }
}

/// `Var[K] ≈ π²/(3(1-λ)) - L² - (1+2γ) L - γ - 1 - γ²`, `L = log(1/(1-λ))`.
pub fn k_variance_expansion(rate: StableRate) -> Result<f64> {
    rate.require_subcritical("Var[K]")?;
    let big_l = log_inv_one_minus(rate);
    let g = EULER_GAMMA;
    Ok(PI * PI / (3.0 * (1.0 - rate.lambda())) - big_l * big_l - (1.0 + 2.0 * g) * big_l - g - 1.0 - g * g)
}

/// `Ex[K^m]` from the moment identity
/// `((1-λ)/λ) Σ_{l<m} C(m,l) (-1)^{m-1-l} T_l(λ)` with every `T_l` replaced by
/// its expansion in `h` truncated at `order`.
pub fn k_moment_from_expansions(rate: StableRate, m: u32, order: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::domain("moment order m must be >= 1"));
    }
    rate.require_subcritical("Ex[K^m]")?;
    let mut acc = CompensatedSum::new();
    for l in 0..m {
        let c = binomial(m as u64, l as u64).to_f64().unwrap_or(f64::INFINITY);
        let sign = if (m - 1 - l).is_multiple_of(2) { 1.0 } else { -1.0 };
        let t = if l == 0 { t_0_expansion(rate, order)? } else { t_l_expansion(l, rate, order)? };
        acc.add(sign * c * t.value);
    }
    let lambda = rate.lambda();
    Ok((1.0 - lambda) / lambda * acc.value())
}

/// Leading term `2^{m-1} (2m-3)!! λ^{m-1} / (1-λ)^{2m-1}` of `Ex[N^m]`. It
/// coincides with the `m`-th factorial moment, which is exact.
pub fn n_moment_leading(rate: StableRate, m: u32) -> Result<f64> {
    busy_size_factorial_moment(rate, m)
}

/// `Ex[L^m] ≈ λ^m/(m+1) + m λ^{m-1} log λ / 2` for large `λ`.
pub fn l_moment_asym(load: ServerLoad, m: u32) -> Result<f64> {
    if m == 0 {
        return Err(Error::domain("moment order m must be >= 1"));
    }
    let lambda = load.lambda();
    if lambda <= 1.0 {
        return Err(Error::domain(format!("the large-λ form of Ex[L^m] needs λ > 1, got {lambda}")));
    }
    let mf = m as f64;
    Ok(lambda.powi(m as i32) / (mf + 1.0) + mf * lambda.powi(m as i32 - 1) * lambda.ln() / 2.0)
}

/// `I_l(λ) = ∫_1^∞ x^l λ^x / (1 - λ^x) dx
///        = Σ_{i<=l} C(l,i) i! Li_{i+1}(λ) / h^{i+1}`.
pub fn integral_comparison(l: u32, rate: StableRate, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    rate.require_subcritical("I_l(λ)")?;
    let h = rate.h();
    let mut acc = CompensatedSum::new();
    for i in 0..=l {
        let c = binomial(l as u64, i as u64).to_f64().unwrap_or(f64::INFINITY);
        let li = polylog(i + 1, rate.lambda(), tol)?.value;
        acc.add(c * factorial_f64(i) * li / h.powi(i as i32 + 1));
    }
    Ok(acc.value())
}

/// Bound on `|T_l(λ) - I_l(λ)|` from the total variation of the summand:
/// `λ/(1-λ)` for `l = 0`, `2 l! / h^l` for `l >= 1`.
pub fn integral_comparison_bound(l: u32, rate: StableRate) -> Result<f64> {
    rate.require_subcritical("I_l(λ)")?;
    let lambda = rate.lambda();
    Ok(if l == 0 { lambda / (1.0 - lambda) } else { 2.0 * factorial_f64(l) / rate.h().powi(l as i32) })
}
