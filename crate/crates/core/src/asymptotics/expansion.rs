use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::laws::StableRate;
use crate::numbers::{bernoulli_numbers, bernoulli_second_kind, rational_to_f64, zeta, ExactRational};

/// Euler's constant `γ`, to 20 significant digits.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// How many coefficients past the retained order are kept to locate the
/// first nonzero omitted term.
const LOOKAHEAD: usize = 6;

/// Expansion variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variable {
    /// `h = -log λ`.
    H,
    OneMinusLambda,
    X,
}

/// A truncated asymptotic expansion
/// `Σ_j c_j v^{p_j} + Σ_{r<R} a_r v^{first_power + r}`.
#[derive(Debug, Clone)]
pub struct Expansion {
    pub variable: Variable,
    /// `(power, coefficient)` terms evaluated separately from the series.
    pub singular_part: Vec<(i32, f64)>,
    /// Power of `v` multiplying `coefficients[0]`.
    pub first_power: i32,
    pub coefficients: Vec<ExactRational>,
    /// Coefficients just past the retained ones, for the error proxy.
    pub omitted: Vec<ExactRational>,
    /// The series terminates: every coefficient past `coefficients` is zero.
    pub terminates: bool,
}

/// Value of an [`Expansion`] at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionValue {
    pub value: f64,
    pub singular: f64,
    /// The retained series terms, in order.
    pub terms: Vec<f64>,
    /// Magnitude of the first nonzero omitted term. `Some(0.0)` when the
    /// series terminates, `None` when no omitted coefficient is known.
    pub first_omitted: Option<f64>,
}

impl Expansion {
    pub fn order(&self) -> usize {
        self.coefficients.len()
    }

    pub fn evaluate(&self, at: f64) -> ExpansionValue {
        let singular: f64 = self.singular_part.iter().map(|&(p, c)| c * at.powi(p)).sum();
        let terms: Vec<f64> = self
            .coefficients
            .iter()
            .enumerate()
            .map(|(r, c)| rational_to_f64(c) * at.powi(self.first_power + r as i32))
            .collect();
        let first_omitted = if self.terminates {
            Some(0.0)
        } else {
            self.omitted.iter().enumerate().find(|(_, c)| !c.is_zero()).map(|(j, c)| {
                let power = self.first_power + (self.coefficients.len() + j) as i32;
                (rational_to_f64(c) * at.powi(power)).abs()
            })
        };
        ExpansionValue { value: singular + terms.iter().sum::<f64>(), singular, terms, first_omitted }
    }
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

fn rational(n: BigInt) -> ExactRational {
    ExactRational::from_integer(n)
}

/// Expansion of `g(x) = Σ_{n>=1} f(nx)` as `x → 0`, for `f` analytic at zero
/// with Taylor coefficients `b_r` and `F = ∫_0^∞ f`:
/// `g(x) ~ F/x + Σ_r b_r B_{r+1} (-1)^r x^r / (r+1)`.
///
/// Terms `r < order` are retained; any further `taylor` entries feed the
/// omitted-term proxy.
pub fn zagier_series(taylor: &[ExactRational], integral_f: f64, order: usize) -> Result<Expansion> {
    if order == 0 {
        return Err(Error::domain("expansion order must be >= 1"));
    }
    if taylor.len() < order {
        return Err(Error::domain(format!("order {order} needs {order} Taylor coefficients, got {}", taylor.len())));
    }
    let available = taylor.len().min(order + LOOKAHEAD);
    let b = bernoulli_numbers(available + 1);
    let coefficient = |r: usize| {
        let sign = if r.is_multiple_of(2) { 1 } else { -1 };
        &taylor[r] * &b[r + 1] * ExactRational::new(BigInt::from(sign), BigInt::from(r + 1))
    };
    Ok(Expansion {
        variable: Variable::X,
        singular_part: vec![(-1, integral_f)],
        first_power: 0,
        coefficients: (0..order).map(coefficient).collect(),
        omitted: (order..available).map(coefficient).collect(),
        terminates: false,
    })
}

pub fn zagier_expansion(taylor: &[ExactRational], integral_f: f64, x: f64, order: usize) -> Result<ExpansionValue> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::domain(format!("expansion point must be positive, got x = {x}")));
    }
    Ok(zagier_series(taylor, integral_f, order)?.evaluate(x))
}

/// `T_l(λ)` for `l >= 1` in powers of `h = -log λ`:
/// `l! ζ(l+1) / h^{l+1} + Σ_r (-1)^{r+l-1} B_r B_{r+l} h^{r-1} / (r! (r+l))`.
///
/// For odd `l` only `r <= 1` contribute, and the whole finite sum is kept
/// whatever `order` asks for.
pub fn t_l_series(l: u32, order: usize) -> Result<Expansion> {
    if l == 0 {
        return Err(Error::domain("use the T_0 expansion for l = 0"));
    }
    if order == 0 {
        return Err(Error::domain("expansion order must be >= 1"));
    }
    let l_us = l as usize;
    let odd = l % 2 == 1;
    let kept = if odd { 2 } else { order };
    let total = if odd { kept } else { kept + LOOKAHEAD };
    let b = bernoulli_numbers(total + l_us);
    let coefficient = |r: usize| {
        let sign = if (r + l_us - 1).is_multiple_of(2) { 1 } else { -1 };
        &b[r] * &b[r + l_us] * ExactRational::new(BigInt::from(sign), factorial(r) * (r + l_us))
    };
    let leading = rational_to_f64(&rational(factorial(l_us))) * zeta(l + 1)?;
    Ok(Expansion {
        variable: Variable::H,
        singular_part: vec![(-(l as i32 + 1), leading)],
        first_power: -1,
        coefficients: (0..kept).map(coefficient).collect(),
        omitted: (kept..total).map(coefficient).collect(),
        terminates: odd,
    })
}

pub fn t_l_expansion(l: u32, rate: StableRate, order: usize) -> Result<ExpansionValue> {
    rate.require_subcritical("the expansion of T_l(λ)")?;
    Ok(t_l_series(l, order)?.evaluate(rate.h()))
}

/// Coefficients `(-1)^r B_{r+1} (B_{r+1} - (-1)^{r+1}) / ((r+1) (r+1)!)` of the
/// `T_0` series, `r = 0..count`.
pub fn t_0_coefficients(count: usize) -> Vec<ExactRational> {
    let b = bernoulli_numbers(count + 1);
    (0..count)
        .map(|r| {
            let alt = if (r + 1) % 2 == 0 { ExactRational::one() } else { -ExactRational::one() };
            let sign = if r % 2 == 0 { 1 } else { -1 };
            &b[r + 1] * (&b[r + 1] - alt) * ExactRational::new(BigInt::from(sign), factorial(r + 1) * (r + 1))
        })
        .collect()
}

/// `T_0(λ) ~ (log(1/(1-λ)) + γ)/h + Σ_{r<order} a_r h^r`.
///
/// The singular coefficient depends on `λ`, so the expansion is built for one
/// rate.
pub fn t_0_series(rate: StableRate, order: usize) -> Result<Expansion> {
    rate.require_subcritical("the expansion of T_0(λ)")?;
    if order == 0 {
        return Err(Error::domain("expansion order must be >= 1"));
    }
    let log_inv = -(-rate.lambda()).ln_1p();
    let mut all = t_0_coefficients(order + LOOKAHEAD);
    let omitted = all.split_off(order);
    Ok(Expansion {
        variable: Variable::H,
        singular_part: vec![(-1, log_inv + EULER_GAMMA)],
        first_power: 0,
        coefficients: all,
        omitted,
        terminates: false,
    })
}

pub fn t_0_expansion(rate: StableRate, order: usize) -> Result<ExpansionValue> {
    Ok(t_0_series(rate, order)?.evaluate(rate.h()))
}

/// `1/h = (1/(1-λ)) Σ_r (-1)^r C_r (1-λ)^r / r!`, `C_r` the Bernoulli numbers
/// of the second kind.
pub fn inv_h_series(order: usize) -> Result<Expansion> {
    if order == 0 {
        return Err(Error::domain("expansion order must be >= 1"));
    }
    let coefficient = |r: usize| {
        let sign = if r.is_multiple_of(2) { 1 } else { -1 };
        bernoulli_second_kind(r) * ExactRational::new(BigInt::from(sign), factorial(r))
    };
    Ok(Expansion {
        variable: Variable::OneMinusLambda,
        singular_part: Vec::new(),
        first_power: -1,
        coefficients: (0..order).map(coefficient).collect(),
        omitted: (order..order + LOOKAHEAD).map(coefficient).collect(),
        terminates: false,
    })
}

pub fn inv_h_expansion(rate: StableRate, order: usize) -> Result<ExpansionValue> {
    rate.require_subcritical("the expansion of 1/h")?;
    Ok(inv_h_series(order)?.evaluate(1.0 - rate.lambda()))
}

/// Truncate an asymptotic series at its first local minimum in magnitude.
///
/// Returns the index of the last term kept and the partial sum through it.
/// Exact zeros are skipped when comparing neighbours. A sequence whose
/// magnitudes never turn upward is summed in full.
pub fn optimal_truncation(terms: &[f64]) -> (usize, f64) {
    let nonzero: Vec<usize> = (0..terms.len()).filter(|&i| terms[i] != 0.0).collect();
    let stop = nonzero
        .windows(2)
        .find(|w| terms[w[1]].abs() > terms[w[0]].abs())
        .map(|w| w[0])
        .unwrap_or(terms.len().saturating_sub(1));
    (stop, terms[..=stop.min(terms.len().saturating_sub(1))].iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laws::{lambert_t, LambertMethod};
    use crate::numbers::bernoulli;

    fn rate(l: f64) -> StableRate {
        StableRate::new(l).unwrap()
    }

    fn exact_t(l: u32, lam: f64) -> f64 {
        lambert_t(l, rate(lam), 1e-15, LambertMethod::Direct).unwrap().value
    }

    #[test]
    fn zagier_trivial_cases() {
        let zeros = vec![ExactRational::zero(); 3];
        let v = zagier_expansion(&zeros, 1.0, 1e-3, 3).unwrap();
        assert_eq!(v.value, 1e3);
        let one = vec![ExactRational::one()];
        let v = zagier_expansion(&one, 0.0, 0.5, 1).unwrap();
        assert_eq!(v.value, -0.5);
        assert!(zagier_expansion(&one, 0.0, 0.5, 2).is_err());
        assert!(zagier_expansion(&one, 0.0, -0.5, 1).is_err());
    }

    #[test]
    fn zagier_against_direct_sum() {
        // f(x) = x/(e^x - 1): b_r = B_r / r!, F = ζ(2). Only r <= 1 survive,
        // so the expansion is exact up to an exponentially small remainder.
        let taylor: Vec<ExactRational> = (0..12).map(|r| bernoulli(r) / rational(factorial(r))).collect();
        let x = 0.1;
        let direct: f64 = (1..2000)
            .map(|n| {
                let y = n as f64 * x;
                y / y.exp_m1()
            })
            .sum();
        let v = zagier_expansion(&taylor, std::f64::consts::PI.powi(2) / 6.0, x, 6).unwrap();
        assert_eq!(v.first_omitted, None);
        assert!((v.value - direct).abs() <= 1e-12, "{} vs {direct}", v.value);
    }

    #[test]
    fn zagier_nonterminating_series() {
        // f(x) = e^{-x}: g(x) = 1/(e^x - 1), b_r = (-1)^r / r!, F = 1.
        let taylor: Vec<ExactRational> =
            (0..16).map(|r| ExactRational::new(BigInt::from(if r % 2 == 0 { 1 } else { -1 }), factorial(r))).collect();
        let x: f64 = 0.5;
        let exact = 1.0 / x.exp_m1();
        for order in [2, 4, 6] {
            let v = zagier_expansion(&taylor, 1.0, x, order).unwrap();
            assert!((v.value - exact).abs() <= v.first_omitted.unwrap(), "order {order}");
        }
    }

    #[test]
    fn t_1_closed_form() {
        let coeffs = t_l_series(1, 5).unwrap();
        assert_eq!(coeffs.coefficients.len(), 2);
        assert_eq!(coeffs.coefficients[0], ExactRational::new((-1).into(), 2.into()));
        assert_eq!(coeffs.coefficients[1], ExactRational::new(1.into(), 24.into()));
        let t3 = t_l_series(3, 1).unwrap();
        assert!(t3.coefficients[0].is_zero());
        assert_eq!(t3.coefficients[1], ExactRational::new((-1).into(), 240.into()));
    }

    #[test]
    fn t_1_error_beyond_all_orders() {
        let err = |lam: f64| (t_l_expansion(1, rate(lam), 3).unwrap().value - exact_t(1, lam)).abs();
        assert!(err(0.9) < 1e-6);
        assert!(err(0.99) < 1e-9);
        // Near λ = 1 the remainder is far below rounding; it is only visible
        // for large h, where it falls faster than any power of h.
        let (e1, e2, e3) = (err(0.05), err(0.1), err(0.2));
        assert!(e1 > e2 && e2 > e3);
        let (h1, h2, h3) = (-(0.05f64).ln(), -(0.1f64).ln(), -(0.2f64).ln());
        assert!((e2 / e3).ln() / (h2 / h3).ln() > (e1 / e2).ln() / (h1 / h2).ln());
        assert!(t_l_expansion(1, rate(1.0), 3).is_err());
    }

    #[test]
    fn t_2_error_within_first_omitted() {
        let v = t_l_expansion(2, rate(0.9), 4).unwrap();
        let err = (v.value - exact_t(2, 0.9)).abs();
        assert!(err < v.first_omitted.unwrap(), "{err} vs {:?}", v.first_omitted);
        // even l: only even r survive
        let s = t_l_series(2, 6).unwrap();
        for (r, c) in s.coefficients.iter().enumerate() {
            assert_eq!(r % 2 == 1, c.is_zero(), "r={r}");
        }
    }

    #[test]
    fn t_0_coefficients_values() {
        let c = t_0_coefficients(4);
        assert_eq!(c[0], ExactRational::new((-1).into(), 4.into()));
        assert_eq!(c[1], ExactRational::new(5.into(), 144.into()));
        assert!(c[2].is_zero());
        assert!(!c[3].is_zero());
    }

    #[test]
    fn t_0_order_sweep() {
        let exact = exact_t(0, 0.99);
        let errs: Vec<f64> = (1..=4).map(|r| (t_0_expansion(rate(0.99), r).unwrap().value - exact).abs()).collect();
        assert!(errs[1] < errs[0]);
        assert!(errs[2] <= errs[1] * (1.0 + 1e-9));
        assert!(errs[3] < errs[0]);
        let e2 = |lam: f64| (t_0_expansion(rate(lam), 2).unwrap().value - exact_t(0, lam)).abs();
        assert!(e2(0.999) < e2(0.99));
    }

    #[test]
    fn t_0_optimal_truncation_within_proxy() {
        for &lam in &[0.9, 0.5] {
            let full = t_0_expansion(rate(lam), 30).unwrap();
            let (stop, partial) = optimal_truncation(&full.terms);
            let value = full.singular + partial;
            let next =
                full.terms[stop + 1..].iter().find(|t| **t != 0.0).map(|t| t.abs()).or(full.first_omitted).unwrap();
            let exact = exact_t(0, lam);
            assert!((value - exact).abs() <= next + 1e-14 * exact, "λ={lam}");
        }
    }

    #[test]
    fn inverse_h() {
        let v = inv_h_expansion(rate(0.9), 6).unwrap();
        let exact = -1.0 / 0.9f64.ln();
        assert!((exact - 9.49122).abs() < 1e-5);
        // Every omitted term has the same sign and they shrink by at least a
        // factor 1-λ, so the remainder is at most first_omitted / λ.
        assert!((v.value - exact).abs() <= v.first_omitted.unwrap() / 0.9);
        assert_eq!(inv_h_expansion(rate(0.5), 1).unwrap().value, 2.0);
        let err = |lam: f64, r: usize| (inv_h_expansion(rate(lam), r).unwrap().value + 1.0 / lam.ln()).abs();
        for r in 1..6 {
            assert!(err(0.9, r + 1) < err(0.9, r));
            assert!(err(0.99, r) < err(0.9, r));
        }
        let ratio = |lam: f64| inv_h_expansion(rate(lam), 1).unwrap().value * -lam.ln();
        assert!((ratio(0.999) - 1.0).abs() < (ratio(0.99) - 1.0).abs());
    }

    #[test]
    fn optimal_truncation_examples() {
        let (i, s) = optimal_truncation(&[1.0, 0.1, 0.01, 0.5, 3.0]);
        assert_eq!(i, 2);
        assert!((s - 1.11).abs() < 1e-15);
        let (i, s) = optimal_truncation(&[4.0, 2.0, 1.0]);
        assert_eq!((i, s), (2, 7.0));
        let (i, _) = optimal_truncation(&[1.0, 0.5, 0.0, 0.2, 0.4]);
        assert_eq!(i, 3);
    }

    #[test]
    fn euler_gamma_from_harmonic_numbers() {
        // H_n - log n - 1/(2n) + 1/(12 n^2) - γ = O(n^{-4})
        let n = 1000.0;
        let h: f64 = (1..=1000).rev().map(|k| 1.0 / k as f64).sum();
        let g = h - f64::ln(n) - 1.0 / (2.0 * n) + 1.0 / (12.0 * n * n);
        assert!((g - EULER_GAMMA).abs() < 1e-13);
    }
}
