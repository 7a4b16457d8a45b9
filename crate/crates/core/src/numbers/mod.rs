//! Exact combinatorial numbers and convergent special-function series.
//!
//! Bernoulli numbers follow the `t/(e^t - 1)` generating convention, so
//! **`B_1 = -1/2`**. Everything here is computed in exact integer or rational
//! arithmetic and converted to `f64` only by the caller.

mod combinatorial;
mod divisors;
mod series;
mod sum;

pub use combinatorial::{
    bernoulli, bernoulli_numbers, bernoulli_second_kind, binomial, catalan, double_factorial_odd, eulerian_numbers,
    falling_factorial_coefficients, rational_to_f64, stirling2, stirling2_triangle, ExactRational,
};
pub use divisors::{divisor_power_sum, divisor_power_sum_u128, divisor_power_sums, DivisorSieve};
pub use series::{polylog, zeta, zeta_int, SeriesValue, MAX_SERIES_TERMS, VALUE_FLOOR};
pub use sum::CompensatedSum;

pub(crate) use series::check_tol;
