//! Asymptotic expansions as `λ → 1` (and `λ → ∞` for the ranked servers).
//!
//! Every truncated series reports the magnitude of its first nonzero omitted
//! term as an error proxy; no rigorous remainder bounds are claimed.

mod expansion;
mod moments;

pub use expansion::{
    inv_h_expansion, inv_h_series, optimal_truncation, t_0_coefficients, t_0_expansion, t_0_series, t_l_expansion,
    t_l_series, zagier_expansion, zagier_series, Expansion, ExpansionValue, Variable, EULER_GAMMA,
};
pub use moments::{
    integral_comparison, integral_comparison_bound, k_moment_expansion, k_moment_from_expansions, k_moment_leading,
    k_variance_expansion, l_moment_asym, n_moment_leading,
};
