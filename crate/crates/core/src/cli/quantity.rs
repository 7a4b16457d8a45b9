//! The quantities `simulate` and `compare` report, written `K^2` (a moment)
//! or `K>3` (a tail point).

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::asymptotics::{k_moment_expansion, l_moment_asym, n_moment_leading};
use crate::error::{Error, Result};
use crate::laws::{
    busy_size_moment, busy_size_pmf, max_occupancy_moment, max_occupancy_tail, server_search_body_approx,
    server_search_moment, server_search_tail, station_search_moment, station_search_tail, MomentMethod, ServerLoad,
    StableRate,
};
use crate::numbers::CompensatedSum;
use crate::simulation::{estimate_mean, SampleKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Variable {
    N,
    K,
    L,
    I,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Quantity {
    Moment(Variable, u32),
    Tail(Variable, u64),
}

impl Quantity {
    pub fn variable(self) -> Variable {
        match self {
            Quantity::Moment(v, _) | Quantity::Tail(v, _) => v,
        }
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variable::N => "N",
            Variable::K => "K",
            Variable::L => "L",
            Variable::I => "I",
        })
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::Moment(v, m) => write!(f, "{v}^{m}"),
            Quantity::Tail(v, k) => write!(f, "{v}>{k}"),
        }
    }
}

impl FromStr for Quantity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let mut chars = s.chars();
        let var = match chars.next().map(|c| c.to_ascii_uppercase()) {
            Some('N') => Variable::N,
            Some('K') => Variable::K,
            Some('L') => Variable::L,
            Some('I') => Variable::I,
            _ => return Err(format!("{s:?}: quantity must start with N, K, L or I")),
        };
        let rest = chars.as_str();
        let bad = || format!("{s:?}: write a moment as K^2 or a tail point as K>3");
        if let Some(m) = rest.strip_prefix('^') {
            let m: u32 = m.parse().map_err(|_| bad())?;
            if m == 0 {
                return Err(format!("{s:?}: moment order must be >= 1"));
            }
            Ok(Quantity::Moment(var, m))
        } else if let Some(k) = rest.strip_prefix('>') {
            Ok(Quantity::Tail(var, k.parse().map_err(|_| bad())?))
        } else {
            Err(bad())
        }
    }
}

impl Serialize for Quantity {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn stable(lambda: f64) -> Result<StableRate> {
    StableRate::new(lambda)
}

/// `Pr[N > n] = 1 - Σ_{j<=n} Pr[N = j]`.
fn busy_size_tail(rate: StableRate, n: u64) -> Result<f64> {
    let mut acc = CompensatedSum::new();
    for j in 1..=n {
        acc.add(busy_size_pmf(rate, j)?);
    }
    Ok((1.0 - acc.value()).max(0.0))
}

/// Exact value from the closed forms.
pub fn exact_value(q: Quantity, lambda: f64, tol: f64) -> Result<f64> {
    match q {
        Quantity::Moment(Variable::N, m) => busy_size_moment(stable(lambda)?, m),
        Quantity::Moment(Variable::K, m) => max_occupancy_moment(stable(lambda)?, m, tol, MomentMethod::Lambert),
        Quantity::Moment(Variable::I, m) => station_search_moment(stable(lambda)?, m, tol),
        Quantity::Moment(Variable::L, m) => server_search_moment(ServerLoad::new(lambda)?, m, tol),
        Quantity::Tail(Variable::N, n) => busy_size_tail(stable(lambda)?, n),
        Quantity::Tail(Variable::K, k) => max_occupancy_tail(stable(lambda)?, k),
        Quantity::Tail(Variable::I, i) => station_search_tail(stable(lambda)?, i),
        Quantity::Tail(Variable::L, l) => server_search_tail(ServerLoad::new(lambda)?, l),
    }
}

/// Asymptotic approximation, or `None` where none applies (including a rate
/// outside the regime the approximation is stated for).
pub fn asymptotic_value(q: Quantity, lambda: f64) -> Result<Option<f64>> {
    let value = match q {
        Quantity::Moment(Variable::N, m) => stable(lambda).and_then(|r| n_moment_leading(r, m)),
        Quantity::Moment(Variable::K, m) => stable(lambda).and_then(|r| k_moment_expansion(r, m)),
        Quantity::Moment(Variable::I, m) => stable(lambda).and_then(|r| Ok(lambda * k_moment_expansion(r, m)?)),
        Quantity::Moment(Variable::L, m) => ServerLoad::new(lambda).and_then(|s| l_moment_asym(s, m)),
        Quantity::Tail(Variable::L, l) => ServerLoad::new(lambda).and_then(|s| server_search_body_approx(s, l)),
        Quantity::Tail(_, _) => return Ok(None),
    };
    match value {
        Ok(v) => Ok(Some(v)),
        Err(Error::Domain(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Sample estimate of `q` with its standard error.
pub fn sample_estimate(q: Quantity, samples: &[f64], kind: SampleKind, batches: usize) -> Result<(f64, f64)> {
    let e = match q {
        Quantity::Moment(_, m) => estimate_mean(samples, |x| x.powi(m as i32), kind, batches)?,
        Quantity::Tail(_, k) => estimate_mean(samples, |x| if x > k as f64 { 1.0 } else { 0.0 }, kind, batches)?,
    };
    Ok((e.mean, e.std_error))
}
