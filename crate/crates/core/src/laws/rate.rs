use serde::Serialize;

use crate::error::{Error, Result};

/// M/M/1 arrival rate with the service rate normalized to one.
///
/// Construction admits `0 < λ <= 1`; the distribution laws that have a limit
/// at `λ = 1` accept it, every moment operation rejects it.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct StableRate(f64);

impl StableRate {
    pub fn new(lambda: f64) -> Result<Self> {
        if lambda > 0.0 && lambda <= 1.0 {
            Ok(Self(lambda))
        } else {
            Err(Error::domain(format!("M/M/1 arrival rate must satisfy 0 < λ <= 1, got {lambda}")))
        }
    }

    /// Like [`StableRate::new`] but also rejects `λ = 1`.
    pub fn subcritical(lambda: f64) -> Result<Self> {
        let rate = Self::new(lambda)?;
        rate.require_subcritical("this quantity")?;
        Ok(rate)
    }

    pub fn lambda(self) -> f64 {
        self.0
    }

    /// Probability `p = λ/(1+λ)` that the next event of a busy system is an arrival.
    pub fn arrival_prob(self) -> f64 {
        self.0 / (1.0 + self.0)
    }

    /// Probability `q = 1/(1+λ)` that the next event of a busy system is a departure.
    pub fn departure_prob(self) -> f64 {
        1.0 / (1.0 + self.0)
    }

    /// `h = -log λ`, the natural variable of the Lambert-series expansions.
    pub fn h(self) -> f64 {
        -self.0.ln()
    }

    pub fn is_critical(self) -> bool {
        self.0 == 1.0
    }

    pub(crate) fn require_subcritical(self, what: &str) -> Result<()> {
        if self.0 < 1.0 {
            Ok(())
        } else {
            Err(Error::domain(format!("{what} diverges at λ = 1; moments need 0 < λ < 1")))
        }
    }
}

/// M/M/∞ arrival rate (service rate one). Any `λ > 0` is stable.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct ServerLoad(f64);

impl ServerLoad {
    pub fn new(lambda: f64) -> Result<Self> {
        if lambda > 0.0 && lambda.is_finite() {
            Ok(Self(lambda))
        } else {
            Err(Error::domain(format!("M/M/∞ arrival rate must be positive and finite, got {lambda}")))
        }
    }

    pub fn lambda(self) -> f64 {
        self.0
    }

    /// `s = √λ`.
    pub fn spread(self) -> f64 {
        self.0.sqrt()
    }

    /// `l₀ = λ - √λ`, the last index of the body of the `L` distribution.
    pub fn body_edge(self) -> f64 {
        self.0 - self.0.sqrt()
    }
}
