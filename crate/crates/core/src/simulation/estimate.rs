use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numbers::CompensatedSum;

pub const DEFAULT_BATCHES: usize = 32;

/// Smallest batch the batch-means estimator accepts.
pub const MIN_BATCH_SIZE: usize = 100;

/// How the samples were produced, which decides the standard error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleKind {
    /// One value per busy period; plain i.i.d. standard error.
    Independent,
    /// Arrival-epoch values from one stationary run; batch means.
    Equilibrium,
}

/// Empirical mean of some function of the samples, with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub sample_count: u64,
    /// Zero for independent samples.
    pub batch_count: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentEstimate {
    pub order: u32,
    pub mean: f64,
    pub std_error: f64,
    pub sample_count: u64,
    pub batch_count: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailEstimate {
    pub k: u64,
    pub probability: f64,
    pub std_error: f64,
    pub sample_count: u64,
    pub batch_count: u64,
}

fn mean_and_se(values: impl Iterator<Item = f64> + Clone) -> (f64, f64, u64) {
    let n = values.clone().count() as u64;
    let mean = values.clone().collect::<CompensatedSum>().value() / n as f64;
    if n < 2 {
        return (mean, 0.0, n);
    }
    let ss: CompensatedSum = values.map(|x| (x - mean) * (x - mean)).collect();
    let var = ss.value() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt(), n)
}

/// Mean of `f(x)` over `samples`.
///
/// Equilibrium samples are split into `batches` contiguous batches of equal
/// size (a remainder at the end is dropped for the error, kept for the mean)
/// and the standard error is that of the batch means.
pub fn estimate_mean(
    samples: &[f64],
    f: impl Fn(f64) -> f64,
    kind: SampleKind,
    batches: usize,
) -> Result<MeanEstimate> {
    if samples.is_empty() {
        return Err(Error::domain("no samples to estimate from"));
    }
    match kind {
        SampleKind::Independent => {
            let (mean, std_error, n) = mean_and_se(samples.iter().map(|&x| f(x)));
            Ok(MeanEstimate { mean, std_error, sample_count: n, batch_count: 0 })
        }
        SampleKind::Equilibrium => {
            if batches < 2 {
                return Err(Error::domain(format!("batch means need at least 2 batches, got {batches}")));
            }
            let size = samples.len() / batches;
            if size < MIN_BATCH_SIZE {
                return Err(Error::domain(format!(
                    "{} samples give {size} per batch over {batches} batches; at least {MIN_BATCH_SIZE} are needed",
                    samples.len()
                )));
            }
            let mean = samples.iter().map(|&x| f(x)).collect::<CompensatedSum>().value() / samples.len() as f64;
            let batch_means: Vec<f64> = samples
                .chunks_exact(size)
                .take(batches)
                .map(|c| c.iter().map(|&x| f(x)).collect::<CompensatedSum>().value() / size as f64)
                .collect();
            let (_, std_error, _) = mean_and_se(batch_means.iter().copied());
            Ok(MeanEstimate { mean, std_error, sample_count: samples.len() as u64, batch_count: batches as u64 })
        }
    }
}

/// `Ex[X^m]` for each requested order.
pub fn estimate_moments(
    samples: &[f64],
    orders: &[u32],
    kind: SampleKind,
    batches: usize,
) -> Result<Vec<MomentEstimate>> {
    orders
        .iter()
        .map(|&m| {
            if m == 0 {
                return Err(Error::domain("moment order m must be >= 1"));
            }
            let e = estimate_mean(samples, |x| x.powi(m as i32), kind, batches)?;
            Ok(MomentEstimate {
                order: m,
                mean: e.mean,
                std_error: e.std_error,
                sample_count: e.sample_count,
                batch_count: e.batch_count,
            })
        })
        .collect()
}

/// `Pr[X > k]` for each requested point.
pub fn estimate_tails(samples: &[f64], points: &[u64], kind: SampleKind, batches: usize) -> Result<Vec<TailEstimate>> {
    points
        .iter()
        .map(|&k| {
            let e = estimate_mean(samples, |x| if x > k as f64 { 1.0 } else { 0.0 }, kind, batches)?;
            Ok(TailEstimate {
                k,
                probability: e.mean,
                std_error: e.std_error,
                sample_count: e.sample_count,
                batch_count: e.batch_count,
            })
        })
        .collect()
}

/// `(estimate - exact) / se`. A zero standard error with an exact match is a
/// zero score; with a mismatch the score is infinite.
pub fn z_score(estimate: f64, exact: f64, std_error: f64) -> f64 {
    let d = estimate - exact;
    if std_error > 0.0 {
        d / std_error
    } else if d == 0.0 {
        0.0
    } else {
        f64::INFINITY.copysign(d)
    }
}
