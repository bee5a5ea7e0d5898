//! Sample aggregation: plain and clustered means with standard errors.
//!
//! All sums use Kahan compensation so that merging partial accumulators in a
//! fixed order reproduces a single sequential pass to ~1e-12 relative.

use crate::error::{EngineError, Result};

#[inline]
fn kahan_add(sum: &mut f64, comp: &mut f64, x: f64) {
    let y = x - *comp;
    let t = *sum + y;
    *comp = (t - *sum) - y;
    *sum = t;
}

/// Mergeable count / sum / sum-of-squares accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct SampleAccumulator {
    n: u64,
    sum: f64,
    sum_c: f64,
    sumsq: f64,
    sumsq_c: f64,
}

impl SampleAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.n += 1;
        kahan_add(&mut self.sum, &mut self.sum_c, x);
        kahan_add(&mut self.sumsq, &mut self.sumsq_c, x * x);
    }

    pub fn merge(&mut self, other: &SampleAccumulator) {
        self.n += other.n;
        kahan_add(&mut self.sum, &mut self.sum_c, other.sum);
        kahan_add(&mut self.sumsq, &mut self.sumsq_c, other.sumsq);
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.sum / self.n as f64
    }

    /// Unbiased sample variance, clamped at zero against rounding.
    pub fn variance(&self) -> f64 {
        let n = self.n as f64;
        ((self.sumsq - self.sum * self.sum / n) / (n - 1.0)).max(0.0)
    }

    /// Mean and standard error of the mean; requires at least two samples.
    pub fn mean_se(&self) -> Result<(f64, f64)> {
        if self.n < 2 {
            return Err(EngineError::InsufficientSamples {
                needed: 2,
                got: self.n as usize,
            });
        }
        Ok((self.mean(), (self.variance() / self.n as f64).sqrt()))
    }
}

pub fn mean_se(samples: &[f64]) -> Result<(f64, f64)> {
    let mut acc = SampleAccumulator::new();
    for &x in samples {
        acc.push(x);
    }
    acc.mean_se()
}

/// Grand mean and standard error over per-outer-path cluster means.
///
/// Inner paths sharing one variance/rate realization are dependent, so the
/// estimator's sampling error is measured across the independent outer
/// scenarios only.
pub fn clustered_mean_se(cluster_means: &[f64]) -> Result<(f64, f64)> {
    mean_se(cluster_means)
}
