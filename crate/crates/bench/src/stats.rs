//! Sample statistics, generic over the float type.

use num_traits::Float;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(usize),
}

/// z for a two-sided 95% normal interval.
pub const Z95: f64 = 1.96;

fn lift<F: Float>(x: f64) -> F {
    F::from(x).expect("representable constant")
}

pub fn mean<F: Float>(xs: &[F]) -> Option<F> {
    if xs.is_empty() {
        return None;
    }
    let n: F = lift(xs.len() as f64);
    Some(xs.iter().fold(F::zero(), |a, &x| a + x) / n)
}

/// Bessel-corrected standard deviation.
pub fn sample_sd<F: Float>(xs: &[F]) -> Result<F, StatsError> {
    if xs.len() < 2 {
        return Err(StatsError::TooFewSamples(xs.len()));
    }
    let m = mean(xs).expect("non-empty");
    let ss = xs.iter().fold(F::zero(), |a, &x| a + (x - m) * (x - m));
    Ok((ss / lift(xs.len() as f64 - 1.0)).sqrt())
}

/// Mean with its normal-approximation 95% interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval<F> {
    pub n: usize,
    pub mean: F,
    pub low: F,
    pub high: F,
}

impl<F: Float> Interval<F> {
    pub fn of(xs: &[F]) -> Result<Self, StatsError> {
        let sd = sample_sd(xs)?;
        let m = mean(xs).expect("non-empty");
        let half = lift::<F>(Z95) * sd / lift::<F>(xs.len() as f64).sqrt();
        Ok(Self {
            n: xs.len(),
            mean: m,
            low: m - half,
            high: m + half,
        })
    }

    /// Strictly below `other`, with no overlap.
    pub fn below(&self, other: &Self) -> bool {
        self.high < other.low
    }
}
