use std::ops::Deref;

use num_complex::Complex64;

use crate::error::SimError;

/// One stream of complex baseband samples, one sample per symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalBlock(Vec<Complex64>);

impl SignalBlock {
    pub fn new(samples: Vec<Complex64>) -> Result<Self, SimError> {
        if samples.is_empty() {
            return Err(SimError::EmptyBlock);
        }
        Ok(SignalBlock(samples))
    }

    pub fn zeros(len: usize) -> Result<Self, SimError> {
        Self::new(vec![Complex64::new(0.0, 0.0); len])
    }

    /// Mean of |x|^2.
    pub fn mean_power(&self) -> f64 {
        mean_power(&self.0)
    }

    pub fn scaled(&self, gain: Complex64) -> SignalBlock {
        SignalBlock(self.0.iter().map(|&x| x * gain).collect())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.re.is_finite() && x.im.is_finite())
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }
}

impl Deref for SignalBlock {
    type Target = [Complex64];

    fn deref(&self) -> &[Complex64] {
        &self.0
    }
}

pub(crate) fn mean_power(x: &[Complex64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    x.iter().map(|s| s.norm_sqr()).sum::<f64>() / x.len() as f64
}

/// Population variance of a complex sequence: mean |x - mean(x)|^2.
pub(crate) fn variance(x: &[Complex64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<Complex64>() / n;
    x.iter().map(|s| (s - mean).norm_sqr()).sum::<f64>() / n
}

/// Checks that all streams share one length and returns it.
pub(crate) fn common_len(streams: &[SignalBlock]) -> Result<usize, SimError> {
    let first = streams.first().ok_or(SimError::EmptyBlock)?.len();
    for s in streams {
        if s.len() != first {
            return Err(SimError::LengthMismatch {
                left: first,
                right: s.len(),
            });
        }
    }
    Ok(first)
}
