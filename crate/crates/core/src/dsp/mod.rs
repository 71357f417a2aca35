//! Signal-level primitives.

mod cqt;
pub(crate) mod envelope;
mod resample;
mod stack;

pub use cqt::{cqt, CqtParams, SpectralFrames};
pub use envelope::{double_envelope, waveform_envelope, DEFAULT_PADDING};
pub use resample::resample;
pub use stack::{harmonic_shift, harmonic_stack, HarmonicStack, DEFAULT_HARMONICS};

use crate::error::{Error, Result};

/// A mono sample buffer.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    samples: Vec<f64>,
    sample_rate: u32,
}

impl Waveform {
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::InvalidConfig("sample rate must be positive".into()));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::NonFiniteSample(i));
        }
        Ok(Waveform { samples, sample_rate })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    /// Pointwise absolute value.
    pub fn abs(&self) -> Waveform {
        Waveform {
            samples: self.samples.iter().map(|s| s.abs()).collect(),
            sample_rate: self.sample_rate,
        }
    }

    pub(crate) fn from_parts_unchecked(samples: Vec<f64>, sample_rate: u32) -> Self {
        Waveform { samples, sample_rate }
    }
}
