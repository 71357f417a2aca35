//! Audio to affinity matrix to notes, with the default analysis settings.

use crate::decode::{decode, DecodeConfig};
use crate::dsp::{cqt, harmonic_stack, resample, CqtParams, Waveform, DEFAULT_HARMONICS};
use crate::error::{Error, Result};
use crate::salience::{default_weights, salience_affinity, AffinityMatrix, DEFAULT_SILENCE_GAIN};
use crate::types::{NoteClassMap, NoteSequence};

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureConfig {
    /// Audio is resampled to this rate before analysis.
    pub sample_rate: u32,
    pub cqt: CqtParams,
    pub harmonics: Vec<f64>,
    /// One weight per harmonic.
    pub weights: Vec<f64>,
    pub silence_gain: f64,
    pub class_map: NoteClassMap,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            sample_rate: 22050,
            cqt: CqtParams::default(),
            harmonics: DEFAULT_HARMONICS.to_vec(),
            weights: default_weights(&DEFAULT_HARMONICS),
            silence_gain: DEFAULT_SILENCE_GAIN,
            class_map: NoteClassMap::default(),
        }
    }
}

impl FeatureConfig {
    /// Replaces the harmonics and resets the weights to their defaults.
    pub fn with_harmonics(mut self, harmonics: Vec<f64>) -> Self {
        self.weights = default_weights(&harmonics);
        self.harmonics = harmonics;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.sample_rate == 0 {
            return Err(Error::InvalidConfig("analysis sample rate must be positive".into()));
        }
        self.cqt.validate(self.sample_rate)
    }
}

pub fn features(signal: &Waveform, cfg: &FeatureConfig) -> Result<AffinityMatrix> {
    cfg.validate()?;
    let audio = resample(signal, cfg.sample_rate)?;
    let frames = cqt(&audio, &cfg.cqt)?;
    let stack = harmonic_stack(&frames, &cfg.harmonics)?;
    salience_affinity(&stack, &cfg.class_map, &cfg.weights, cfg.silence_gain)
}

pub fn transcribe(signal: &Waveform, features_cfg: &FeatureConfig, decode_cfg: &DecodeConfig) -> Result<NoteSequence> {
    decode(&features(signal, features_cfg)?, decode_cfg)
}
