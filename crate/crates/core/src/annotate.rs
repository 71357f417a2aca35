//! Onset/offset repair for reference annotations.
//!
//! The rectified signal is enveloped twice, then thresholded at a sweep of
//! levels relative to the envelope's range. Each level yields rising and
//! falling crossings which are cleaned (short gaps merged, short notes
//! dropped). The first level whose note count matches the trusted reference
//! count wins; if none matches the recording is rejected.

use crate::dsp::{self, Waveform};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationConfig {
    /// Fractions of the envelope range, strictly ascending in (0, 1).
    pub thresholds: Vec<f64>,
    pub min_note_s: f64,
    pub min_silence_s: f64,
    /// Envelope window, in samples.
    pub padding: usize,
}

impl Default for AnnotationConfig {
    fn default() -> Self {
        AnnotationConfig {
            thresholds: (1..=20).map(|k| k as f64 * 0.02).collect(),
            min_note_s: 0.05,
            min_silence_s: 0.03,
            padding: dsp::DEFAULT_PADDING,
        }
    }
}

impl AnnotationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.thresholds.is_empty() {
            return Err(Error::InvalidConfig("threshold sweep is empty".into()));
        }
        if self.thresholds.iter().any(|&t| !(t > 0.0 && t < 1.0)) {
            return Err(Error::InvalidConfig("thresholds must lie in (0, 1)".into()));
        }
        if self.thresholds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig("thresholds must be strictly ascending".into()));
        }
        if self.min_note_s.is_nan() || self.min_note_s <= 0.0 {
            return Err(Error::InvalidConfig("minimum note length must be positive".into()));
        }
        if self.min_silence_s.is_nan() || self.min_silence_s < 0.0 {
            return Err(Error::InvalidConfig("minimum silence must be non-negative".into()));
        }
        if self.padding == 0 {
            return Err(Error::InvalidConfig("envelope padding must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationResult {
    pub accepted: bool,
    pub threshold_used: Option<f64>,
    /// Cleaned (onset, offset) pairs in seconds; empty unless accepted.
    pub onsets_offsets: Vec<(f64, f64)>,
    pub n_expected: usize,
    /// Cleaned note count for each threshold tried, in sweep order.
    pub n_detected_per_threshold: Vec<usize>,
    pub sample_rate: u32,
}

impl AnnotationResult {
    /// Accepted pairs as sample indices.
    pub fn sample_pairs(&self) -> Vec<(usize, usize)> {
        let sr = self.sample_rate as f64;
        self.onsets_offsets
            .iter()
            .map(|&(on, off)| ((on * sr).round() as usize, (off * sr).round() as usize))
            .collect()
    }
}

/// Rising and falling crossings of `envelope` through `threshold`.
///
/// An onset is an index `i` with `env[i] <= threshold < env[i + 1]`; an offset
/// is `i + 1` where `env[i] > threshold >= env[i + 1]`. A signal that starts
/// above the threshold gets an onset at 0 and one that ends above it gets an
/// offset at the last index, so the two lists always pair up.
pub fn threshold_crossings(envelope: &[f64], threshold: f64) -> (Vec<usize>, Vec<usize>) {
    let mut onsets = Vec::new();
    let mut offsets = Vec::new();
    let Some(&first) = envelope.first() else {
        return (onsets, offsets);
    };
    if first > threshold {
        onsets.push(0);
    }
    for (i, w) in envelope.windows(2).enumerate() {
        let (a, b) = (w[0] > threshold, w[1] > threshold);
        if !a && b {
            onsets.push(i);
        } else if a && !b {
            offsets.push(i + 1);
        }
    }
    if envelope[envelope.len() - 1] > threshold {
        offsets.push(envelope.len() - 1);
    }
    (onsets, offsets)
}

/// Merges pairs separated by less than `min_silence_s`, then drops pairs
/// shorter than `min_note_s`.
pub fn adjust_onsets_offsets(pairs: &[(f64, f64)], min_note_s: f64, min_silence_s: f64) -> Vec<(f64, f64)> {
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(pairs.len());
    for &(on, off) in pairs {
        match merged.last_mut() {
            Some(last) if on - last.1 < min_silence_s => last.1 = last.1.max(off),
            _ => merged.push((on, off)),
        }
    }
    merged.retain(|&(on, off)| off - on >= min_note_s);
    merged
}

pub fn correct_annotation(signal: &Waveform, n_expected: usize, cfg: &AnnotationConfig) -> Result<AnnotationResult> {
    cfg.validate()?;
    if n_expected == 0 {
        return Err(Error::InvalidConfig("expected note count must be at least 1".into()));
    }
    if signal.is_empty() {
        return Err(Error::EmptySignal);
    }
    let sr = signal.sample_rate();
    let env = dsp::envelope::double_envelope_with(&signal.abs(), cfg.padding)?;
    let env = env.samples();
    let lo = env.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = env.iter().cloned().fold(f64::NEG_INFINITY, f64::max);

    let mut counts = Vec::with_capacity(cfg.thresholds.len());
    for &fraction in &cfg.thresholds {
        let level = lo + fraction * (hi - lo);
        let (onsets, offsets) = threshold_crossings(env, level);
        let pairs: Vec<(f64, f64)> = onsets
            .iter()
            .zip(&offsets)
            .map(|(&on, &off)| (on as f64 / sr as f64, off as f64 / sr as f64))
            .collect();
        let cleaned = adjust_onsets_offsets(&pairs, cfg.min_note_s, cfg.min_silence_s);
        counts.push(cleaned.len());
        if cleaned.len() == n_expected {
            return Ok(AnnotationResult {
                accepted: true,
                threshold_used: Some(fraction),
                onsets_offsets: cleaned,
                n_expected,
                n_detected_per_threshold: counts,
                sample_rate: sr,
            });
        }
    }
    Ok(AnnotationResult {
        accepted: false,
        threshold_used: None,
        onsets_offsets: Vec::new(),
        n_expected,
        n_detected_per_threshold: counts,
        sample_rate: sr,
    })
}
