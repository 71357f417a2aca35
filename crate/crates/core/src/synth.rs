//! Additive synthesis of hum-like test signals from note sequences.

use std::f64::consts::TAU;
use std::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::dsp::Waveform;
use crate::error::{Error, Result};
use crate::types::{NoteEvent, NoteSequence};

#[derive(Debug, Clone, PartialEq)]
pub struct SynthParams {
    pub sample_rate: u32,
    /// Amplitude of harmonic `k + 1`.
    pub harmonic_amps: Vec<f64>,
    pub attack_s: f64,
    pub release_s: f64,
    /// Standard deviation of additive white noise.
    pub noise_rms: f64,
    pub seed: u64,
    /// Silence appended after the last offset.
    pub tail_s: f64,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            sample_rate: 22050,
            harmonic_amps: vec![1.0, 0.5, 0.25],
            attack_s: 0.02,
            release_s: 0.02,
            noise_rms: 0.0,
            seed: 0,
            tail_s: 0.2,
        }
    }
}

pub fn midi_to_hz(midi: f64) -> f64 {
    440.0 * 2f64.powf((midi - 69.0) / 12.0)
}

/// Renders `seq` as a sum of harmonics with linear attack and release ramps.
/// Harmonics at or above Nyquist are left out.
pub fn synth_hum(seq: &NoteSequence, params: &SynthParams) -> Result<Waveform> {
    if params.sample_rate == 0 {
        return Err(Error::InvalidConfig("sample rate must be positive".into()));
    }
    for (name, v) in [
        ("attack", params.attack_s),
        ("release", params.release_s),
        ("tail", params.tail_s),
    ] {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::InvalidConfig(format!("{name} must be non-negative, got {v}")));
        }
    }
    if !(params.noise_rms >= 0.0 && params.noise_rms.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "noise level must be non-negative, got {}",
            params.noise_rms
        )));
    }
    if let Some(n) = seq.iter().find(|n| n.duration() <= params.attack_s + params.release_s) {
        return Err(Error::InvalidConfig(format!(
            "note at {:.3} s lasts {:.3} s, not longer than attack plus release",
            n.onset(),
            n.duration()
        )));
    }
    let sr = params.sample_rate as f64;
    let nyquist = sr / 2.0;
    let len = ((seq.end_time() + params.tail_s) * sr).ceil().max(1.0) as usize;
    let mut out = vec![0.0; len];
    for note in seq {
        let f0 = midi_to_hz(note.pitch() as f64);
        let first = (note.onset() * sr).ceil() as usize;
        let last = ((note.offset() * sr).ceil() as usize).min(len);
        for (i, slot) in out.iter_mut().enumerate().take(last).skip(first) {
            let t = i as f64 / sr;
            let local = t - note.onset();
            let to_end = note.offset() - t;
            let mut gain = 1.0f64;
            if params.attack_s > 0.0 {
                gain = gain.min(local / params.attack_s);
            }
            if params.release_s > 0.0 {
                gain = gain.min(to_end / params.release_s);
            }
            let gain = gain.clamp(0.0, 1.0);
            let mut v = 0.0;
            for (k, &a) in params.harmonic_amps.iter().enumerate() {
                let f = f0 * (k + 1) as f64;
                if f >= nyquist {
                    break;
                }
                v += a * (TAU * f * local).sin();
            }
            *slot += gain * v;
        }
    }
    if params.noise_rms > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let noise = Normal::new(0.0, params.noise_rms).expect("valid deviation");
        for s in &mut out {
            *s += noise.sample(&mut rng);
        }
    }
    Waveform::new(out, params.sample_rate)
}

/// Shape of randomly generated melodies.
#[derive(Debug, Clone, PartialEq)]
pub struct MelodySpec {
    pub n_notes: RangeInclusive<usize>,
    pub midi: RangeInclusive<u8>,
    pub duration_s: RangeInclusive<f64>,
    pub gap_s: RangeInclusive<f64>,
    pub lead_in_s: f64,
}

impl Default for MelodySpec {
    fn default() -> Self {
        MelodySpec {
            n_notes: 3..=10,
            midi: 57..=76,
            duration_s: 0.2..=0.5,
            gap_s: 0.1..=0.15,
            lead_in_s: 0.2,
        }
    }
}

/// Draws a monophonic melody with silent gaps between notes.
pub fn random_melody<R: Rng + ?Sized>(rng: &mut R, spec: &MelodySpec, source_id: &str) -> Result<NoteSequence> {
    let n = rng.random_range(spec.n_notes.clone());
    let mut t = spec.lead_in_s;
    let mut notes = Vec::with_capacity(n);
    for i in 0..n {
        if i > 0 {
            t += rng.random_range(spec.gap_s.clone());
        }
        let d = rng.random_range(spec.duration_s.clone());
        notes.push(NoteEvent::new(t, t + d, rng.random_range(spec.midi.clone()))?);
        t += d;
    }
    NoteSequence::new(notes, source_id)
}
