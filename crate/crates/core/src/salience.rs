//! Frame-level note affinities from a harmonic stack.
//!
//! This is a deterministic stand-in for a trained frame classifier: pitched
//! classes score the weighted sum of their harmonics, the silence class scores
//! how far the frame's energy sits below the loudest frame, and every column
//! is log-softmax normalised.

use crate::dsp::HarmonicStack;
use crate::error::{Error, Result};
use crate::types::{FrameGrid, NoteClass, NoteClassMap};

pub const DEFAULT_SILENCE_GAIN: f64 = 5.0;

/// Log-domain class scores, stored class-major (`log_affinity[c * n_frames + t]`).
#[derive(Debug, Clone, PartialEq)]
pub struct AffinityMatrix {
    log_affinity: Vec<f32>,
    class_map: NoteClassMap,
    grid: FrameGrid,
}

impl AffinityMatrix {
    pub fn new(log_affinity: Vec<f32>, class_map: NoteClassMap, grid: FrameGrid) -> Result<Self> {
        let (l, t) = (class_map.n_classes(), grid.n_frames());
        if t == 0 {
            return Err(Error::NoFrames);
        }
        if log_affinity.len() != l * t {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for {l} classes x {t} frames",
                log_affinity.len()
            )));
        }
        if let Some(i) = log_affinity.iter().position(|v| v.is_nan() || *v == f32::INFINITY) {
            return Err(Error::MalformedAffinity(format!(
                "entry at class {}, frame {} is {}",
                i / t,
                i % t,
                log_affinity[i]
            )));
        }
        for frame in 0..t {
            if (0..l).all(|c| !log_affinity[c * t + frame].is_finite()) {
                return Err(Error::MalformedAffinity(format!("frame {frame} has no finite entry")));
            }
        }
        Ok(AffinityMatrix {
            log_affinity,
            class_map,
            grid,
        })
    }

    pub fn class_map(&self) -> &NoteClassMap {
        &self.class_map
    }

    pub fn grid(&self) -> &FrameGrid {
        &self.grid
    }

    pub fn n_classes(&self) -> usize {
        self.class_map.n_classes()
    }

    pub fn n_frames(&self) -> usize {
        self.grid.n_frames()
    }

    pub fn dummy(&self) -> usize {
        self.class_map.dummy_index()
    }

    pub fn values(&self) -> &[f32] {
        &self.log_affinity
    }

    pub fn get(&self, class: usize, frame: usize) -> f32 {
        self.log_affinity[class * self.n_frames() + frame]
    }

    pub fn row(&self, class: usize) -> &[f32] {
        let t = self.n_frames();
        &self.log_affinity[class * t..(class + 1) * t]
    }

    /// Class with the highest score in `frame` (lowest index on ties).
    pub fn argmax(&self, frame: usize) -> usize {
        let mut best = 0;
        for c in 1..self.n_classes() {
            if self.get(c, frame) > self.get(best, frame) {
                best = c;
            }
        }
        best
    }

    /// Frames `start..end` as a matrix of their own, with the grid origin moved.
    pub fn slice_frames(&self, start: usize, end: usize) -> Result<AffinityMatrix> {
        let t = self.n_frames();
        if start >= end || end > t {
            return Err(Error::FrameOutOfRange {
                frame: end,
                n_frames: t,
            });
        }
        let values = (0..self.n_classes())
            .flat_map(|c| self.row(c)[start..end].iter().copied())
            .collect();
        let grid = FrameGrid::new(self.grid.hop_s(), end - start, self.grid.time_unchecked(start))?;
        AffinityMatrix::new(values, self.class_map, grid)
    }
}

/// Column-wise log-softmax of a class-major `classes x frames` grid.
fn log_softmax_columns(raw: &[f64], classes: usize, frames: usize) -> Vec<f32> {
    let mut out = vec![0f32; raw.len()];
    for t in 0..frames {
        let column = (0..classes).map(|c| raw[c * frames + t]);
        let max = column.clone().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + column.map(|v| (v - max).exp()).sum::<f64>().ln();
        for c in 0..classes {
            out[c * frames + t] = (raw[c * frames + t] - lse) as f32;
        }
    }
    out
}

/// Wraps externally produced logits (class-major, `L x T`) as an affinity matrix.
pub fn logits_to_affinity(raw: &[f64], class_map: NoteClassMap, grid: FrameGrid) -> Result<AffinityMatrix> {
    let (l, t) = (class_map.n_classes(), grid.n_frames());
    if raw.len() != l * t {
        return Err(Error::ShapeMismatch(format!(
            "{} logits for {l} classes x {t} frames",
            raw.len()
        )));
    }
    if let Some(i) = raw.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteLogit {
            class: i / t,
            frame: i % t,
        });
    }
    AffinityMatrix::new(log_softmax_columns(raw, l, t), class_map, grid)
}

/// Default per-harmonic weights: `0.9^(h - 1)` for overtones, zero for sub-harmonics.
pub fn default_weights(harmonics: &[f64]) -> Vec<f64> {
    harmonics
        .iter()
        .map(|&h| if h < 1.0 { 0.0 } else { 0.9f64.powf(h - 1.0) })
        .collect()
}

/// Builds the affinity matrix for `class_map` from a harmonic stack.
///
/// Magnitudes are divided by the stack's global maximum, so the result does
/// not depend on the recording level. Classes whose fundamental falls outside
/// the analysed range score zero before normalisation.
pub fn salience_affinity(
    stack: &HarmonicStack,
    class_map: &NoteClassMap,
    weights: &[f64],
    silence_gain: f64,
) -> Result<AffinityMatrix> {
    if weights.len() != stack.harmonics().len() {
        return Err(Error::ShapeMismatch(format!(
            "{} weights for {} harmonics",
            weights.len(),
            stack.harmonics().len()
        )));
    }
    if weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
        return Err(Error::InvalidConfig(
            "harmonic weights must be finite and non-negative".into(),
        ));
    }
    if !silence_gain.is_finite() {
        return Err(Error::InvalidConfig("silence gain must be finite".into()));
    }

    let layers = stack.layers();
    let base = &layers[0];
    let (n_bins, t) = (stack.n_bins(), stack.n_frames());
    let (l, dummy) = (class_map.n_classes(), class_map.dummy_index());
    let bps = base.bins_per_semitone() as i64;
    let fmin_midi = base.fmin_midi();

    let peak = layers
        .iter()
        .flat_map(|layer| layer.magnitudes().iter())
        .cloned()
        .fold(0.0, f64::max);
    let norm = if peak > 0.0 { 1.0 / peak } else { 1.0 };

    let mut raw = vec![0.0f64; l * t];
    let mut covered = 0;
    for c in 0..dummy {
        let NoteClass::Pitch(midi) = class_map.class_to_midi(c)? else {
            unreachable!("pitched class index")
        };
        let bin = bps * (midi as i64 - fmin_midi);
        if !(0..n_bins as i64).contains(&bin) {
            continue;
        }
        covered += 1;
        let row = &mut raw[c * t..(c + 1) * t];
        for (layer, &w) in layers.iter().zip(weights) {
            if w == 0.0 {
                continue;
            }
            for (r, &m) in row.iter_mut().zip(layer.bin(bin as usize)) {
                *r += w * m * norm;
            }
        }
    }
    if covered == 0 {
        return Err(Error::NoBinOverlap);
    }

    // Frame energy from the least-shifted layer, i.e. the unshifted CQT when 1 is a harmonic.
    let reference = stack
        .harmonics()
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.log2().abs().total_cmp(&b.1.log2().abs()))
        .map(|(i, _)| &layers[i])
        .unwrap_or(base);
    let energy: Vec<f64> = (0..t)
        .map(|frame| {
            let sum: f64 = (0..n_bins).map(|b| reference.get(b, frame).powi(2)).sum();
            (sum / n_bins as f64).sqrt()
        })
        .collect();
    let loudest = energy.iter().cloned().fold(0.0, f64::max);
    for (frame, &e) in energy.iter().enumerate() {
        let level = if loudest > 0.0 { e / loudest } else { 0.0 };
        raw[dummy * t + frame] = silence_gain * (1.0 - level);
    }

    AffinityMatrix::new(log_softmax_columns(&raw, l, t), *class_map, *base.grid())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::{cqt, harmonic_stack, CqtParams, Waveform, DEFAULT_HARMONICS};
    use std::f64::consts::PI;

    fn logsumexp(col: impl Iterator<Item = f32>) -> f64 {
        let v: Vec<f64> = col.map(f64::from).collect();
        let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
    }

    fn stack_for(samples: Vec<f64>) -> HarmonicStack {
        let wf = Waveform::new(samples, 22050).unwrap();
        let frames = cqt(&wf, &CqtParams::default()).unwrap();
        harmonic_stack(&frames, &DEFAULT_HARMONICS).unwrap()
    }

    #[test]
    fn uniform_logits() {
        let map = NoteClassMap::default();
        let grid = FrameGrid::new(0.01, 3, 0.0).unwrap();
        let aff = logits_to_affinity(&vec![0.0; 89 * 3], map, grid).unwrap();
        let expected = -(89f64.ln()) as f32;
        assert!(aff.values().iter().all(|&v| (v - expected).abs() < 1e-6));
    }

    #[test]
    fn one_hot_logit_wins() {
        let map = NoteClassMap::new(4, 60).unwrap();
        let grid = FrameGrid::new(0.01, 1, 0.0).unwrap();
        let aff = logits_to_affinity(&[0.0, 0.0, 10.0, 0.0, 0.0], map, grid).unwrap();
        assert_eq!(aff.argmax(0), 2);
        for c in [0, 1, 3, 4] {
            assert!(aff.get(2, 0) > aff.get(c, 0));
        }
    }

    #[test]
    fn logits_errors() {
        let map = NoteClassMap::new(1, 60).unwrap();
        let grid = FrameGrid::new(0.01, 2, 0.0).unwrap();
        assert!(matches!(
            logits_to_affinity(&[0.0, f64::NAN, 0.0, 0.0], map, grid),
            Err(Error::NonFiniteLogit { class: 0, frame: 1 })
        ));
        assert!(matches!(
            logits_to_affinity(&[0.0; 3], map, grid),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn matrix_validation() {
        let map = NoteClassMap::new(1, 60).unwrap();
        let grid = FrameGrid::new(0.01, 2, 0.0).unwrap();
        let ninf = f32::NEG_INFINITY;
        assert!(AffinityMatrix::new(vec![0.0, ninf, ninf, 0.0], map, grid).is_ok());
        assert!(AffinityMatrix::new(vec![0.0, ninf, ninf, ninf], map, grid).is_err());
        assert!(AffinityMatrix::new(vec![0.0, f32::INFINITY, 0.0, 0.0], map, grid).is_err());
        assert!(AffinityMatrix::new(vec![], map, FrameGrid::new(0.01, 0, 0.0).unwrap()).is_err());
    }

    #[test]
    fn silent_frames_prefer_dummy() {
        let mut x = vec![0.0; 22050];
        for (i, v) in x.iter_mut().enumerate().take(11025) {
            *v = (2.0 * PI * 440.0 * i as f64 / 22050.0).sin();
        }
        let stack = stack_for(x);
        let map = NoteClassMap::default();
        let aff = salience_affinity(&stack, &map, &default_weights(stack.harmonics()), DEFAULT_SILENCE_GAIN).unwrap();
        let last = aff.n_frames() - 1;
        assert_eq!(aff.argmax(last), map.dummy_index());
        // a tone frame points at A4
        assert_eq!(map.class_to_midi(aff.argmax(20)).unwrap(), NoteClass::Pitch(69));
        for frame in 0..aff.n_frames() {
            assert!(logsumexp((0..aff.n_classes()).map(|c| aff.get(c, frame))).abs() < 1e-6);
        }
    }

    #[test]
    fn fully_silent_input() {
        let stack = stack_for(vec![0.0; 4096]);
        let map = NoteClassMap::default();
        let aff = salience_affinity(&stack, &map, &default_weights(stack.harmonics()), DEFAULT_SILENCE_GAIN).unwrap();
        for frame in 0..aff.n_frames() {
            assert_eq!(aff.argmax(frame), map.dummy_index());
        }
    }

    #[test]
    fn class_map_outside_range() {
        let stack = stack_for(vec![0.0; 1024]);
        let map = NoteClassMap::new(10, 0).unwrap();
        let err = salience_affinity(&stack, &map, &default_weights(stack.harmonics()), 5.0).unwrap_err();
        assert!(matches!(err, Error::NoBinOverlap));
        assert!(salience_affinity(&stack, &NoteClassMap::default(), &[1.0], 5.0).is_err());
    }

    #[test]
    fn slicing_frames() {
        let map = NoteClassMap::new(1, 60).unwrap();
        let grid = FrameGrid::new(0.5, 3, 1.0).unwrap();
        let aff = AffinityMatrix::new(vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0], map, grid).unwrap();
        let s = aff.slice_frames(1, 3).unwrap();
        assert_eq!(s.values(), &[2.0, 3.0, 5.0, 6.0]);
        assert_eq!(s.grid().t0_s(), 1.5);
    }
}
