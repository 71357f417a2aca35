//! Tight amplitude envelope built from two sliding maxima.
//!
//! For every index `i` the envelope is the smaller of the maximum over the
//! `padding` samples before `i` and the maximum over the `padding` samples
//! starting at `i`, with the signal zero-extended at both ends. A point only
//! stays high if there is energy on both sides of it, which suppresses
//! isolated spikes and hugs the waveform closely.

use std::collections::VecDeque;

use super::Waveform;
use crate::error::{Error, Result};

pub const DEFAULT_PADDING: usize = 100;

/// Sliding maximum over the zero-extended signal.
///
/// Returns `s` of length `n + padding` with `s[k] = max(x[j] for j in k-padding..k)`,
/// treating out-of-range `x[j]` as zero.
fn trailing_max(x: &[f64], padding: usize) -> Vec<f64> {
    let n = x.len();
    let value = |m: usize| -> f64 {
        // m indexes the signal padded with `padding` zeros on the left
        if m < padding || m - padding >= n {
            0.0
        } else {
            x[m - padding]
        }
    };

    let mut out = Vec::with_capacity(n + padding);
    let mut window: VecDeque<(usize, f64)> = VecDeque::with_capacity(padding + 1);
    // Window for out[k] covers padded indices k..k+padding.
    for m in 0..n + 2 * padding {
        let v = value(m);
        while let Some(&(_, back)) = window.back() {
            if back <= v {
                window.pop_back();
            } else {
                break;
            }
        }
        window.push_back((m, v));
        if m + 1 >= padding {
            let k = m + 1 - padding;
            while let Some(&(idx, _)) = window.front() {
                if idx < k {
                    window.pop_front();
                } else {
                    break;
                }
            }
            if k < n + padding {
                out.push(window.front().map_or(0.0, |&(_, v)| v));
            }
        }
    }
    out
}

pub(crate) fn envelope_samples(x: &[f64], padding: usize) -> Vec<f64> {
    let s = trailing_max(x, padding);
    (0..x.len()).map(|i| s[i].min(s[i + padding])).collect()
}

/// Envelope of a (rectified) signal; output length equals input length.
pub fn waveform_envelope(signal: &Waveform, padding: usize) -> Result<Waveform> {
    if signal.is_empty() {
        return Err(Error::EmptySignal);
    }
    if padding == 0 {
        return Err(Error::InvalidConfig("envelope padding must be at least 1".into()));
    }
    Ok(Waveform::from_parts_unchecked(
        envelope_samples(signal.samples(), padding),
        signal.sample_rate(),
    ))
}

/// The envelope of the envelope, both with the default padding of 100 samples.
pub fn double_envelope(signal: &Waveform) -> Result<Waveform> {
    double_envelope_with(signal, DEFAULT_PADDING)
}

pub(crate) fn double_envelope_with(signal: &Waveform, padding: usize) -> Result<Waveform> {
    let once = waveform_envelope(signal, padding)?;
    waveform_envelope(&once, padding)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Direct evaluation of the definition.
    fn brute_envelope(x: &[f64], p: usize) -> Vec<f64> {
        let at = |j: isize| -> f64 {
            if j < 0 || j as usize >= x.len() {
                0.0
            } else {
                x[j as usize]
            }
        };
        (0..x.len() as isize)
            .map(|i| {
                let before = (i - p as isize..i).map(at).fold(f64::NEG_INFINITY, f64::max);
                let after = (i..i + p as isize).map(at).fold(f64::NEG_INFINITY, f64::max);
                before.min(after)
            })
            .collect()
    }

    fn wf(x: Vec<f64>) -> Waveform {
        Waveform::new(x, 1000).unwrap()
    }

    #[test]
    fn zeros_stay_zero() {
        let env = waveform_envelope(&wf(vec![0.0; 1000]), 100).unwrap();
        assert_eq!(env.len(), 1000);
        assert!(env.samples().iter().all(|&v| v == 0.0));
        assert!(double_envelope(&wf(vec![0.0; 1000]))
            .unwrap()
            .samples()
            .iter()
            .all(|&v| v == 0.0));
    }

    #[test]
    fn impulse_is_suppressed() {
        let mut x = vec![0.0; 1000];
        x[500] = 1.0;
        let env = waveform_envelope(&wf(x), 100).unwrap();
        assert!(env.samples().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn impulse_train_is_suppressed_twice() {
        let mut x = vec![0.0; 3000];
        for i in (100..3000).step_by(250) {
            x[i] = 0.8;
        }
        let env = double_envelope(&wf(x)).unwrap();
        assert!(env.samples().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn rectangular_pulse() {
        let mut x = vec![0.0; 1200];
        x[400..800].fill(1.0);
        let env = waveform_envelope(&wf(x.clone()), 100).unwrap();
        assert_eq!(env.samples(), brute_envelope(&x, 100).as_slice());
        for (i, &v) in env.samples().iter().enumerate() {
            let expected = if (401..=799).contains(&i) { 1.0 } else { 0.0 };
            assert_eq!(v, expected, "index {i}");
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(waveform_envelope(&wf(vec![]), 100), Err(Error::EmptySignal)));
        assert!(waveform_envelope(&wf(vec![1.0]), 0).is_err());
    }

    #[test]
    fn short_signals_and_small_padding() {
        for p in 1..6 {
            for n in 1..12 {
                let x: Vec<f64> = (0..n).map(|i| ((i * 7 + 3) % 5) as f64).collect();
                assert_eq!(envelope_samples(&x, p), brute_envelope(&x, p), "n={n} p={p}");
            }
        }
    }

    proptest! {
        #[test]
        fn matches_brute_force(x in prop::collection::vec(0.0f64..1.0, 1..400), p in 1usize..40) {
            prop_assert_eq!(envelope_samples(&x, p), brute_envelope(&x, p));
        }

        #[test]
        fn bounded_by_input_max(x in prop::collection::vec(0.0f64..2.0, 1..600)) {
            let max = x.iter().cloned().fold(0.0, f64::max);
            let env = double_envelope(&wf(x)).unwrap();
            prop_assert!(env.samples().iter().all(|&v| v <= max));
        }
    }
}
