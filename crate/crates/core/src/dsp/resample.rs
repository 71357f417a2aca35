use super::Waveform;
use crate::error::{Error, Result};

/// Linear-interpolation resampler. No anti-aliasing filter is applied.
pub fn resample(signal: &Waveform, target_rate: u32) -> Result<Waveform> {
    if target_rate == 0 {
        return Err(Error::InvalidConfig("target sample rate must be positive".into()));
    }
    let source_rate = signal.sample_rate();
    if source_rate == target_rate {
        return Ok(signal.clone());
    }
    let x = signal.samples();
    let n = x.len();
    let out_len = ((n as f64) * target_rate as f64 / source_rate as f64).round() as usize;
    let step = source_rate as f64 / target_rate as f64;
    let out = (0..out_len)
        .map(|j| {
            let pos = j as f64 * step;
            let i = pos.floor() as usize;
            let frac = pos - i as f64;
            match (x.get(i), x.get(i + 1)) {
                (Some(&a), Some(&b)) => a + (b - a) * frac,
                (Some(&a), None) => a,
                _ => x[n - 1],
            }
        })
        .collect();
    Ok(Waveform::from_parts_unchecked(out, target_rate))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn identity_when_rates_match() {
        let wf = Waveform::new((0..500).map(|i| (i as f64 * 0.37).sin()).collect(), 22050).unwrap();
        let out = resample(&wf, 22050).unwrap();
        assert_eq!(out, wf);
    }

    #[test]
    fn constant_stays_constant() {
        let wf = Waveform::new(vec![0.3; 44100], 44100).unwrap();
        let out = resample(&wf, 22050).unwrap();
        assert_eq!(out.len(), 22050);
        assert_eq!(out.sample_rate(), 22050);
        assert!(out.samples().iter().all(|&v| (v - 0.3).abs() < 1e-15));
    }

    #[test]
    fn sine_downsample_error_is_small() {
        let sine = |rate: u32, n: usize| -> Vec<f64> {
            (0..n)
                .map(|i| (2.0 * PI * 441.0 * i as f64 / rate as f64).sin())
                .collect()
        };
        let wf = Waveform::new(sine(44100, 44100), 44100).unwrap();
        let out = resample(&wf, 22050).unwrap();
        let ideal = sine(22050, out.len());
        let rms = (out
            .samples()
            .iter()
            .zip(&ideal)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            / ideal.len() as f64)
            .sqrt();
        assert!(rms < 0.01, "rms error {rms}");

        // non-integer ratio
        let out = resample(&wf, 16000).unwrap();
        let ideal = sine(16000, out.len());
        let rms = (out
            .samples()
            .iter()
            .zip(&ideal)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            / ideal.len() as f64)
            .sqrt();
        assert!(rms < 0.01, "rms error {rms}");
    }

    #[test]
    fn zero_target_rejected() {
        let wf = Waveform::new(vec![0.0; 10], 100).unwrap();
        assert!(resample(&wf, 0).is_err());
    }
}
