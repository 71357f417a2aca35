//! Constant-Q filterbank.
//!
//! Bin `b` is a Hann-windowed complex exponential at
//! `fmin * 2^(b / (12 * bins_per_semitone))` whose length shrinks with
//! frequency so every bin has the same quality factor. The magnitude of its
//! correlation with the signal, centred on sample `t * hop`, is the value of
//! frame `t`.
//!
//! The correlation is evaluated in the frequency domain: one FFT of the whole
//! (zero-padded) signal, then per bin the product with the kernel's closed-form
//! spectrum over the band where that spectrum is non-negligible. Sampling the
//! result every `hop` samples is done by folding the band modulo the frame
//! count and running a single short inverse FFT.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::Waveform;
use crate::error::{Error, Result};
use crate::types::FrameGrid;

/// Half-width of the evaluated kernel spectrum, in units of `sample_rate / N`.
/// Hann sidelobes there are below 2e-4 of the peak.
const BAND_HALF_WIDTH: f64 = 12.0;

#[derive(Debug, Clone, PartialEq)]
pub struct CqtParams {
    pub fmin_hz: f64,
    pub bins_per_semitone: usize,
    pub n_octaves: usize,
    pub hop_samples: usize,
    /// Multiplier on the nominal quality factor `1 / (2^(1/bins_per_octave) - 1)`.
    pub filter_scale: f64,
}

impl Default for CqtParams {
    fn default() -> Self {
        CqtParams {
            fmin_hz: 32.70,
            bins_per_semitone: 3,
            n_octaves: 7,
            hop_samples: 256,
            filter_scale: 0.65,
        }
    }
}

impl CqtParams {
    pub fn bins_per_octave(&self) -> usize {
        12 * self.bins_per_semitone
    }

    pub fn n_bins(&self) -> usize {
        self.bins_per_octave() * self.n_octaves
    }

    pub fn bin_frequency(&self, bin: usize) -> f64 {
        self.fmin_hz * 2f64.powf(bin as f64 / self.bins_per_octave() as f64)
    }

    /// Kernel quality factor actually used.
    pub fn q_factor(&self) -> f64 {
        self.filter_scale / (2f64.powf(1.0 / self.bins_per_octave() as f64) - 1.0)
    }

    /// Kernel length in samples for `bin`.
    pub fn kernel_len(&self, bin: usize, sample_rate: u32) -> usize {
        let n = (self.q_factor() * sample_rate as f64 / self.bin_frequency(bin)).round();
        (n as usize).max(2)
    }

    pub fn validate(&self, sample_rate: u32) -> Result<()> {
        if !(self.fmin_hz > 0.0 && self.fmin_hz.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "fmin must be positive, got {}",
                self.fmin_hz
            )));
        }
        if self.bins_per_semitone == 0 || self.n_octaves == 0 {
            return Err(Error::InvalidConfig(
                "CQT needs at least one bin per semitone and one octave".into(),
            ));
        }
        if self.hop_samples == 0 {
            return Err(Error::InvalidConfig("hop must be at least one sample".into()));
        }
        if !(self.filter_scale > 0.0 && self.filter_scale.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "filter scale must be positive, got {}",
                self.filter_scale
            )));
        }
        let highest_hz = self.fmin_hz * 2f64.powi(self.n_octaves as i32);
        let nyquist_hz = sample_rate as f64 / 2.0;
        if highest_hz >= nyquist_hz {
            return Err(Error::NyquistViolation { highest_hz, nyquist_hz });
        }
        Ok(())
    }
}

/// CQT magnitude grid, stored bin-major (`magnitudes[b * n_frames + t]`).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFrames {
    magnitudes: Vec<f64>,
    n_bins: usize,
    bins_per_semitone: usize,
    fmin_hz: f64,
    grid: FrameGrid,
}

impl SpectralFrames {
    pub fn new(
        magnitudes: Vec<f64>,
        n_bins: usize,
        bins_per_semitone: usize,
        fmin_hz: f64,
        grid: FrameGrid,
    ) -> Result<Self> {
        if magnitudes.len() != n_bins * grid.n_frames() {
            return Err(Error::ShapeMismatch(format!(
                "{} magnitudes for {} bins x {} frames",
                magnitudes.len(),
                n_bins,
                grid.n_frames()
            )));
        }
        if bins_per_semitone == 0 || !n_bins.is_multiple_of(12 * bins_per_semitone) {
            return Err(Error::ShapeMismatch(format!(
                "{n_bins} bins is not a whole number of octaves at {bins_per_semitone} bins per semitone"
            )));
        }
        if magnitudes.iter().any(|m| !(m.is_finite() && *m >= 0.0)) {
            return Err(Error::InvalidConfig(
                "magnitudes must be finite and non-negative".into(),
            ));
        }
        Ok(SpectralFrames {
            magnitudes,
            n_bins,
            bins_per_semitone,
            fmin_hz,
            grid,
        })
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    pub fn n_frames(&self) -> usize {
        self.grid.n_frames()
    }

    pub fn bins_per_semitone(&self) -> usize {
        self.bins_per_semitone
    }

    pub fn fmin_hz(&self) -> f64 {
        self.fmin_hz
    }

    /// MIDI pitch of bin 0, rounded to the nearest semitone.
    pub fn fmin_midi(&self) -> i64 {
        (69.0 + 12.0 * (self.fmin_hz / 440.0).log2()).round() as i64
    }

    pub fn grid(&self) -> &FrameGrid {
        &self.grid
    }

    pub fn magnitudes(&self) -> &[f64] {
        &self.magnitudes
    }

    pub fn get(&self, bin: usize, frame: usize) -> f64 {
        self.magnitudes[bin * self.n_frames() + frame]
    }

    pub fn bin(&self, bin: usize) -> &[f64] {
        let t = self.n_frames();
        &self.magnitudes[bin * t..(bin + 1) * t]
    }

    /// Bin index of the largest magnitude in `frame` (lowest index on ties).
    pub fn peak_bin(&self, frame: usize) -> usize {
        let mut best = 0;
        for b in 1..self.n_bins {
            if self.get(b, frame) > self.get(best, frame) {
                best = b;
            }
        }
        best
    }

    pub(crate) fn with_magnitudes(&self, magnitudes: Vec<f64>) -> Self {
        debug_assert_eq!(magnitudes.len(), self.magnitudes.len());
        SpectralFrames {
            magnitudes,
            ..self.clone()
        }
    }
}

/// Spectrum of the periodic Hann window of length `n` at angular frequency `phi`,
/// `sum_m w(m) e^{i m phi}`.
fn hann_spectrum(n: usize, phi: f64) -> Complex64 {
    let nf = n as f64;
    let x = 0.5 * phi;
    let delta = PI / nf;
    // sin(N x) is shared by the three Dirichlet terms up to sign.
    let s = (nf * x).sin();
    let ratio = |y: f64, sign: f64| -> f64 {
        let d = y.sin();
        if d.abs() < 1e-9 {
            // limit of sin(N y) / sin(y)
            nf * (nf * y).cos() / y.cos()
        } else {
            sign * s / d
        }
    };
    let common = Complex64::from_polar(1.0, (nf - 1.0) * x);
    let shift = Complex64::from_polar(1.0, (nf - 1.0) * delta);
    let centre = 0.5 * ratio(x, 1.0);
    let upper = shift * (-0.25 * ratio(x + delta, -1.0));
    let lower = shift.conj() * (-0.25 * ratio(x - delta, -1.0));
    common * (centre + upper + lower)
}

/// Constant-Q magnitudes of `signal`.
pub fn cqt(signal: &Waveform, params: &CqtParams) -> Result<SpectralFrames> {
    params.validate(signal.sample_rate())?;
    if signal.is_empty() {
        return Err(Error::EmptySignal);
    }
    let fs = signal.sample_rate() as f64;
    let len = signal.len();
    let hop = params.hop_samples;
    let n_bins = params.n_bins();
    let n_frames = (len - 1) / hop + 1;

    let longest = params.kernel_len(0, signal.sample_rate());
    let fold = (len + longest + 1).div_ceil(hop).next_power_of_two();
    let size = fold * hop;

    let mut planner = FftPlanner::<f64>::new();
    let forward: Arc<dyn Fft<f64>> = planner.plan_fft_forward(size);
    let inverse: Arc<dyn Fft<f64>> = planner.plan_fft_inverse(fold);

    let mut spectrum: Vec<Complex64> = signal
        .samples()
        .iter()
        .map(|&s| Complex64::new(s, 0.0))
        .chain(std::iter::repeat(Complex64::new(0.0, 0.0)))
        .take(size)
        .collect();
    forward.process(&mut spectrum);

    let mut magnitudes = vec![0.0; n_bins * n_frames];
    let mut folded = vec![Complex64::new(0.0, 0.0); fold];
    let size_f = size as f64;
    for bin in 0..n_bins {
        let f = params.bin_frequency(bin);
        let n = params.kernel_len(bin, signal.sample_rate());
        let centre = (n / 2) as f64;
        let scale = 4.0 / (n as f64 * size_f);

        let j0 = f * size_f / fs;
        let half = (BAND_HALF_WIDTH * size_f / n as f64).ceil();
        let lo = (j0 - half).floor() as i64;
        let hi = (j0 + half).ceil() as i64;

        folded.fill(Complex64::new(0.0, 0.0));
        for j in lo..=hi {
            let jm = j.rem_euclid(size as i64) as usize;
            let phi = 2.0 * PI * (f / fs - j as f64 / size_f);
            let kernel = hann_spectrum(n, phi);
            let delay = Complex64::from_polar(1.0, -2.0 * PI * (jm as f64) * centre / size_f);
            folded[jm % fold] += spectrum[jm] * kernel.conj() * delay;
        }
        inverse.process(&mut folded);
        let row = &mut magnitudes[bin * n_frames..(bin + 1) * n_frames];
        for (m, z) in row.iter_mut().zip(folded.iter()) {
            *m = z.norm() * scale;
        }
    }

    let grid = FrameGrid::new(hop as f64 / fs, n_frames, 0.0)?;
    SpectralFrames::new(magnitudes, n_bins, params.bins_per_semitone, params.fmin_hz, grid)
}
