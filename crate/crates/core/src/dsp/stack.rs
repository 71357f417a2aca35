use super::SpectralFrames;
use crate::error::{Error, Result};

/// One sub-harmonic and seven overtones.
pub const DEFAULT_HARMONICS: [f64; 8] = [0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0];

/// Bin-aligned copies of a CQT, one per harmonic, so that row `b` of layer
/// `h` holds the energy found at `h` times the frequency of bin `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicStack {
    layers: Vec<SpectralFrames>,
    harmonics: Vec<f64>,
}

impl HarmonicStack {
    pub fn layers(&self) -> &[SpectralFrames] {
        &self.layers
    }

    pub fn harmonics(&self) -> &[f64] {
        &self.harmonics
    }

    pub fn n_bins(&self) -> usize {
        self.layers[0].n_bins()
    }

    pub fn n_frames(&self) -> usize {
        self.layers[0].n_frames()
    }
}

/// Bin offset of harmonic `h`: `round(12 * bins_per_semitone * log2(h))`.
pub fn harmonic_shift(h: f64, bins_per_semitone: usize) -> i64 {
    (12.0 * bins_per_semitone as f64 * h.log2()).round() as i64
}

pub fn harmonic_stack(frames: &SpectralFrames, harmonics: &[f64]) -> Result<HarmonicStack> {
    if harmonics.is_empty() {
        return Err(Error::InvalidConfig("at least one harmonic is required".into()));
    }
    if let Some(&h) = harmonics.iter().find(|h| !(**h > 0.0 && h.is_finite())) {
        return Err(Error::InvalidHarmonic(h));
    }
    let n_bins = frames.n_bins() as i64;
    let n_frames = frames.n_frames();
    let layers = harmonics
        .iter()
        .map(|&h| {
            let shift = harmonic_shift(h, frames.bins_per_semitone());
            let mut out = vec![0.0; frames.magnitudes().len()];
            for b in 0..n_bins {
                let src = b + shift;
                if (0..n_bins).contains(&src) {
                    let dst = b as usize * n_frames;
                    out[dst..dst + n_frames].copy_from_slice(frames.bin(src as usize));
                }
            }
            frames.with_magnitudes(out)
        })
        .collect();
    Ok(HarmonicStack {
        layers,
        harmonics: harmonics.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::FrameGrid;

    fn ramp_frames() -> SpectralFrames {
        // 72 bins (2 octaves at 3 bins/semitone), 4 frames
        let mags: Vec<f64> = (0..72 * 4).map(|i| (i / 4) as f64 + 0.25 * (i % 4) as f64).collect();
        SpectralFrames::new(mags, 72, 3, 55.0, FrameGrid::new(0.01, 4, 0.0).unwrap()).unwrap()
    }

    #[test]
    fn fundamental_is_identity() {
        let f = ramp_frames();
        let s = harmonic_stack(&f, &[1.0]).unwrap();
        assert_eq!(s.layers().len(), 1);
        assert_eq!(s.layers()[0], f);
    }

    #[test]
    fn octave_shifts() {
        assert_eq!(harmonic_shift(2.0, 3), 36);
        assert_eq!(harmonic_shift(0.5, 3), -36);
        assert_eq!(harmonic_shift(3.0, 3), 57);
        let f = ramp_frames();
        let s = harmonic_stack(&f, &[2.0, 0.5]).unwrap();
        let (up, down) = (&s.layers()[0], &s.layers()[1]);
        for t in 0..4 {
            for b in 0..72 {
                let want_up = if b + 36 < 72 { f.get(b + 36, t) } else { 0.0 };
                let want_down = if b >= 36 { f.get(b - 36, t) } else { 0.0 };
                assert_eq!(up.get(b, t), want_up);
                assert_eq!(down.get(b, t), want_down);
            }
        }
    }

    #[test]
    fn rejects_non_positive_harmonics() {
        let f = ramp_frames();
        assert!(matches!(
            harmonic_stack(&f, &[1.0, 0.0]),
            Err(Error::InvalidHarmonic(_))
        ));
        assert!(matches!(harmonic_stack(&f, &[-2.0]), Err(Error::InvalidHarmonic(_))));
    }
}
