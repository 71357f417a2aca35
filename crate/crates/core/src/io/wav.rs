use std::io::{Cursor, Read, Seek};
use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};

use crate::dsp::Waveform;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WavEncoding {
    Pcm16,
    #[default]
    Float32,
}

fn map_hound(e: hound::Error) -> Error {
    match e {
        // short reads surface as generic I/O errors from the decoder
        hound::Error::IoError(io) => Error::MalformedWav(io.to_string()),
        hound::Error::FormatError(msg) => Error::MalformedWav(msg.into()),
        hound::Error::Unsupported => Error::UnsupportedWav("format not handled by the reader".into()),
        hound::Error::TooWide => Error::UnsupportedWav("sample is wider than its container".into()),
        other => Error::MalformedWav(other.to_string()),
    }
}

/// Decodes a 16-bit PCM or 32-bit float WAV stream, averaging channels to mono.
pub fn read_wav_from<R: Read + Seek>(reader: R) -> Result<Waveform> {
    let reader = WavReader::new(reader).map_err(map_hound)?;
    let spec = reader.spec();
    let channels = spec.channels as usize;
    if channels == 0 {
        return Err(Error::MalformedWav("zero channels".into()));
    }
    let interleaved: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (SampleFormat::Int, 16) => reader
            .into_samples::<i16>()
            .map(|s| s.map(|v| v as f64 / 32768.0))
            .collect::<std::result::Result<_, _>>()
            .map_err(map_hound)?,
        (SampleFormat::Float, 32) => reader
            .into_samples::<f32>()
            .map(|s| s.map(f64::from))
            .collect::<std::result::Result<_, _>>()
            .map_err(map_hound)?,
        (format, bits) => {
            return Err(Error::UnsupportedWav(format!("{bits}-bit {format:?} samples")));
        }
    };
    if !interleaved.len().is_multiple_of(channels) {
        return Err(Error::MalformedWav(
            "sample count is not a multiple of the channel count".into(),
        ));
    }
    let mono = interleaved
        .chunks_exact(channels)
        .map(|frame| frame.iter().sum::<f64>() / channels as f64)
        .collect();
    Waveform::new(mono, spec.sample_rate)
}

pub fn read_wav(path: &Path) -> Result<Waveform> {
    let bytes = super::read_file(path)?;
    read_wav_from(Cursor::new(bytes)).map_err(|e| e.at(path))
}

pub fn write_wav(signal: &Waveform, path: &Path, encoding: WavEncoding) -> Result<()> {
    let spec = WavSpec {
        channels: 1,
        sample_rate: signal.sample_rate(),
        bits_per_sample: match encoding {
            WavEncoding::Pcm16 => 16,
            WavEncoding::Float32 => 32,
        },
        sample_format: match encoding {
            WavEncoding::Pcm16 => SampleFormat::Int,
            WavEncoding::Float32 => SampleFormat::Float,
        },
    };
    let mut buf = Cursor::new(Vec::new());
    {
        let mut w = WavWriter::new(&mut buf, spec).map_err(map_hound)?;
        for &s in signal.samples() {
            match encoding {
                WavEncoding::Pcm16 => {
                    let v = (s * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
                    w.write_sample(v).map_err(map_hound)?;
                }
                WavEncoding::Float32 => w.write_sample(s as f32).map_err(map_hound)?,
            }
        }
        w.finalize().map_err(map_hound)?;
    }
    super::write_atomic(path, &buf.into_inner())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn encode(spec: WavSpec, write: impl FnOnce(&mut WavWriter<&mut Cursor<Vec<u8>>>)) -> Vec<u8> {
        let mut buf = Cursor::new(Vec::new());
        {
            let mut w = WavWriter::new(&mut buf, spec).unwrap();
            write(&mut w);
            w.finalize().unwrap();
        }
        buf.into_inner()
    }

    fn pcm16(channels: u16) -> WavSpec {
        WavSpec {
            channels,
            sample_rate: 22050,
            bits_per_sample: 16,
            sample_format: SampleFormat::Int,
        }
    }

    #[test]
    fn silence_pcm16() {
        let bytes = encode(pcm16(1), |w| {
            for _ in 0..22050 {
                w.write_sample(0i16).unwrap();
            }
        });
        let wf = read_wav_from(Cursor::new(bytes)).unwrap();
        assert_eq!(wf.len(), 22050);
        assert_eq!(wf.sample_rate(), 22050);
        assert!(wf.samples().iter().all(|&s| s == 0.0));
    }

    #[test]
    fn full_scale_scaling() {
        let bytes = encode(pcm16(1), |w| {
            for _ in 0..10 {
                w.write_sample(32767i16).unwrap();
            }
        });
        let wf = read_wav_from(Cursor::new(bytes)).unwrap();
        assert!(wf.samples().iter().all(|&s| s == 32767.0 / 32768.0));
    }

    #[test]
    fn stereo_is_averaged() {
        let spec = WavSpec {
            channels: 2,
            sample_rate: 8000,
            bits_per_sample: 32,
            sample_format: SampleFormat::Float,
        };
        let bytes = encode(spec, |w| {
            for _ in 0..4 {
                w.write_sample(1.0f32).unwrap();
                w.write_sample(0.0f32).unwrap();
            }
        });
        let wf = read_wav_from(Cursor::new(bytes)).unwrap();
        assert_eq!(wf.samples(), &[0.5; 4]);
    }

    #[test]
    fn distinguishes_errors() {
        let spec24 = WavSpec {
            channels: 1,
            sample_rate: 8000,
            bits_per_sample: 24,
            sample_format: SampleFormat::Int,
        };
        let bytes = encode(spec24, |w| w.write_sample(5i32).unwrap());
        assert!(matches!(
            read_wav_from(Cursor::new(bytes)),
            Err(Error::UnsupportedWav(_))
        ));

        assert!(matches!(
            read_wav_from(Cursor::new(b"RIFX\0\0\0\0WAVEjunk".to_vec())),
            Err(Error::MalformedWav(_))
        ));
        let mut good = encode(pcm16(1), |w| {
            for _ in 0..100 {
                w.write_sample(1i16).unwrap();
            }
        });
        good.truncate(60);
        let r = read_wav_from(Cursor::new(good));
        assert!(matches!(r, Err(Error::MalformedWav(_))), "{r:?}");
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let wf = Waveform::new(vec![0.25, -0.5, 1.5, 0.0], 16000).unwrap();
        let path = dir.path().join("a.wav");
        write_wav(&wf, &path, WavEncoding::Float32).unwrap();
        assert_eq!(read_wav(&path).unwrap(), wf);

        write_wav(&wf, &path, WavEncoding::Pcm16).unwrap();
        let back = read_wav(&path).unwrap();
        assert_eq!(back.samples()[0], 0.25);
        assert_eq!(back.samples()[2], 32767.0 / 32768.0);
    }
}
