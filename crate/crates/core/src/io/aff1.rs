//! AFF1: a little-endian container for log-affinity matrices.
//!
//! Header (36 bytes): magic `AFF1`, u32 version, u32 classes, u32 frames,
//! f32 hop seconds, f32 first-frame time, u32 lowest MIDI pitch, 8 reserved
//! zero bytes. The payload is `classes * frames` f32 values, row-major by
//! class, with the silence class last.

use std::path::Path;

use crate::error::{Error, Result};
use crate::salience::AffinityMatrix;
use crate::types::{FrameGrid, NoteClassMap};

pub const AFF1_MAGIC: [u8; 4] = *b"AFF1";
pub const AFF1_VERSION: u32 = 1;
pub const AFF1_HEADER_LEN: usize = 36;

pub fn encode_affinity(aff: &AffinityMatrix) -> Vec<u8> {
    let values = aff.values();
    let mut out = Vec::with_capacity(AFF1_HEADER_LEN + 4 * values.len());
    out.extend_from_slice(&AFF1_MAGIC);
    out.extend_from_slice(&AFF1_VERSION.to_le_bytes());
    out.extend_from_slice(&(aff.n_classes() as u32).to_le_bytes());
    out.extend_from_slice(&(aff.n_frames() as u32).to_le_bytes());
    out.extend_from_slice(&(aff.grid().hop_s() as f32).to_le_bytes());
    out.extend_from_slice(&(aff.grid().t0_s() as f32).to_le_bytes());
    out.extend_from_slice(&(aff.class_map().lowest_midi() as u32).to_le_bytes());
    out.extend_from_slice(&[0u8; 8]);
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

fn u32_at(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4 bytes"))
}

fn f32_at(bytes: &[u8], at: usize) -> f32 {
    f32::from_le_bytes(bytes[at..at + 4].try_into().expect("4 bytes"))
}

pub fn decode_affinity(bytes: &[u8]) -> Result<AffinityMatrix> {
    if bytes.len() < 4 || bytes[..4] != AFF1_MAGIC {
        return Err(Error::NotAff1);
    }
    if bytes.len() < AFF1_HEADER_LEN {
        return Err(Error::TruncatedAff1 {
            expected: AFF1_HEADER_LEN as u64,
            found: bytes.len() as u64,
        });
    }
    let version = u32_at(bytes, 4);
    if version != AFF1_VERSION {
        return Err(Error::UnsupportedAff1Version(version));
    }
    let classes = u32_at(bytes, 8);
    let frames = u32_at(bytes, 12);
    let hop = f32_at(bytes, 16);
    let t0 = f32_at(bytes, 20);
    let lowest = u32_at(bytes, 24);

    let payload = (classes as u64)
        .checked_mul(frames as u64)
        .and_then(|n| n.checked_mul(4))
        .and_then(|n| n.checked_add(AFF1_HEADER_LEN as u64))
        .filter(|&n| usize::try_from(n).is_ok())
        .ok_or(Error::Aff1SizeOverflow { classes, frames })?;
    let found = bytes.len() as u64;
    if found < payload {
        return Err(Error::TruncatedAff1 {
            expected: payload,
            found,
        });
    }
    if found > payload {
        return Err(Error::Aff1TrailingBytes(found - payload));
    }
    if classes < 2 {
        return Err(Error::MalformedAffinity(format!(
            "{classes} classes, need at least one pitch and silence"
        )));
    }
    let lowest = u8::try_from(lowest)
        .map_err(|_| Error::MalformedAffinity(format!("lowest MIDI pitch {lowest} out of range")))?;
    let class_map =
        NoteClassMap::new(classes as usize - 1, lowest).map_err(|e| Error::MalformedAffinity(e.to_string()))?;
    let grid =
        FrameGrid::new(hop as f64, frames as usize, t0 as f64).map_err(|e| Error::MalformedAffinity(e.to_string()))?;
    let values = bytes[AFF1_HEADER_LEN..]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")))
        .collect();
    AffinityMatrix::new(values, class_map, grid).map_err(|e| match e {
        Error::NoFrames => Error::NoFrames,
        other => Error::MalformedAffinity(other.to_string()),
    })
}

pub fn read_affinity(path: &Path) -> Result<AffinityMatrix> {
    let bytes = super::read_file(path)?;
    decode_affinity(&bytes).map_err(|e| e.at(path))
}

pub fn write_affinity(aff: &AffinityMatrix, path: &Path) -> Result<()> {
    super::write_atomic(path, &encode_affinity(aff))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(l: usize, t: usize, lowest: u8) -> AffinityMatrix {
        let values = (0..l * t).map(|i| -(i as f32) * 0.37 - 0.1).collect();
        AffinityMatrix::new(
            values,
            NoteClassMap::new(l - 1, lowest).unwrap(),
            FrameGrid::new(256.0 / 22050.0, t, 0.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn minimal_file_is_44_bytes() {
        let aff = matrix(2, 1, 60);
        let bytes = encode_affinity(&aff);
        assert_eq!(bytes.len(), 44);
        assert_eq!(&bytes[..4], b"AFF1");
        assert_eq!(&bytes[28..36], &[0u8; 8]);
        let back = decode_affinity(&bytes).unwrap();
        assert_eq!(back.values(), aff.values());
        assert_eq!(back.class_map(), aff.class_map());
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let aff = matrix(89, 37, 21);
        let bytes = encode_affinity(&aff);
        let back = decode_affinity(&bytes).unwrap();
        assert_eq!(encode_affinity(&back), bytes);
        assert!(back
            .values()
            .iter()
            .zip(aff.values())
            .all(|(a, b)| a.to_bits() == b.to_bits()));
    }

    #[test]
    fn neg_infinity_survives() {
        let mut values = vec![-1.0f32; 6];
        values[0] = f32::NEG_INFINITY;
        let aff = AffinityMatrix::new(
            values,
            NoteClassMap::new(2, 60).unwrap(),
            FrameGrid::new(0.01, 2, 0.0).unwrap(),
        )
        .unwrap();
        let back = decode_affinity(&encode_affinity(&aff)).unwrap();
        assert_eq!(back.get(0, 0), f32::NEG_INFINITY);
    }

    #[test]
    fn header_errors() {
        let good = encode_affinity(&matrix(3, 4, 40));
        assert!(matches!(decode_affinity(b"RIFF1234"), Err(Error::NotAff1)));
        assert!(matches!(decode_affinity(&good[..20]), Err(Error::TruncatedAff1 { .. })));

        let mut v2 = good.clone();
        v2[4] = 2;
        assert!(matches!(decode_affinity(&v2), Err(Error::UnsupportedAff1Version(2))));

        assert!(matches!(
            decode_affinity(&good[..good.len() - 1]),
            Err(Error::TruncatedAff1 { .. })
        ));
        let mut long = good.clone();
        long.extend_from_slice(&[0, 0, 0, 0]);
        assert!(matches!(decode_affinity(&long), Err(Error::Aff1TrailingBytes(4))));

        let mut huge = good.clone();
        huge[8..12].copy_from_slice(&u32::MAX.to_le_bytes());
        huge[12..16].copy_from_slice(&u32::MAX.to_le_bytes());
        assert!(matches!(
            decode_affinity(&huge),
            Err(Error::Aff1SizeOverflow { .. }) | Err(Error::TruncatedAff1 { .. })
        ));

        let mut nan = good.clone();
        nan[AFF1_HEADER_LEN..AFF1_HEADER_LEN + 4].copy_from_slice(&f32::NAN.to_le_bytes());
        assert!(matches!(decode_affinity(&nan), Err(Error::MalformedAffinity(_))));
    }

    #[test]
    fn zero_frames_is_no_frames() {
        let mut bytes = encode_affinity(&matrix(2, 1, 60));
        bytes[12..16].copy_from_slice(&0u32.to_le_bytes());
        bytes.truncate(AFF1_HEADER_LEN);
        assert!(matches!(decode_affinity(&bytes), Err(Error::NoFrames)));
    }
}
