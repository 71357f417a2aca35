//! File formats: WAV audio, MIDI and JSON note lists, annotation text files,
//! and the AFF1 affinity-matrix container.

mod aff1;
mod annotations;
mod json;
mod midi;
mod wav;

pub use aff1::{
    decode_affinity, encode_affinity, read_affinity, write_affinity, AFF1_HEADER_LEN, AFF1_MAGIC, AFF1_VERSION,
};
pub use annotations::{format_annotations, parse_annotations, read_annotations, write_annotations, AnnotationUnits};
pub use json::{notes_from_json, notes_to_json, read_notes_json, write_notes_json};
pub use midi::{midi_bytes, notes_from_midi_bytes, read_midi_notes, write_midi_notes, PPQ};
pub use wav::{read_wav, read_wav_from, write_wav, WavEncoding};

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::types::NoteSequence;

/// Writes through a temporary file in the destination directory and renames
/// it into place, so a failed write never leaves a partial file behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let run = || -> Result<()> {
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        tmp.write_all(bytes)?;
        tmp.as_file().sync_all()?;
        tmp.persist(path).map_err(|e| Error::Io(e.error))?;
        Ok(())
    };
    run().map_err(|e| e.at(path))
}

/// File stem used as a sequence identifier.
pub(crate) fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Reads notes from a `.mid`/`.midi` or `.json` file, picked by extension.
pub fn read_notes(path: &Path) -> Result<NoteSequence> {
    match path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .as_deref()
    {
        Some("json") => read_notes_json(path),
        Some("mid") | Some("midi") => read_midi_notes(path),
        _ => Err(Error::InvalidConfig(format!(
            "{}: expected a .mid, .midi or .json note file",
            path.display()
        ))),
    }
}

/// Writes notes as MIDI or JSON depending on the extension.
pub fn write_notes(seq: &NoteSequence, path: &Path) -> Result<()> {
    match path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .as_deref()
    {
        Some("json") => write_notes_json(seq, path),
        Some("mid") | Some("midi") => write_midi_notes(seq, path),
        _ => Err(Error::InvalidConfig(format!(
            "{}: expected a .mid, .midi or .json output path",
            path.display()
        ))),
    }
}

pub(crate) fn read_file(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::Io(e).at(path))
}
