use std::path::PathBuf;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid note: {0}")]
    InvalidNote(String),

    #[error("notes are not sorted by onset at index {index}")]
    UnsortedNotes { index: usize },

    #[error("notes overlap at index {index}: offset {offset_s} s is after next onset {next_onset_s} s")]
    NotMonophonic {
        index: usize,
        offset_s: f64,
        next_onset_s: f64,
    },

    #[error("frame {frame} is out of range for a grid of {n_frames} frames")]
    FrameOutOfRange { frame: usize, n_frames: usize },

    #[error("class index {class} is beyond the dummy class {dummy}")]
    ClassOutOfRange { class: usize, dummy: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("signal is empty")]
    EmptySignal,

    #[error("signal contains a non-finite sample at index {0}")]
    NonFiniteSample(usize),

    #[error("highest analysis frequency {highest_hz:.2} Hz is not below Nyquist {nyquist_hz:.2} Hz")]
    NyquistViolation { highest_hz: f64, nyquist_hz: f64 },

    #[error("harmonic must be positive and finite, got {0}")]
    InvalidHarmonic(f64),

    #[error("no note class has its fundamental inside the analysed frequency range")]
    NoBinOverlap,

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("non-finite logit at class {class}, frame {frame}")]
    NonFiniteLogit { class: usize, frame: usize },

    #[error("malformed affinity matrix: {0}")]
    MalformedAffinity(String),

    #[error("affinity matrix has no frames")]
    NoFrames,

    #[error("path violates decoding constraints at frame {frame}: {reason}")]
    InvalidPath { frame: usize, reason: &'static str },

    #[error("corpus has {refs} references but {ests} estimates")]
    MismatchedCorpus { refs: usize, ests: usize },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },

    #[error("unsupported WAV encoding: {0}")]
    UnsupportedWav(String),

    #[error("malformed WAV file: {0}")]
    MalformedWav(String),

    #[error("malformed MIDI file: {0}")]
    MalformedMidi(String),

    #[error("note-on for pitch {pitch} at {at_s:.4} s is never released")]
    UnmatchedNoteOn { pitch: u8, at_s: f64 },

    #[error("polyphonic overlap: pitch {pitch} starts at {at_s:.4} s while another note sounds")]
    PolyphonicOverlap { pitch: u8, at_s: f64 },

    #[error("note {index} is shorter than one MIDI tick")]
    NoteTooShort { index: usize },

    #[error("not an AFF1 file")]
    NotAff1,

    #[error("unsupported AFF1 version {0}")]
    UnsupportedAff1Version(u32),

    #[error("truncated AFF1 payload: expected {expected} bytes, found {found}")]
    TruncatedAff1 { expected: u64, found: u64 },

    #[error("AFF1 dimensions {classes} x {frames} overflow")]
    Aff1SizeOverflow { classes: u32, frames: u32 },

    #[error("AFF1 file has {0} unexpected trailing bytes")]
    Aff1TrailingBytes(u64),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("malformed annotation line {line}: {reason}")]
    MalformedAnnotation { line: usize, reason: String },
}

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Reading, writing or decoding a file failed.
    Format,
    /// Inputs or configuration violate an operation's preconditions.
    Precondition,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            File { source, .. } => source.kind(),
            Io(_)
            | UnsupportedWav(_)
            | MalformedWav(_)
            | MalformedMidi(_)
            | UnmatchedNoteOn { .. }
            | PolyphonicOverlap { .. }
            | NotAff1
            | UnsupportedAff1Version(_)
            | TruncatedAff1 { .. }
            | Aff1SizeOverflow { .. }
            | Aff1TrailingBytes(_)
            | Json(_)
            | MalformedAnnotation { .. }
            | MalformedAffinity(_) => ErrorKind::Format,
            _ => ErrorKind::Precondition,
        }
    }

    /// Attach the path of the file being processed.
    pub fn at(self, path: impl Into<PathBuf>) -> Self {
        Error::File {
            path: path.into(),
            source: Box::new(self),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
