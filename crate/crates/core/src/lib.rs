//! Monophonic hum transcription: envelope-based annotation correction, a
//! constant-Q salience front end, constrained dynamic-programming decoding,
//! note-level evaluation and the file formats that connect them.

pub mod annotate;
pub mod decode;
pub mod dsp;
pub mod error;
pub mod eval;
pub mod io;
pub mod pipeline;
pub mod salience;
pub mod synth;
pub mod types;

pub use decode::{decode, DecodeConfig, Path};
pub use dsp::{CqtParams, Waveform};
pub use error::{Error, ErrorKind, Result};
pub use eval::{EvalConfig, EvalReport};
pub use pipeline::{features, transcribe, FeatureConfig};
pub use salience::AffinityMatrix;
pub use types::{FrameGrid, NoteClass, NoteClassMap, NoteEvent, NoteSequence};
