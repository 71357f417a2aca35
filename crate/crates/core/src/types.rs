//! Shared domain types: notes, note sequences, class indexing and frame grids.

use crate::error::{Error, Result};

/// A pitched interval on the piano roll.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoteEvent {
    onset_s: f64,
    offset_s: f64,
    pitch: u8,
}

impl NoteEvent {
    pub fn new(onset_s: f64, offset_s: f64, pitch: u8) -> Result<Self> {
        if !onset_s.is_finite() || !offset_s.is_finite() {
            return Err(Error::InvalidNote(format!("non-finite times ({onset_s}, {offset_s})")));
        }
        if onset_s < 0.0 {
            return Err(Error::InvalidNote(format!("negative onset {onset_s}")));
        }
        if onset_s >= offset_s {
            return Err(Error::InvalidNote(format!(
                "onset {onset_s} is not before offset {offset_s}"
            )));
        }
        if pitch > 127 {
            return Err(Error::InvalidNote(format!("MIDI pitch {pitch} above 127")));
        }
        Ok(NoteEvent {
            onset_s,
            offset_s,
            pitch,
        })
    }

    pub fn onset(&self) -> f64 {
        self.onset_s
    }

    pub fn offset(&self) -> f64 {
        self.offset_s
    }

    pub fn pitch(&self) -> u8 {
        self.pitch
    }

    pub fn duration(&self) -> f64 {
        self.offset_s - self.onset_s
    }
}

/// An ordered, monophonic list of notes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NoteSequence {
    notes: Vec<NoteEvent>,
    source_id: String,
}

impl NoteSequence {
    /// Builds a sequence, rejecting unsorted or overlapping notes.
    pub fn new(notes: Vec<NoteEvent>, source_id: impl Into<String>) -> Result<Self> {
        for (index, pair) in notes.windows(2).enumerate() {
            let (a, b) = (&pair[0], &pair[1]);
            if b.onset_s < a.onset_s {
                return Err(Error::UnsortedNotes { index: index + 1 });
            }
            if a.offset_s > b.onset_s {
                return Err(Error::NotMonophonic {
                    index,
                    offset_s: a.offset_s,
                    next_onset_s: b.onset_s,
                });
            }
        }
        Ok(NoteSequence {
            notes,
            source_id: source_id.into(),
        })
    }

    pub fn empty(source_id: impl Into<String>) -> Self {
        NoteSequence {
            notes: Vec::new(),
            source_id: source_id.into(),
        }
    }

    pub fn notes(&self) -> &[NoteEvent] {
        &self.notes
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    pub fn with_source_id(mut self, source_id: impl Into<String>) -> Self {
        self.source_id = source_id.into();
        self
    }

    pub fn len(&self) -> usize {
        self.notes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.notes.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, NoteEvent> {
        self.notes.iter()
    }

    /// End time of the last note, or 0 for an empty sequence.
    pub fn end_time(&self) -> f64 {
        self.notes.last().map_or(0.0, |n| n.offset_s)
    }
}

impl<'a> IntoIterator for &'a NoteSequence {
    type Item = &'a NoteEvent;
    type IntoIter = std::slice::Iter<'a, NoteEvent>;

    fn into_iter(self) -> Self::IntoIter {
        self.notes.iter()
    }
}

/// What a class index stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoteClass {
    Pitch(u8),
    Silence,
}

/// Maps class indices `0..n_pitch_classes` onto consecutive MIDI pitches and
/// reserves the last index for the silence/boundary class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoteClassMap {
    n_pitch_classes: usize,
    lowest_midi: u8,
}

impl Default for NoteClassMap {
    /// 88 piano keys (MIDI 21..=108) plus the dummy class at index 88.
    fn default() -> Self {
        NoteClassMap {
            n_pitch_classes: 88,
            lowest_midi: 21,
        }
    }
}

impl NoteClassMap {
    pub fn new(n_pitch_classes: usize, lowest_midi: u8) -> Result<Self> {
        if n_pitch_classes == 0 {
            return Err(Error::InvalidConfig(
                "class map needs at least one pitched class".into(),
            ));
        }
        if lowest_midi as usize + n_pitch_classes - 1 > 127 {
            return Err(Error::InvalidConfig(format!(
                "{n_pitch_classes} classes from MIDI {lowest_midi} exceed MIDI 127"
            )));
        }
        Ok(NoteClassMap {
            n_pitch_classes,
            lowest_midi,
        })
    }

    pub fn n_pitch_classes(&self) -> usize {
        self.n_pitch_classes
    }

    pub fn lowest_midi(&self) -> u8 {
        self.lowest_midi
    }

    pub fn dummy_index(&self) -> usize {
        self.n_pitch_classes
    }

    /// Total number of classes `L`, dummy included.
    pub fn n_classes(&self) -> usize {
        self.n_pitch_classes + 1
    }

    pub fn class_to_midi(&self, class: usize) -> Result<NoteClass> {
        match class.cmp(&self.dummy_index()) {
            std::cmp::Ordering::Less => Ok(NoteClass::Pitch(self.lowest_midi + class as u8)),
            std::cmp::Ordering::Equal => Ok(NoteClass::Silence),
            std::cmp::Ordering::Greater => Err(Error::ClassOutOfRange {
                class,
                dummy: self.dummy_index(),
            }),
        }
    }

    pub fn midi_to_class(&self, midi: u8) -> Option<usize> {
        let c = (midi as usize).checked_sub(self.lowest_midi as usize)?;
        (c < self.n_pitch_classes).then_some(c)
    }
}

/// Affine frame-index to time map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameGrid {
    hop_s: f64,
    n_frames: usize,
    t0_s: f64,
}

impl FrameGrid {
    pub fn new(hop_s: f64, n_frames: usize, t0_s: f64) -> Result<Self> {
        if !(hop_s > 0.0 && hop_s.is_finite()) {
            return Err(Error::InvalidConfig(format!("hop must be positive, got {hop_s}")));
        }
        if !t0_s.is_finite() {
            return Err(Error::InvalidConfig(format!("frame origin must be finite, got {t0_s}")));
        }
        Ok(FrameGrid { hop_s, n_frames, t0_s })
    }

    pub fn hop_s(&self) -> f64 {
        self.hop_s
    }

    pub fn n_frames(&self) -> usize {
        self.n_frames
    }

    pub fn t0_s(&self) -> f64 {
        self.t0_s
    }

    pub fn frame_to_time(&self, t: usize) -> Result<f64> {
        if t >= self.n_frames {
            return Err(Error::FrameOutOfRange {
                frame: t,
                n_frames: self.n_frames,
            });
        }
        Ok(self.time_unchecked(t))
    }

    /// The affine map without the range check; `t == n_frames` is the end of the grid.
    pub(crate) fn time_unchecked(&self, t: usize) -> f64 {
        self.t0_s + t as f64 * self.hop_s
    }
}
