//! Constrained dynamic-programming decoding of an affinity matrix into notes.
//!
//! A valid path assigns one class per frame, starts and ends on the dummy
//! (silence) class, and can only leave a pitched class by going back to the
//! dummy class. So two notes are always separated by at least one silent
//! frame. The decoder finds the highest-scoring valid path, removes runs that
//! are too short to be notes, and reads notes off the remaining runs.

use crate::error::{Error, Result};
use crate::salience::AffinityMatrix;
use crate::types::{FrameGrid, NoteClass, NoteClassMap, NoteEvent, NoteSequence};

/// One class index per frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    classes: Vec<usize>,
    dummy: usize,
}

/// A maximal stretch of frames `start..=end` assigned to one class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Run {
    pub class: usize,
    pub start: usize,
    pub end: usize,
}

impl Run {
    pub fn n_frames(&self) -> usize {
        self.end - self.start + 1
    }
}

/// Checks the three path constraints.
pub fn validate_path(classes: &[usize], dummy: usize) -> Result<()> {
    let (Some(&first), Some(&last)) = (classes.first(), classes.last()) else {
        return Err(Error::InvalidPath {
            frame: 0,
            reason: "path is empty",
        });
    };
    if first != dummy {
        return Err(Error::InvalidPath {
            frame: 0,
            reason: "path must start on the dummy class",
        });
    }
    if last != dummy {
        return Err(Error::InvalidPath {
            frame: classes.len() - 1,
            reason: "path must end on the dummy class",
        });
    }
    for (t, w) in classes.windows(2).enumerate() {
        if w[0] > dummy || w[1] > dummy {
            return Err(Error::InvalidPath {
                frame: t,
                reason: "class index beyond dummy",
            });
        }
        if w[0] != dummy && w[1] != w[0] && w[1] != dummy {
            return Err(Error::InvalidPath {
                frame: t + 1,
                reason: "pitched class must continue or return to dummy",
            });
        }
    }
    Ok(())
}

impl Path {
    pub fn new(classes: Vec<usize>, dummy: usize) -> Result<Self> {
        validate_path(&classes, dummy)?;
        Ok(Path { classes, dummy })
    }

    pub fn classes(&self) -> &[usize] {
        &self.classes
    }

    pub fn dummy(&self) -> usize {
        self.dummy
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// `(frame, class)` pairs in frame order.
    pub fn points(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.classes.iter().copied().enumerate()
    }

    /// Maximal runs of pitched classes, in frame order.
    pub fn pitched_runs(&self) -> Vec<Run> {
        let mut runs = Vec::new();
        let mut t = 0;
        while t < self.classes.len() {
            let class = self.classes[t];
            let start = t;
            while t < self.classes.len() && self.classes[t] == class {
                t += 1;
            }
            if class != self.dummy {
                runs.push(Run {
                    class,
                    start,
                    end: t - 1,
                });
            }
        }
        runs
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeConfig {
    /// Pitched runs shorter than this many frames are turned into silence.
    pub min_note_frames: usize,
    /// When set, split the matrix inside every stretch of at least this many
    /// frames whose best class is the dummy, and decode the pieces separately.
    /// Bounds memory on long recordings.
    pub chunk_silence_frames: Option<usize>,
}

impl Default for DecodeConfig {
    fn default() -> Self {
        DecodeConfig {
            min_note_frames: 5,
            chunk_silence_frames: None,
        }
    }
}

impl DecodeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_note_frames == 0 {
            return Err(Error::InvalidConfig(
                "minimum note length must be at least one frame".into(),
            ));
        }
        if self.chunk_silence_frames == Some(0) {
            return Err(Error::InvalidConfig(
                "chunking silence length must be at least one frame".into(),
            ));
        }
        Ok(())
    }
}

/// Highest-scoring valid path and its score.
///
/// `score[r][t] = max(score[r][t-1], score[dummy][t-1]) + aff[r][t]` for
/// pitched rows and `score[dummy][t] = max_r score[r][t-1] + aff[dummy][t]`,
/// starting from `score[dummy][0] = 0` with every other row at `-inf`. The
/// affinity of frame 0 never enters the score. On ties a pitched row keeps its
/// own predecessor and the dummy row takes the lowest-index predecessor.
pub fn best_valid_path(aff: &AffinityMatrix) -> Result<(Path, f64)> {
    let (l, t_len) = (aff.n_classes(), aff.n_frames());
    if t_len == 0 {
        return Err(Error::NoFrames);
    }
    if l < 2 {
        return Err(Error::MalformedAffinity(
            "need at least one pitched class and the dummy".into(),
        ));
    }
    let dummy = l - 1;

    let mut prev = vec![f64::NEG_INFINITY; l];
    prev[dummy] = 0.0;
    let mut next = vec![0.0; l];
    // Backpointers: pitched rows only ever come from themselves or the dummy.
    let mut from_dummy = vec![false; dummy * t_len];
    let mut dummy_pred = vec![0usize; t_len];

    for t in 1..t_len {
        let stay_dummy = prev[dummy];
        for r in 0..dummy {
            let same = prev[r];
            let (best, enter) = if same >= stay_dummy {
                (same, false)
            } else {
                (stay_dummy, true)
            };
            next[r] = best + f64::from(aff.get(r, t));
            from_dummy[r * t_len + t] = enter;
        }
        let mut arg = 0;
        for r in 1..l {
            if prev[r] > prev[arg] {
                arg = r;
            }
        }
        next[dummy] = prev[arg] + f64::from(aff.get(dummy, t));
        dummy_pred[t] = arg;
        std::mem::swap(&mut prev, &mut next);
    }
    let score = prev[dummy];

    let mut classes = vec![dummy; t_len];
    let mut current = dummy;
    for t in (1..t_len).rev() {
        classes[t] = current;
        current = if current == dummy {
            dummy_pred[t]
        } else if from_dummy[current * t_len + t] {
            dummy
        } else {
            current
        };
    }
    classes[0] = current;
    debug_assert_eq!(current, dummy);
    Ok((Path::new(classes, dummy)?, score))
}

/// Replaces every pitched run shorter than `min_note_frames` with the dummy class.
pub fn clean_path(path: &Path, cfg: &DecodeConfig) -> Path {
    let mut classes = path.classes.clone();
    for run in path.pitched_runs() {
        if run.n_frames() < cfg.min_note_frames {
            classes[run.start..=run.end].fill(path.dummy);
        }
    }
    Path {
        classes,
        dummy: path.dummy,
    }
}

/// Each pitched run `start..=end` becomes a note from `time(start)` to `time(end + 1)`.
pub fn path_to_notes(path: &Path, class_map: &NoteClassMap, grid: &FrameGrid) -> Result<NoteSequence> {
    if path.dummy != class_map.dummy_index() {
        return Err(Error::ShapeMismatch(format!(
            "path dummy {} does not match class map dummy {}",
            path.dummy,
            class_map.dummy_index()
        )));
    }
    let notes = path
        .pitched_runs()
        .into_iter()
        .map(|run| {
            let NoteClass::Pitch(midi) = class_map.class_to_midi(run.class)? else {
                unreachable!("pitched runs never carry the dummy class")
            };
            NoteEvent::new(grid.time_unchecked(run.start), grid.time_unchecked(run.end + 1), midi)
        })
        .collect::<Result<Vec<_>>>()?;
    NoteSequence::new(notes, "")
}

/// `best_valid_path`, then `clean_path`, then `path_to_notes`.
pub fn decode(aff: &AffinityMatrix, cfg: &DecodeConfig) -> Result<NoteSequence> {
    cfg.validate()?;
    match cfg.chunk_silence_frames {
        Some(min_gap) => decode_chunked(aff, cfg, min_gap),
        None => decode_whole(aff, cfg),
    }
}

fn decode_whole(aff: &AffinityMatrix, cfg: &DecodeConfig) -> Result<NoteSequence> {
    let (path, _) = best_valid_path(aff)?;
    let cleaned = clean_path(&path, cfg);
    path_to_notes(&cleaned, aff.class_map(), aff.grid())
}

fn decode_chunked(aff: &AffinityMatrix, cfg: &DecodeConfig, min_gap: usize) -> Result<NoteSequence> {
    let t_len = aff.n_frames();
    let dummy = aff.dummy();
    let mut cuts = vec![0];
    let mut t = 0;
    while t < t_len {
        if aff.argmax(t) != dummy {
            t += 1;
            continue;
        }
        let start = t;
        while t < t_len && aff.argmax(t) == dummy {
            t += 1;
        }
        if t - start >= min_gap && start > 0 && t < t_len {
            cuts.push((start + t) / 2);
        }
    }
    cuts.push(t_len);

    let mut notes = Vec::new();
    for w in cuts.windows(2) {
        let piece = aff.slice_frames(w[0], w[1])?;
        notes.extend(decode_whole(&piece, cfg)?.notes().iter().copied());
    }
    NoteSequence::new(notes, "")
}
