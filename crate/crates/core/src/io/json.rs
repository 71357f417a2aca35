use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::types::{NoteEvent, NoteSequence};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonNote {
    onset: f64,
    offset: f64,
    midi: u8,
}

/// `[{"onset": s, "offset": s, "midi": p}, ...]`; an empty sequence is `[]`.
pub fn notes_to_json(seq: &NoteSequence) -> String {
    let notes: Vec<JsonNote> = seq
        .iter()
        .map(|n| JsonNote {
            onset: n.onset(),
            offset: n.offset(),
            midi: n.pitch(),
        })
        .collect();
    serde_json::to_string_pretty(&notes).expect("plain data serializes")
}

pub fn notes_from_json(text: &str, source_id: &str) -> Result<NoteSequence> {
    let notes: Vec<JsonNote> = serde_json::from_str(text)?;
    let events = notes
        .into_iter()
        .map(|n| NoteEvent::new(n.onset, n.offset, n.midi))
        .collect::<Result<Vec<_>>>()?;
    NoteSequence::new(events, source_id)
}

pub fn read_notes_json(path: &Path) -> Result<NoteSequence> {
    let bytes = super::read_file(path)?;
    let text = String::from_utf8_lossy(&bytes);
    notes_from_json(&text, &super::stem(path)).map_err(|e| e.at(path))
}

pub fn write_notes_json(seq: &NoteSequence, path: &Path) -> Result<()> {
    let mut text = notes_to_json(seq);
    text.push('\n');
    super::write_atomic(path, text.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn empty_is_bracket_pair() {
        assert_eq!(notes_to_json(&NoteSequence::empty("x")), "[]");
        assert!(notes_from_json("[]", "x").unwrap().is_empty());
    }

    #[test]
    fn exact_round_trip() {
        let seq = NoteSequence::new(
            vec![
                NoteEvent::new(0.1 + 0.2, 0.7, 60).unwrap(),
                NoteEvent::new(0.7, 1.0 / 3.0 + 1.0, 127).unwrap(),
            ],
            "x",
        )
        .unwrap();
        let back = notes_from_json(&notes_to_json(&seq), "x").unwrap();
        assert_eq!(back, seq);
    }

    #[test]
    fn invalid_content() {
        assert!(matches!(notes_from_json("{", "x"), Err(Error::Json(_))));
        assert!(matches!(
            notes_from_json(r#"[{"onset":0.5,"offset":0.2,"midi":60}]"#, "x"),
            Err(Error::InvalidNote(_))
        ));
        assert!(matches!(
            notes_from_json(
                r#"[{"onset":0,"offset":1,"midi":60},{"onset":0.5,"offset":2,"midi":62}]"#,
                "x"
            ),
            Err(Error::NotMonophonic { .. })
        ));
        assert!(notes_from_json(r#"[{"onset":0,"offset":1,"midi":300}]"#, "x").is_err());
    }
}
