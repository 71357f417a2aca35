use std::path::Path;

use midly::num::{u15, u24, u28, u4, u7};
use midly::{Format, Header, MetaMessage, MidiMessage, Smf, Timing, TrackEvent, TrackEventKind};

use crate::error::{Error, Result};
use crate::types::{NoteEvent, NoteSequence};

/// Ticks per quarter note used when writing.
pub const PPQ: u16 = 480;
const WRITE_TEMPO_US: u32 = 500_000;
const DEFAULT_TEMPO_US: u32 = 500_000;
const WRITE_VELOCITY: u8 = 100;

#[derive(Debug, Clone, Copy)]
struct RawNote {
    tick: u64,
    on: bool,
    key: u8,
    seq: usize,
}

/// Converts absolute ticks to seconds under a tempo map.
struct TickClock {
    /// `(tick, seconds at tick, seconds per tick from there on)`
    segments: Vec<(u64, f64, f64)>,
}

impl TickClock {
    fn new(timing: Timing, mut tempos: Vec<(u64, u32)>) -> Result<Self> {
        match timing {
            Timing::Metrical(tpq) => {
                let tpq = tpq.as_int();
                if tpq == 0 {
                    return Err(Error::MalformedMidi("zero ticks per quarter note".into()));
                }
                tempos.sort_by_key(|&(t, _)| t);
                let per_tick = |us: u32| us as f64 * 1e-6 / tpq as f64;
                let mut segments = vec![(0u64, 0.0, per_tick(DEFAULT_TEMPO_US))];
                for (tick, us) in tempos {
                    let &(t0, s0, rate) = segments.last().expect("non-empty");
                    let start = s0 + (tick - t0) as f64 * rate;
                    if tick == t0 {
                        segments.pop();
                    }
                    segments.push((tick, start, per_tick(us)));
                }
                Ok(Self { segments })
            }
            Timing::Timecode(fps, sub) => {
                if sub == 0 {
                    return Err(Error::MalformedMidi("zero ticks per SMPTE frame".into()));
                }
                let rate = 1.0 / (fps.as_f32() as f64 * sub as f64);
                Ok(Self {
                    segments: vec![(0, 0.0, rate)],
                })
            }
        }
    }

    fn seconds(&self, tick: u64) -> f64 {
        let i = self.segments.partition_point(|&(t, _, _)| t <= tick) - 1;
        let (t0, s0, rate) = self.segments[i];
        s0 + (tick - t0) as f64 * rate
    }
}

/// Parses a standard MIDI file into a monophonic note sequence. All tracks
/// and channels are merged; a note-on with velocity 0 counts as a note-off.
pub fn notes_from_midi_bytes(bytes: &[u8], source_id: &str) -> Result<NoteSequence> {
    let smf = Smf::parse(bytes).map_err(|e| Error::MalformedMidi(e.to_string()))?;
    if smf.header.format == Format::Sequential {
        return Err(Error::MalformedMidi("format 2 files are not supported".into()));
    }
    let mut tempos = Vec::new();
    let mut raw = Vec::new();
    for track in &smf.tracks {
        let mut tick = 0u64;
        for ev in track {
            tick += ev.delta.as_int() as u64;
            match ev.kind {
                TrackEventKind::Meta(MetaMessage::Tempo(us)) => tempos.push((tick, us.as_int())),
                TrackEventKind::Midi { message, .. } => {
                    let (on, key) = match message {
                        MidiMessage::NoteOn { key, vel } => (vel.as_int() > 0, key.as_int()),
                        MidiMessage::NoteOff { key, .. } => (false, key.as_int()),
                        _ => continue,
                    };
                    raw.push(RawNote {
                        tick,
                        on,
                        key,
                        seq: raw.len(),
                    });
                }
                _ => {}
            }
        }
    }
    let clock = TickClock::new(smf.header.timing, tempos)?;
    // releases sort ahead of attacks on the same tick so legato notes pair up
    raw.sort_by_key(|n| (n.tick, n.on, n.seq));

    let mut notes = Vec::new();
    let mut active: Option<(u8, u64)> = None;
    for n in raw {
        match (n.on, active) {
            (true, None) => active = Some((n.key, n.tick)),
            (true, Some(_)) => {
                return Err(Error::PolyphonicOverlap {
                    pitch: n.key,
                    at_s: clock.seconds(n.tick),
                });
            }
            (false, Some((key, start))) if key == n.key => {
                if n.tick > start {
                    notes.push(NoteEvent::new(clock.seconds(start), clock.seconds(n.tick), key)?);
                }
                active = None;
            }
            // stray releases carry no information
            (false, _) => {}
        }
    }
    if let Some((pitch, start)) = active {
        return Err(Error::UnmatchedNoteOn {
            pitch,
            at_s: clock.seconds(start),
        });
    }
    NoteSequence::new(notes, source_id)
}

pub fn read_midi_notes(path: &Path) -> Result<NoteSequence> {
    let bytes = super::read_file(path)?;
    notes_from_midi_bytes(&bytes, &super::stem(path)).map_err(|e| e.at(path))
}

fn to_tick(s: f64) -> u64 {
    let ticks_per_s = PPQ as f64 * 1e6 / WRITE_TEMPO_US as f64;
    (s * ticks_per_s).round() as u64
}

/// Encodes notes as a single-track file at 480 PPQ and 120 BPM.
pub fn midi_bytes(seq: &NoteSequence) -> Result<Vec<u8>> {
    let mut events = vec![TrackEvent {
        delta: u28::new(0),
        kind: TrackEventKind::Meta(MetaMessage::Tempo(u24::new(WRITE_TEMPO_US))),
    }];
    let mut last = 0u64;
    let mut push = |events: &mut Vec<TrackEvent<'_>>, tick: u64, message: MidiMessage| -> Result<()> {
        let delta = u32::try_from(tick - last)
            .ok()
            .filter(|&d| d <= u28::max_value().as_int())
            .ok_or_else(|| Error::InvalidConfig("note time exceeds the MIDI delta range".into()))?;
        last = tick;
        events.push(TrackEvent {
            delta: u28::new(delta),
            kind: TrackEventKind::Midi {
                channel: u4::new(0),
                message,
            },
        });
        Ok(())
    };
    for (index, note) in seq.iter().enumerate() {
        let (on, off) = (to_tick(note.onset()), to_tick(note.offset()));
        if off <= on {
            return Err(Error::NoteTooShort { index });
        }
        let key = u7::new(note.pitch());
        push(
            &mut events,
            on,
            MidiMessage::NoteOn {
                key,
                vel: u7::new(WRITE_VELOCITY),
            },
        )?;
        push(&mut events, off, MidiMessage::NoteOff { key, vel: u7::new(0) })?;
    }
    events.push(TrackEvent {
        delta: u28::new(0),
        kind: TrackEventKind::Meta(MetaMessage::EndOfTrack),
    });
    let mut smf = Smf::new(Header::new(Format::SingleTrack, Timing::Metrical(u15::new(PPQ))));
    smf.tracks.push(events);
    let mut out = Vec::new();
    smf.write_std(&mut out)?;
    Ok(out)
}

pub fn write_midi_notes(seq: &NoteSequence, path: &Path) -> Result<()> {
    let bytes = midi_bytes(seq).map_err(|e| e.at(path))?;
    super::write_atomic(path, &bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(notes: &[(f64, f64, u8)]) -> NoteSequence {
        NoteSequence::new(
            notes
                .iter()
                .map(|&(a, b, p)| NoteEvent::new(a, b, p).unwrap())
                .collect(),
            "t",
        )
        .unwrap()
    }

    fn smf_bytes(timing: Timing, tracks: Vec<Vec<TrackEvent<'static>>>) -> Vec<u8> {
        let format = if tracks.len() > 1 {
            Format::Parallel
        } else {
            Format::SingleTrack
        };
        let mut smf = Smf::new(Header::new(format, timing));
        smf.tracks = tracks;
        let mut out = Vec::new();
        smf.write_std(&mut out).unwrap();
        out
    }

    fn ev(delta: u32, kind: TrackEventKind<'static>) -> TrackEvent<'static> {
        TrackEvent {
            delta: u28::new(delta),
            kind,
        }
    }

    fn on(key: u8, vel: u8) -> TrackEventKind<'static> {
        TrackEventKind::Midi {
            channel: u4::new(0),
            message: MidiMessage::NoteOn {
                key: u7::new(key),
                vel: u7::new(vel),
            },
        }
    }

    fn off(key: u8) -> TrackEventKind<'static> {
        TrackEventKind::Midi {
            channel: u4::new(0),
            message: MidiMessage::NoteOff {
                key: u7::new(key),
                vel: u7::new(0),
            },
        }
    }

    #[test]
    fn round_trip_within_a_tick() {
        let s = seq(&[(0.1, 0.35, 60), (0.35, 0.6, 62), (1.0, 1.234567, 69)]);
        let back = notes_from_midi_bytes(&midi_bytes(&s).unwrap(), "t").unwrap();
        assert_eq!(back.len(), 3);
        let tick = 1.0 / 960.0;
        for (a, b) in s.iter().zip(back.iter()) {
            assert_eq!(a.pitch(), b.pitch());
            assert!((a.onset() - b.onset()).abs() <= tick);
            assert!((a.offset() - b.offset()).abs() <= tick);
        }
    }

    #[test]
    fn empty_sequence_round_trips() {
        let back = notes_from_midi_bytes(&midi_bytes(&NoteSequence::empty("e")).unwrap(), "e").unwrap();
        assert!(back.is_empty());
    }

    #[test]
    fn too_short_note_is_rejected() {
        let s = seq(&[(0.1, 0.1002, 60)]);
        assert!(matches!(midi_bytes(&s), Err(Error::NoteTooShort { index: 0 })));
    }

    #[test]
    fn velocity_zero_is_release_and_tempo_map_applies() {
        let bytes = smf_bytes(
            Timing::Metrical(u15::new(100)),
            vec![vec![
                ev(0, on(60, 90)),
                ev(100, on(60, 0)),
                ev(0, TrackEventKind::Meta(MetaMessage::Tempo(u24::new(1_000_000)))),
                ev(0, on(62, 90)),
                ev(100, off(62)),
                ev(0, TrackEventKind::Meta(MetaMessage::EndOfTrack)),
            ]],
        );
        let s = notes_from_midi_bytes(&bytes, "x").unwrap();
        let got: Vec<_> = s.iter().map(|n| (n.onset(), n.offset(), n.pitch())).collect();
        assert_eq!(got, vec![(0.0, 0.5, 60), (0.5, 1.5, 62)]);
    }

    #[test]
    fn tempo_in_other_track_applies() {
        let bytes = smf_bytes(
            Timing::Metrical(u15::new(480)),
            vec![
                vec![
                    ev(480, TrackEventKind::Meta(MetaMessage::Tempo(u24::new(250_000)))),
                    ev(0, TrackEventKind::Meta(MetaMessage::EndOfTrack)),
                ],
                vec![
                    ev(960, on(70, 80)),
                    ev(480, off(70)),
                    ev(0, TrackEventKind::Meta(MetaMessage::EndOfTrack)),
                ],
            ],
        );
        let s = notes_from_midi_bytes(&bytes, "x").unwrap();
        let n = s.notes()[0];
        assert!((n.onset() - 0.75).abs() < 1e-12);
        assert!((n.offset() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn legato_release_before_attack() {
        let bytes = smf_bytes(
            Timing::Metrical(u15::new(480)),
            vec![vec![
                ev(0, on(60, 90)),
                ev(480, on(62, 90)),
                ev(0, off(60)),
                ev(480, off(62)),
                ev(0, TrackEventKind::Meta(MetaMessage::EndOfTrack)),
            ]],
        );
        let s = notes_from_midi_bytes(&bytes, "x").unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.notes()[0].offset(), s.notes()[1].onset());
    }

    #[test]
    fn overlap_and_unmatched_are_errors() {
        let overlap = smf_bytes(
            Timing::Metrical(u15::new(480)),
            vec![vec![
                ev(0, on(60, 90)),
                ev(10, on(64, 90)),
                ev(10, off(60)),
                ev(10, off(64)),
                ev(0, TrackEventKind::Meta(MetaMessage::EndOfTrack)),
            ]],
        );
        assert!(matches!(
            notes_from_midi_bytes(&overlap, "x"),
            Err(Error::PolyphonicOverlap { pitch: 64, .. })
        ));
        let dangling = smf_bytes(
            Timing::Metrical(u15::new(480)),
            vec![vec![
                ev(0, on(60, 90)),
                ev(0, TrackEventKind::Meta(MetaMessage::EndOfTrack)),
            ]],
        );
        assert!(matches!(
            notes_from_midi_bytes(&dangling, "x"),
            Err(Error::UnmatchedNoteOn { pitch: 60, .. })
        ));
        assert!(matches!(
            notes_from_midi_bytes(b"not midi", "x"),
            Err(Error::MalformedMidi(_))
        ));
    }

    #[test]
    fn smpte_timing() {
        let bytes = smf_bytes(
            Timing::Timecode(midly::Fps::Fps25, 40),
            vec![vec![
                ev(500, on(60, 90)),
                ev(1000, off(60)),
                ev(0, TrackEventKind::Meta(MetaMessage::EndOfTrack)),
            ]],
        );
        let s = notes_from_midi_bytes(&bytes, "x").unwrap();
        assert!((s.notes()[0].onset() - 0.5).abs() < 1e-9);
        assert!((s.notes()[0].offset() - 1.5).abs() < 1e-9);
    }
}
