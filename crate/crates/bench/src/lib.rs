//! Seeded inputs shared by the benchmarks.

use humscribe::synth::{random_melody, synth_hum, MelodySpec, SynthParams};
use humscribe::{AffinityMatrix, FrameGrid, NoteClassMap, NoteEvent, NoteSequence, Waveform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_affinity(n_frames: usize, seed: u64) -> AffinityMatrix {
    let map = NoteClassMap::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..map.n_classes() * n_frames)
        .map(|_| rng.random_range(-8.0f32..0.0))
        .collect();
    AffinityMatrix::new(values, map, FrameGrid::new(256.0 / 22050.0, n_frames, 0.0).unwrap()).unwrap()
}

/// A synthetic hum of roughly `seconds` length at 22.05 kHz.
pub fn hum(seconds: f64, seed: u64) -> (NoteSequence, Waveform) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let per_note = 0.475;
    let n = ((seconds - 0.4) / per_note).max(1.0) as usize;
    let spec = MelodySpec {
        n_notes: n..=n,
        ..MelodySpec::default()
    };
    let melody = random_melody(&mut rng, &spec, "bench").unwrap();
    let audio = synth_hum(
        &melody,
        &SynthParams {
            noise_rms: 0.005,
            seed,
            ..SynthParams::default()
        },
    )
    .unwrap();
    (melody, audio)
}

/// A dense sequence of short notes, with onsets jittered for a second copy.
pub fn note_pair(n: usize, seed: u64) -> (NoteSequence, NoteSequence) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reference = Vec::with_capacity(n);
    let mut estimate = Vec::with_capacity(n);
    for i in 0..n {
        let (t, end) = (i as f64 * 0.1, (i + 1) as f64 * 0.1);
        let pitch = rng.random_range(60..64);
        reference.push(NoteEvent::new(t, end, pitch).unwrap());
        let jitter = rng.random_range(0.0..0.05);
        estimate.push(NoteEvent::new(t + jitter, end, pitch).unwrap());
    }
    (
        NoteSequence::new(reference, "ref").unwrap(),
        NoteSequence::new(estimate, "est").unwrap(),
    )
}
