use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use humscribe::annotate::{correct_annotation, AnnotationConfig, AnnotationResult};
use humscribe::eval::{evaluate, format_records, format_text, summarize, ReportRow};
use humscribe::io::{
    read_affinity, read_midi_notes, read_notes, read_notes_json, read_wav, write_affinity, write_annotations,
    write_atomic, write_notes, write_wav, AnnotationUnits, WavEncoding,
};
use humscribe::synth::{synth_hum, SynthParams};
use humscribe::{decode, features, CqtParams, DecodeConfig, Error, EvalConfig, FeatureConfig, NoteSequence, Result};

use crate::args::*;
use crate::files::{by_stem, collect, ensure_dir, stem, NOTE_EXTENSIONS};

fn parse_counts(path: &Path) -> Result<BTreeMap<String, usize>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(e).at(path))?;
    let mut counts = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |reason: &str| {
            Error::MalformedAnnotation {
                line: i + 1,
                reason: reason.into(),
            }
            .at(path)
        };
        let (name, count) = line
            .rsplit_once(char::is_whitespace)
            .ok_or_else(|| bad("expected \"filename count\""))?;
        let count: usize = count
            .trim()
            .parse()
            .map_err(|_| bad("count is not a non-negative integer"))?;
        counts.insert(stem(Path::new(name.trim())), count);
    }
    Ok(counts)
}

fn counts_from_midi(dir: &Path) -> Result<BTreeMap<String, usize>> {
    collect(dir, &["mid", "midi"])?
        .par_iter()
        .map(|p| Ok((stem(p), read_midi_notes(p)?.len())))
        .collect()
}

pub fn annotate(args: &AnnotateArgs) -> Result<()> {
    let mut cfg = AnnotationConfig {
        min_note_s: args.min_note_ms / 1000.0,
        min_silence_s: args.min_silence_ms / 1000.0,
        ..AnnotationConfig::default()
    };
    if let Some(t) = &args.thresholds {
        cfg.thresholds = t.clone();
    }
    cfg.validate()?;
    let counts = match (&args.counts, &args.counts_from_midi) {
        (Some(file), _) => parse_counts(file)?,
        (None, Some(dir)) => counts_from_midi(dir)?,
        (None, None) => unreachable!("clap requires one counts source"),
    };
    let wavs = collect(&args.wav, &["wav"])?;
    let jobs: Vec<(PathBuf, usize)> = wavs
        .into_iter()
        .map(|w| {
            let n = counts
                .get(&stem(&w))
                .copied()
                .ok_or_else(|| Error::InvalidConfig(format!("no expected note count for {}", w.display())))?;
            Ok((w, n))
        })
        .collect::<Result<_>>()?;
    ensure_dir(&args.output)?;

    let results: Vec<(String, AnnotationResult)> = jobs
        .par_iter()
        .map(|(wav, n)| {
            let res = correct_annotation(&read_wav(wav)?, *n, &cfg).map_err(|e| e.at(wav))?;
            if res.accepted {
                let units = if args.emit_samples {
                    AnnotationUnits::Samples(res.sample_rate)
                } else {
                    AnnotationUnits::Seconds
                };
                let out = args.output.join(format!("{}_onsets_offsets.txt", stem(wav)));
                write_annotations(&res.onsets_offsets, &out, units)?;
            }
            Ok((stem(wav), res))
        })
        .collect::<Result<_>>()?;

    let accepted = results.iter().filter(|(_, r)| r.accepted).count();
    let total = results.len();
    let pct = if total > 0 {
        100.0 * accepted as f64 / total as f64
    } else {
        0.0
    };
    let mut summary = String::from("file\texpected\tstatus\tthreshold\n");
    for (id, r) in &results {
        let threshold = r.threshold_used.map_or("-".to_string(), |t| format!("{t:.2}"));
        let status = if r.accepted { "accepted" } else { "rejected" };
        let _ = writeln!(summary, "{id}\t{}\t{status}\t{threshold}", r.n_expected);
    }
    let last = format!("accepted {accepted} of {total} ({pct:.1}%)");
    let _ = writeln!(summary, "{last}");
    write_atomic(&args.output.join("summary.tsv"), summary.as_bytes())?;
    println!("{last}");
    Ok(())
}

fn feature_config(args: &FeaturesArgs) -> FeatureConfig {
    FeatureConfig {
        cqt: CqtParams {
            fmin_hz: args.fmin_hz,
            bins_per_semitone: args.bins_per_semitone,
            n_octaves: args.octaves,
            hop_samples: args.hop,
            ..CqtParams::default()
        },
        ..FeatureConfig::default()
    }
    .with_harmonics(args.harmonics.clone())
}

pub fn features_cmd(args: &FeaturesArgs) -> Result<()> {
    let aff = features(&read_wav(&args.wav)?, &feature_config(args)).map_err(|e| e.at(&args.wav))?;
    write_affinity(&aff, &args.output)?;
    println!(
        "{} classes x {} frames -> {}",
        aff.n_classes(),
        aff.n_frames(),
        args.output.display()
    );
    Ok(())
}

pub fn decode_cmd(args: &DecodeArgs) -> Result<()> {
    let cfg = DecodeConfig {
        min_note_frames: args.min_note_frames,
        chunk_silence_frames: args.chunk_silence_frames,
    };
    cfg.validate()?;
    let aff = read_affinity(&args.aff)?;
    let notes = decode(&aff, &cfg).map_err(|e| e.at(&args.aff))?;
    for out in &args.output {
        write_notes(&notes, out)?;
    }
    println!("{} notes", notes.len());
    Ok(())
}

fn eval_config(args: &EvaluateArgs) -> Result<EvalConfig> {
    let cfg = EvalConfig {
        onset_tol_s: args.onset_tol_ms / 1000.0,
        pitch_tol_cents: args.pitch_tol_cents,
        octave_invariant: args.octave_invariant,
        use_onsets: !args.notes_only,
        use_offsets: false,
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Pairs references with estimates. A reference without an estimate is scored
/// against an empty estimate; estimates without a reference are ignored.
fn pair_notes(reference: &Path, estimate: &Path) -> Result<Vec<(String, PathBuf, Option<PathBuf>)>> {
    match (reference.is_dir(), estimate.is_dir()) {
        (false, false) => Ok(vec![(
            stem(reference),
            reference.to_path_buf(),
            Some(estimate.to_path_buf()),
        )]),
        (true, true) => {
            let refs = by_stem(collect(reference, &NOTE_EXTENSIONS)?)?;
            let mut ests = by_stem(collect(estimate, &NOTE_EXTENSIONS)?)?;
            let pairs: Vec<_> = refs
                .into_iter()
                .map(|(id, r)| {
                    let e = ests.remove(&id);
                    if e.is_none() {
                        eprintln!("warning: no estimate for {id}; scoring it as empty");
                    }
                    (id, r, e)
                })
                .collect();
            for id in ests.keys() {
                eprintln!("warning: estimate {id} has no reference; ignored");
            }
            Ok(pairs)
        }
        _ => Err(Error::InvalidConfig(
            "--ref and --est must both be files or both be directories".into(),
        )),
    }
}

fn score_pairs(pairs: &[(String, PathBuf, Option<PathBuf>)], cfg: &EvalConfig) -> Result<Vec<ReportRow>> {
    pairs
        .par_iter()
        .map(|(id, r, e)| {
            let reference = read_notes(r)?;
            let estimate = match e {
                Some(e) => read_notes(e)?,
                None => NoteSequence::empty(id.clone()),
            };
            Ok(ReportRow {
                id: id.clone(),
                report: evaluate(&reference, &estimate, cfg)?,
            })
        })
        .collect()
}

fn render(rows: &[ReportRow], cfg: &EvalConfig, format: ReportFormat) -> String {
    let corpus = summarize(rows.iter().map(|r| r.report).collect());
    match format {
        ReportFormat::Text => format_text(rows, &corpus, cfg),
        ReportFormat::Records => format_records(rows, &corpus, cfg),
    }
}

pub fn evaluate_cmd(args: &EvaluateArgs) -> Result<()> {
    let cfg = eval_config(args)?;
    let pairs = pair_notes(&args.reference, &args.est)?;
    let rows = score_pairs(&pairs, &cfg)?;
    let report = render(&rows, &cfg, args.format);
    match &args.output {
        Some(path) => write_atomic(path, report.as_bytes())?,
        None => print!("{report}"),
    }
    Ok(())
}

pub fn synth_cmd(args: &SynthArgs) -> Result<()> {
    let notes = read_notes_json(&args.notes)?;
    let params = SynthParams {
        sample_rate: args.sample_rate,
        noise_rms: args.noise,
        seed: args.seed,
        ..SynthParams::default()
    };
    let audio = synth_hum(&notes, &params).map_err(|e| e.at(&args.notes))?;
    write_wav(&audio, &args.output, WavEncoding::Float32)?;
    println!("{:.3} s of audio -> {}", audio.duration_s(), args.output.display());
    Ok(())
}

pub fn pipeline_cmd(args: &PipelineArgs) -> Result<()> {
    let decode_cfg = DecodeConfig {
        min_note_frames: args.min_note_frames,
        ..DecodeConfig::default()
    };
    decode_cfg.validate()?;
    let wavs = collect(&args.wav, &["wav"])?;
    ensure_dir(&args.output)?;
    let feature_cfg = FeatureConfig::default();
    let written: Vec<(String, PathBuf)> = wavs
        .par_iter()
        .map(|wav| {
            let id = stem(wav);
            let aff = features(&read_wav(wav)?, &feature_cfg).map_err(|e| e.at(wav))?;
            write_affinity(&aff, &args.output.join(format!("{id}.aff1")))?;
            let notes = decode(&aff, &decode_cfg).map_err(|e| e.at(wav))?;
            let json = args.output.join(format!("{id}.json"));
            write_notes(&notes, &json)?;
            write_notes(&notes, &args.output.join(format!("{id}.mid")))?;
            println!("{id}: {} notes", notes.len());
            Ok((id, json))
        })
        .collect::<Result<_>>()?;

    let Some(reference) = &args.reference else {
        return Ok(());
    };
    let pairs: Vec<(String, PathBuf, Option<PathBuf>)> = if reference.is_dir() {
        let refs = by_stem(collect(reference, &NOTE_EXTENSIONS)?)?;
        written
            .into_iter()
            .filter_map(|(id, est)| match refs.get(&id) {
                Some(r) => Some((id, r.clone(), Some(est))),
                None => {
                    eprintln!("warning: no reference for {id}; not scored");
                    None
                }
            })
            .collect()
    } else if written.len() == 1 {
        let (id, est) = written.into_iter().next().expect("one file");
        vec![(id, reference.clone(), Some(est))]
    } else {
        return Err(Error::InvalidConfig(
            "a directory of WAV files needs a directory of references".into(),
        ));
    };
    let cfg = EvalConfig::default();
    let rows = score_pairs(&pairs, &cfg)?;
    let report = render(&rows, &cfg, ReportFormat::Text);
    write_atomic(&args.output.join("evaluation.txt"), report.as_bytes())?;
    print!("{report}");
    Ok(())
}
