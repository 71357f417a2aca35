//! Text and record renderings of evaluation results.

use std::fmt::Write as _;

use serde_json::json;

use super::{CorpusReport, EvalConfig, EvalReport};

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub id: String,
    pub report: EvalReport,
}

fn mode_label(cfg: &EvalConfig) -> String {
    format!(
        "{}, {}",
        if cfg.octave_invariant {
            "octave-invariant"
        } else {
            "octave-aware"
        },
        if cfg.use_onsets { "note+onset" } else { "notes-only" }
    )
}

/// Aligned columns: one line per file, then micro and macro corpus lines.
pub fn format_text(rows: &[ReportRow], corpus: &CorpusReport, cfg: &EvalConfig) -> String {
    let width = rows.iter().map(|r| r.id.len()).chain([11]).max().unwrap_or(11);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# {} | onset tol {} ms | pitch tol {} cents",
        mode_label(cfg),
        cfg.onset_tol_s * 1000.0,
        cfg.pitch_tol_cents
    );
    let _ = writeln!(
        out,
        "{:<width$}  {:>5}  {:>5}  {:>5}  {:>9}  {:>9}  {:>9}",
        "file", "tp", "fp", "fn", "precision", "recall", "f1"
    );
    let mut line = |id: &str, tp: String, fp: String, fn_: String, p: f64, r: f64, f: f64| {
        let _ = writeln!(
            out,
            "{id:<width$}  {tp:>5}  {fp:>5}  {fn_:>5}  {p:>9.4}  {r:>9.4}  {f:>9.4}"
        );
    };
    for row in rows {
        let r = &row.report;
        line(
            &row.id,
            r.tp.to_string(),
            r.fp.to_string(),
            r.fn_.to_string(),
            r.precision,
            r.recall,
            r.f1,
        );
    }
    let m = &corpus.micro;
    line(
        "TOTAL/micro",
        m.tp.to_string(),
        m.fp.to_string(),
        m.fn_.to_string(),
        m.precision,
        m.recall,
        m.f1,
    );
    line(
        "TOTAL/macro",
        "-".into(),
        "-".into(),
        "-".into(),
        corpus.macro_precision,
        corpus.macro_recall,
        corpus.macro_f1,
    );
    out
}

/// One JSON object per line: every file, then the micro and macro corpus records.
pub fn format_records(rows: &[ReportRow], corpus: &CorpusReport, cfg: &EvalConfig) -> String {
    let flags = json!({
        "octave_invariant": cfg.octave_invariant,
        "use_onsets": cfg.use_onsets,
        "use_offsets": cfg.use_offsets,
        "onset_tol_s": cfg.onset_tol_s,
        "pitch_tol_cents": cfg.pitch_tol_cents,
    });
    let record = |scope: &str, id: &str, r: &EvalReport| {
        let mut v = json!({
            "scope": scope,
            "file": id,
            "tp": r.tp,
            "fp": r.fp,
            "fn": r.fn_,
            "precision": r.precision,
            "recall": r.recall,
            "f1": r.f1,
        });
        for (k, val) in flags.as_object().expect("flags object") {
            v[k] = val.clone();
        }
        v.to_string()
    };
    let mut lines: Vec<String> = rows.iter().map(|row| record("file", &row.id, &row.report)).collect();
    lines.push(record("corpus_micro", "", &corpus.micro));
    let mut macro_rec = json!({
        "scope": "corpus_macro",
        "file": "",
        "precision": corpus.macro_precision,
        "recall": corpus.macro_recall,
        "f1": corpus.macro_f1,
    });
    for (k, val) in flags.as_object().expect("flags object") {
        macro_rec[k] = val.clone();
    }
    lines.push(macro_rec.to_string());
    lines.join("\n") + "\n"
}
