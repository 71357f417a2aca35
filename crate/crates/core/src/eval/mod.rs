//! Note-level precision, recall and F1.
//!
//! A reference and an estimated note are compatible when their pitches agree
//! within the pitch tolerance (optionally modulo the octave) and, unless
//! onsets are disregarded, their onsets lie within the onset tolerance. Each
//! reference and each estimate can be used at most once, so true positives
//! are the size of a maximum matching of the compatibility graph; unmatched
//! estimates are false positives and unmatched references false negatives.

mod matching;
mod report;

pub use matching::maximum_matching;
pub use report::{format_records, format_text, ReportRow};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::types::NoteSequence;

/// Slack added to the onset tolerance to absorb representation error in
/// decimal times (e.g. `1.05 - 1.00 > 0.05` in binary floating point).
const ONSET_EPS_S: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalConfig {
    pub onset_tol_s: f64,
    pub pitch_tol_cents: f64,
    pub octave_invariant: bool,
    /// `false` compares pitches only ("notes only" scoring).
    pub use_onsets: bool,
    /// Offset matching is not supported; must stay `false`.
    pub use_offsets: bool,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            onset_tol_s: 0.05,
            pitch_tol_cents: 1.0,
            octave_invariant: false,
            use_onsets: true,
            use_offsets: false,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.onset_tol_s >= 0.0 && self.onset_tol_s.is_finite()) {
            return Err(Error::InvalidConfig("onset tolerance must be non-negative".into()));
        }
        if !(self.pitch_tol_cents >= 0.0 && self.pitch_tol_cents.is_finite()) {
            return Err(Error::InvalidConfig("pitch tolerance must be non-negative".into()));
        }
        if self.use_offsets {
            return Err(Error::InvalidConfig("offset-aware matching is not supported".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalReport {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl EvalReport {
    pub fn from_counts(tp: usize, fp: usize, fn_: usize) -> Self {
        let ratio = |num: usize, den: usize| if den > 0 { num as f64 / den as f64 } else { 0.0 };
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        EvalReport {
            tp,
            fp,
            fn_,
            precision,
            recall,
            f1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusReport {
    pub per_file: Vec<EvalReport>,
    /// Counts summed over files, then turned into P/R/F1.
    pub micro: EvalReport,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
}

pub fn pitch_match(ref_midi: u8, est_midi: u8, cfg: &EvalConfig) -> bool {
    let (r, e) = if cfg.octave_invariant {
        (ref_midi % 12, est_midi % 12)
    } else {
        (ref_midi, est_midi)
    };
    (r as f64 - e as f64).abs() * 100.0 <= cfg.pitch_tol_cents
}

fn compatible(r: &crate::types::NoteEvent, e: &crate::types::NoteEvent, cfg: &EvalConfig) -> bool {
    pitch_match(r.pitch(), e.pitch(), cfg)
        && (!cfg.use_onsets || (r.onset() - e.onset()).abs() <= cfg.onset_tol_s + ONSET_EPS_S)
}

/// Maximum one-to-one matching of compatible notes, as `(ref index, est index)` pairs.
pub fn match_notes(reference: &NoteSequence, estimate: &NoteSequence, cfg: &EvalConfig) -> Vec<(usize, usize)> {
    let adjacency: Vec<Vec<usize>> = reference
        .iter()
        .map(|r| {
            estimate
                .iter()
                .enumerate()
                .filter(|(_, e)| compatible(r, e, cfg))
                .map(|(j, _)| j)
                .collect()
        })
        .collect();
    maximum_matching(&adjacency, estimate.len())
}

pub fn evaluate(reference: &NoteSequence, estimate: &NoteSequence, cfg: &EvalConfig) -> Result<EvalReport> {
    cfg.validate()?;
    let tp = match_notes(reference, estimate, cfg).len();
    Ok(EvalReport::from_counts(tp, estimate.len() - tp, reference.len() - tp))
}

pub fn evaluate_corpus(
    references: &[NoteSequence],
    estimates: &[NoteSequence],
    cfg: &EvalConfig,
) -> Result<CorpusReport> {
    if references.len() != estimates.len() {
        return Err(Error::MismatchedCorpus {
            refs: references.len(),
            ests: estimates.len(),
        });
    }
    let per_file = references
        .iter()
        .zip(estimates)
        .map(|(r, e)| evaluate(r, e, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(per_file))
}

/// Micro and macro averages over already computed per-file reports.
pub fn summarize(per_file: Vec<EvalReport>) -> CorpusReport {
    let (tp, fp, fn_) = per_file
        .iter()
        .fold((0, 0, 0), |(a, b, c), r| (a + r.tp, b + r.fp, c + r.fn_));
    let n = per_file.len().max(1) as f64;
    let mean = |f: fn(&EvalReport) -> f64| per_file.iter().map(f).sum::<f64>() / n;
    CorpusReport {
        micro: EvalReport::from_counts(tp, fp, fn_),
        macro_precision: mean(|r| r.precision),
        macro_recall: mean(|r| r.recall),
        macro_f1: mean(|r| r.f1),
        per_file,
    }
}
