//! Plain-text onset/offset lists, one `onset offset` pair per line.

use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnnotationUnits {
    Seconds,
    /// Integer sample indices at the given rate.
    Samples(u32),
}

pub fn format_annotations(pairs: &[(f64, f64)], units: AnnotationUnits) -> String {
    let mut out = String::new();
    for &(on, off) in pairs {
        let line = match units {
            AnnotationUnits::Seconds => format!("{on:.6} {off:.6}\n"),
            AnnotationUnits::Samples(sr) => {
                format!(
                    "{} {}\n",
                    (on * sr as f64).round() as u64,
                    (off * sr as f64).round() as u64
                )
            }
        };
        out.push_str(&line);
    }
    out
}

/// Parses pairs back to seconds. Blank lines and `#` comments are skipped.
pub fn parse_annotations(text: &str, units: AnnotationUnits) -> Result<Vec<(f64, f64)>> {
    let scale = match units {
        AnnotationUnits::Seconds => 1.0,
        AnnotationUnits::Samples(sr) => 1.0 / sr as f64,
    };
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |reason: String| Error::MalformedAnnotation { line: i + 1, reason };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(bad(format!("expected 2 fields, found {}", fields.len())));
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite() && *v >= 0.0)
                .ok_or_else(|| bad(format!("{s:?} is not a non-negative number")))
        };
        let (on, off) = (parse(fields[0])? * scale, parse(fields[1])? * scale);
        if off <= on {
            return Err(bad("offset does not follow onset".into()));
        }
        pairs.push((on, off));
    }
    Ok(pairs)
}

pub fn read_annotations(path: &Path, units: AnnotationUnits) -> Result<Vec<(f64, f64)>> {
    let bytes = super::read_file(path)?;
    parse_annotations(&String::from_utf8_lossy(&bytes), units).map_err(|e| e.at(path))
}

pub fn write_annotations(pairs: &[(f64, f64)], path: &Path, units: AnnotationUnits) -> Result<()> {
    super::write_atomic(path, format_annotations(pairs, units).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seconds_and_samples() {
        let pairs = [(0.5, 0.75), (1.0, 1.25)];
        assert_eq!(
            format_annotations(&pairs, AnnotationUnits::Seconds),
            "0.500000 0.750000\n1.000000 1.250000\n"
        );
        let text = format_annotations(&pairs, AnnotationUnits::Samples(16000));
        assert_eq!(text, "8000 12000\n16000 20000\n");
        assert_eq!(
            parse_annotations(&text, AnnotationUnits::Samples(16000)).unwrap(),
            pairs
        );
    }

    #[test]
    fn rejects_bad_lines() {
        let err = parse_annotations("0.1 0.2\n0.3\n", AnnotationUnits::Seconds).unwrap_err();
        assert!(matches!(err, Error::MalformedAnnotation { line: 2, .. }));
        assert!(parse_annotations("0.4 0.2\n", AnnotationUnits::Seconds).is_err());
        assert!(parse_annotations("x 0.2\n", AnnotationUnits::Seconds).is_err());
        assert!(
            parse_annotations("# header\n\n0.1 0.2 # c\n", AnnotationUnits::Seconds)
                .unwrap()
                .len()
                == 1
        );
    }
}
