//! RTTM segment annotation I/O.
//!
//! Records are the standard 10-field SPEAKER lines:
//!
//! ```text
//! SPEAKER <recording_id> <channel> <onset> <duration> <NA> <NA> <label> <NA> <NA>
//! ```
//!
//! Onset and duration are decimal seconds. The channel field is read but
//! ignored (long-form recordings are mono) and the `<NA>` placeholders are
//! not validated. Written records are sorted by (recording_id, onset, label)
//! and carry exactly three decimal digits, so parse ∘ write is the identity
//! at millisecond resolution.

use std::io::{BufRead, Write};

use crate::core::annotation::{Annotation, AnnotationSet};
use crate::core::span::TimeSpan;
use crate::core::time::TimePoint;
use crate::error::{Error, Result};
use crate::formats::label_map::LabelMap;
use crate::report::fmt_nanos_as_secs3;

/// Parse RTTM text into per-recording annotations.
///
/// Blank lines and lines starting with `;` or `#` are skipped. Unknown
/// labels are rejected unless `label_map` resolves them.
pub fn parse_rttm<R: BufRead>(reader: R, label_map: Option<&LabelMap>) -> Result<AnnotationSet> {
    let default_map = LabelMap::new();
    let map = label_map.unwrap_or(&default_map);
    let mut annotations = AnnotationSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with(';') || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 10 {
            return Err(Error::parse(
                line_no,
                format!("expected 10 fields, found {}", fields.len()),
            ));
        }
        if fields[0] != "SPEAKER" {
            return Err(Error::parse(
                line_no,
                format!("unsupported record type \"{}\" (expected SPEAKER)", fields[0]),
            ));
        }
        let recording_id = fields[1];
        let onset: f64 = fields[3]
            .parse()
            .map_err(|_| Error::parse(line_no, format!("non-numeric onset \"{}\"", fields[3])))?;
        let duration: f64 = fields[4].parse().map_err(|_| {
            Error::parse(line_no, format!("non-numeric duration \"{}\"", fields[4]))
        })?;
        if !(duration > 0.0) {
            return Err(Error::parse(line_no, format!("duration ≤ 0 ({duration})")));
        }
        if onset < 0.0 {
            return Err(Error::parse(line_no, format!("negative onset ({onset})")));
        }
        let label = match map.resolve(fields[7], line_no)? {
            Some(label) => label,
            None => continue,
        };
        let span = TimeSpan::new(onset, onset + duration)
            .map_err(|e| Error::parse(line_no, e.to_string()))?;
        annotations
            .entry(recording_id.to_string())
            .or_insert_with(|| Annotation::new(recording_id))
            .push(span, label);
    }
    Ok(annotations)
}

/// Serialize annotations as RTTM text.
pub fn write_rttm<W: Write>(mut writer: W, annotations: &AnnotationSet) -> Result<()> {
    for (recording_id, annotation) in annotations {
        let mut entries: Vec<(TimePoint, TimePoint, &str)> = annotation
            .entries()
            .iter()
            .map(|(span, label)| (span.onset(), span.offset(), label.as_str()))
            .collect();
        entries.sort_by_key(|&(onset, offset, label)| (onset, label, offset));
        for (onset, offset, label) in entries {
            writeln!(
                writer,
                "SPEAKER {} 1 {} {} <NA> <NA> {} <NA> <NA>",
                recording_id,
                fmt_nanos_as_secs3(onset.as_nanos()),
                fmt_nanos_as_secs3(offset - onset),
                label,
            )?;
        }
    }
    Ok(())
}

/// Serialize to an owned string (the CLI's stdout path).
pub fn rttm_to_string(annotations: &AnnotationSet) -> String {
    let mut out = Vec::new();
    write_rttm(&mut out, annotations).expect("writing to a Vec cannot fail");
    String::from_utf8(out).expect("RTTM output is ASCII")
}
