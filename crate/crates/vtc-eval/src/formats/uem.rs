//! UEM evaluation-map I/O: `file_id channel onset offset`, one region per
//! line, decimal seconds. Regions of one recording are merged into support
//! normal form on load.

use std::io::BufRead;

use crate::core::annotation::EvalMap;
use crate::core::span::TimeSpan;
use crate::core::timeline::Timeline;
use crate::error::{Error, Result};

pub fn parse_uem<R: BufRead>(reader: R) -> Result<EvalMap> {
    let mut map = EvalMap::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with(';') || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(Error::parse(
                line_no,
                format!("expected 4 fields, found {}", fields.len()),
            ));
        }
        let recording_id = fields[0];
        let onset: f64 = fields[2]
            .parse()
            .map_err(|_| Error::parse(line_no, format!("non-numeric onset \"{}\"", fields[2])))?;
        let offset: f64 = fields[3]
            .parse()
            .map_err(|_| Error::parse(line_no, format!("non-numeric offset \"{}\"", fields[3])))?;
        let span = TimeSpan::new(onset, offset).map_err(|e| Error::parse(line_no, e.to_string()))?;
        map.insert(recording_id, Timeline::from_spans(vec![span]));
    }
    Ok(map)
}
