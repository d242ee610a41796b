//! Per-file metadata: child identity and acoustic condition estimates.
//! CSV with header `file_id,child_id,snr,c50`.

use std::collections::BTreeMap;
use std::io::BufRead;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct MetadataRow {
    pub file_id: String,
    pub child_id: String,
    pub snr: f64,
    pub c50: f64,
}

/// Metadata table keyed by unique file id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetadataTable {
    rows: BTreeMap<String, MetadataRow>,
}

impl MetadataTable {
    pub fn new() -> MetadataTable {
        MetadataTable::default()
    }

    pub fn insert(&mut self, row: MetadataRow) -> Result<()> {
        if self.rows.contains_key(&row.file_id) {
            return Err(Error::parse(0, format!("duplicate file_id \"{}\"", row.file_id)));
        }
        self.rows.insert(row.file_id.clone(), row);
        Ok(())
    }

    pub fn get(&self, file_id: &str) -> Option<&MetadataRow> {
        self.rows.get(file_id)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &MetadataRow> {
        self.rows.values()
    }
}

pub fn parse_metadata<R: BufRead>(reader: R) -> Result<MetadataTable> {
    let mut table = MetadataTable::new();
    let mut lines = reader.lines();
    let header = match lines.next() {
        Some(line) => line?,
        None => return Err(Error::parse(1, "empty file: missing header")),
    };
    if header.trim_end_matches('\r') != "file_id,child_id,snr,c50" {
        return Err(Error::parse(
            1,
            format!(
                "bad header \"{}\", expected \"file_id,child_id,snr,c50\"",
                header.trim_end()
            ),
        ));
    }
    for (idx, line) in lines.enumerate() {
        let line_no = idx + 2;
        let line = line?;
        let trimmed = line.trim_end_matches('\r').trim();
        if trimmed.is_empty() {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::parse(
                line_no,
                format!("expected 4 fields, found {}", fields.len()),
            ));
        }
        let snr: f64 = fields[2].trim().parse().map_err(|_| {
            Error::parse(line_no, format!("non-numeric snr \"{}\"", fields[2]))
        })?;
        let c50: f64 = fields[3].trim().parse().map_err(|_| {
            Error::parse(line_no, format!("non-numeric c50 \"{}\"", fields[3]))
        })?;
        let row = MetadataRow {
            file_id: fields[0].trim().to_string(),
            child_id: fields[1].trim().to_string(),
            snr,
            c50,
        };
        table
            .insert(row)
            .map_err(|e| Error::parse(line_no, e.to_string()))?;
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rows() {
        let text = "file_id,child_id,snr,c50\nf1,c1,5.2,3.1\nf2,c1,-2.0,0.5\n";
        let table = parse_metadata(text.as_bytes()).unwrap();
        assert_eq!(table.len(), 2);
        let row = table.get("f1").unwrap();
        assert_eq!(row.child_id, "c1");
        assert_eq!(row.snr, 5.2);
        assert_eq!(row.c50, 3.1);
    }

    #[test]
    fn duplicate_file_id_rejected() {
        let text = "file_id,child_id,snr,c50\nf1,c1,5.2,3.1\nf1,c2,1.0,1.0\n";
        let err = parse_metadata(text.as_bytes()).unwrap_err();
        let message = err.to_string();
        assert!(message.contains("duplicate"), "{message}");
        assert!(message.contains("line 3"), "{message}");
    }

    #[test]
    fn header_only_is_an_empty_table() {
        let table = parse_metadata("file_id,child_id,snr,c50\n".as_bytes()).unwrap();
        assert!(table.is_empty());
    }
}
