//! Label vocabulary mapping for corpora that do not use the canonical
//! KCHI/OCH/MAL/FEM names.

use std::collections::BTreeMap;
use std::io::BufRead;
use std::str::FromStr;

use crate::core::label::VoiceType;
use crate::error::{Error, Result};

/// Target of a mapping rule: rename to a canonical class or drop the entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MappedLabel {
    Keep(VoiceType),
    Ignore,
}

/// User-supplied relabeling table, CSV rows `from,to` with
/// `to ∈ {KCHI, OCH, MAL, FEM, IGNORE}`.
///
/// Mapping rules take precedence over the canonical names, so a map may also
/// redirect or drop a canonical class.
#[derive(Debug, Clone, Default)]
pub struct LabelMap {
    rules: BTreeMap<String, MappedLabel>,
}

impl LabelMap {
    pub fn new() -> LabelMap {
        LabelMap::default()
    }

    pub fn insert(&mut self, from: impl Into<String>, to: MappedLabel) {
        self.rules.insert(from.into(), to);
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Resolve a raw label: `Ok(Some(class))` to keep, `Ok(None)` to drop.
    ///
    /// `line` feeds the error position when the label is known to neither the
    /// map nor the canonical vocabulary.
    pub fn resolve(&self, raw: &str, line: usize) -> Result<Option<VoiceType>> {
        if let Some(rule) = self.rules.get(raw) {
            return Ok(match rule {
                MappedLabel::Keep(class) => Some(*class),
                MappedLabel::Ignore => None,
            });
        }
        match VoiceType::from_str(raw) {
            Ok(class) => Ok(Some(class)),
            Err(_) => Err(Error::parse(
                line,
                format!("unknown label \"{raw}\" (no mapping rule and not a canonical class)"),
            )),
        }
    }
}

/// Parse a mapping table from CSV text. A `from,to` header row is optional.
pub fn parse_label_map<R: BufRead>(reader: R) -> Result<LabelMap> {
    let mut map = LabelMap::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if line_no == 1 && trimmed.eq_ignore_ascii_case("from,to") {
            continue;
        }
        let mut fields = trimmed.split(',');
        let (from, to) = match (fields.next(), fields.next(), fields.next()) {
            (Some(from), Some(to), None) => (from.trim(), to.trim()),
            _ => return Err(Error::parse(line_no, "expected exactly 2 comma-separated fields")),
        };
        if from.is_empty() {
            return Err(Error::parse(line_no, "empty source label"));
        }
        let target = if to == "IGNORE" {
            MappedLabel::Ignore
        } else {
            MappedLabel::Keep(VoiceType::from_str(to).map_err(|_| {
                Error::parse(
                    line_no,
                    format!("mapping target \"{to}\" is not one of KCHI, OCH, MAL, FEM, IGNORE"),
                )
            })?)
        };
        map.insert(from, target);
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_labels_pass_through_without_rules() {
        let map = LabelMap::new();
        assert_eq!(map.resolve("KCHI", 1).unwrap(), Some(VoiceType::KeyChild));
        assert!(map.resolve("CHI", 1).is_err());
    }

    #[test]
    fn rules_rename_and_drop() {
        let text = "from,to\nCHI,KCHI\nSPEECH,IGNORE\nFA,FEM\n";
        let map = parse_label_map(text.as_bytes()).unwrap();
        assert_eq!(map.resolve("CHI", 3).unwrap(), Some(VoiceType::KeyChild));
        assert_eq!(map.resolve("SPEECH", 3).unwrap(), None);
        assert_eq!(map.resolve("FA", 3).unwrap(), Some(VoiceType::FemaleAdult));
        assert_eq!(map.resolve("MAL", 3).unwrap(), Some(VoiceType::MaleAdult));
    }

    #[test]
    fn rules_may_override_canonical_names() {
        let map = parse_label_map("KCHI,IGNORE\n".as_bytes()).unwrap();
        assert_eq!(map.resolve("KCHI", 1).unwrap(), None);
    }

    #[test]
    fn bad_target_is_a_parse_error_with_line() {
        let err = parse_label_map("from,to\nCHI,CHILD\n".as_bytes()).unwrap_err();
        assert!(err.to_string().contains("line 2"));
    }
}
