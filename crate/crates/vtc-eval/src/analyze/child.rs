//! Grouping per-recording results by child for stratified analysis.
//!
//! Each child becomes one point: identification components are merged across
//! the child's recordings before rates are taken (so longer recordings weigh
//! more, exactly as if the audio were concatenated), and the acoustic
//! condition estimates are averaged with per-recording reference duration as
//! the weight. Children with no reference speech have undefined rates and
//! are excluded with a warning rather than an error.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::formats::metadata::MetadataTable;
use crate::metrics::{rates, MetricComponents, Rates, RecordingEvaluation};

/// One child's pooled outcome and acoustic conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct ChildPoint {
    pub child_id: String,
    /// Reference-duration-weighted mean speech-to-noise ratio, in dB.
    pub snr: f64,
    /// Reference-duration-weighted mean clarity index, in dB.
    pub c50: f64,
    pub components: MetricComponents,
    pub rates: Rates,
    /// Number of recordings merged into this point.
    pub recordings: usize,
}

/// Collapse per-recording evaluations into per-child points.
///
/// Every evaluated recording must appear in the metadata table; the table
/// itself must be non-empty. Returns the points (ordered by child id) plus
/// warnings for children excluded for having no reference speech.
pub fn per_child_metrics(
    per_recording: &[RecordingEvaluation],
    metadata: &MetadataTable,
) -> Result<(Vec<ChildPoint>, Vec<String>)> {
    if metadata.is_empty() {
        return Err(Error::NoMetadata);
    }
    let mut missing: Vec<String> = per_recording
        .iter()
        .filter(|rec| metadata.get(&rec.recording_id).is_none())
        .map(|rec| rec.recording_id.clone())
        .collect();
    if !missing.is_empty() {
        missing.sort_unstable();
        missing.dedup();
        return Err(Error::MissingMetadata(missing));
    }

    struct Group {
        components: MetricComponents,
        snr_weighted: f64,
        c50_weighted: f64,
        weight: f64,
        recordings: usize,
    }
    let mut groups: BTreeMap<&str, Group> = BTreeMap::new();
    for rec in per_recording {
        let row = metadata.get(&rec.recording_id).expect("validated above");
        let group = groups.entry(row.child_id.as_str()).or_insert(Group {
            components: MetricComponents::ZERO,
            snr_weighted: 0.0,
            c50_weighted: 0.0,
            weight: 0.0,
            recordings: 0,
        });
        let weight = rec.components.total_reference_nanos() as f64;
        group.components.merge(&rec.components);
        group.snr_weighted += weight * row.snr;
        group.c50_weighted += weight * row.c50;
        group.weight += weight;
        group.recordings += 1;
    }

    let mut points = Vec::with_capacity(groups.len());
    let mut warnings = Vec::new();
    for (child_id, group) in groups {
        if group.components.total_reference_nanos() == 0 {
            warnings.push(format!(
                "child {child_id} has no reference speech and was excluded"
            ));
            continue;
        }
        let rates = rates(&group.components).expect("positive reference duration");
        points.push(ChildPoint {
            child_id: child_id.to_string(),
            snr: group.snr_weighted / group.weight,
            c50: group.c50_weighted / group.weight,
            components: group.components,
            rates,
            recordings: group.recordings,
        });
    }
    Ok((points, warnings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::annotation::Annotation;
    use crate::core::label::VoiceType;
    use crate::core::span::TimeSpan;
    use crate::core::timeline::Timeline;
    use crate::formats::metadata::MetadataRow;
    use crate::metrics::identification_components_over;
    use crate::metrics::DetectionCounts;
    use crate::core::label::NUM_CLASSES;

    fn span(onset: f64, offset: f64) -> TimeSpan {
        TimeSpan::new(onset, offset).unwrap()
    }

    fn recording(id: &str, hit: f64, total: f64) -> RecordingEvaluation {
        // Reference speech on (0, total); hypothesis agrees on (0, hit).
        let mut reference = Annotation::new(id);
        reference.push(span(0.0, total), VoiceType::KeyChild);
        let mut hypothesis = Annotation::new(id);
        if hit > 0.0 {
            hypothesis.push(span(0.0, hit), VoiceType::KeyChild);
        }
        let eval = Timeline::from_spans(vec![span(0.0, total)]);
        RecordingEvaluation {
            recording_id: id.to_string(),
            components: identification_components_over(&reference, &hypothesis, &eval),
            detection: [DetectionCounts::ZERO; NUM_CLASSES],
        }
    }

    fn table(rows: &[(&str, &str, f64, f64)]) -> MetadataTable {
        let mut table = MetadataTable::new();
        for &(file_id, child_id, snr, c50) in rows {
            table
                .insert(MetadataRow {
                    file_id: file_id.to_string(),
                    child_id: child_id.to_string(),
                    snr,
                    c50,
                })
                .unwrap();
        }
        table
    }

    #[test]
    fn recordings_merge_before_rates() {
        // One fully missed 10 s file and one fully correct 10 s file pool to
        // 50% miss, not the 100%/0% average of per-file rates.
        let recs = vec![recording("a", 0.0, 10.0), recording("b", 10.0, 10.0)];
        let meta = table(&[("a", "child1", 0.0, 0.0), ("b", "child1", 0.0, 0.0)]);
        let (points, warnings) = per_child_metrics(&recs, &meta).unwrap();
        assert!(warnings.is_empty());
        assert_eq!(points.len(), 1);
        let point = &points[0];
        assert_eq!(point.child_id, "child1");
        assert_eq!(point.recordings, 2);
        assert!((point.rates.pct_miss - 50.0).abs() < 1e-12);
        assert!((point.rates.pct_correct - 50.0).abs() < 1e-12);
    }

    #[test]
    fn conditions_are_weighted_by_reference_duration() {
        let recs = vec![recording("a", 10.0, 10.0), recording("b", 30.0, 30.0)];
        let meta = table(&[("a", "kid", 0.0, -4.0), ("b", "kid", 8.0, 4.0)]);
        let (points, _) = per_child_metrics(&recs, &meta).unwrap();
        assert!((points[0].snr - 6.0).abs() < 1e-12);
        assert!((points[0].c50 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn single_recording_child_reproduces_file_rates() {
        let rec = recording("a", 3.0, 12.0);
        let file_rates = rates(&rec.components).unwrap();
        let meta = table(&[("a", "solo", 1.0, 2.0)]);
        let (points, _) = per_child_metrics(&[rec], &meta).unwrap();
        assert_eq!(points[0].rates, file_rates);
        assert_eq!(points[0].snr, 1.0);
        assert_eq!(points[0].c50, 2.0);
    }

    #[test]
    fn zero_reference_child_is_excluded_with_a_warning() {
        let mut silent = recording("s", 0.0, 1.0);
        silent.components = MetricComponents::ZERO;
        let recs = vec![silent, recording("a", 5.0, 5.0)];
        let meta = table(&[("s", "quiet", 0.0, 0.0), ("a", "loud", 0.0, 0.0)]);
        let (points, warnings) = per_child_metrics(&recs, &meta).unwrap();
        assert_eq!(points.len(), 1);
        assert_eq!(points[0].child_id, "loud");
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("quiet"));
    }

    #[test]
    fn missing_metadata_lists_the_offending_recordings() {
        let recs = vec![recording("a", 1.0, 1.0), recording("b", 1.0, 1.0)];
        let meta = table(&[("a", "kid", 0.0, 0.0)]);
        let err = per_child_metrics(&recs, &meta).unwrap_err();
        match err {
            Error::MissingMetadata(ids) => assert_eq!(ids, vec!["b".to_string()]),
            other => panic!("unexpected error: {other:?}"),
        }
    }

    #[test]
    fn empty_metadata_is_rejected() {
        let recs = vec![recording("a", 1.0, 1.0)];
        assert!(matches!(
            per_child_metrics(&recs, &MetadataTable::new()),
            Err(Error::NoMetadata)
        ));
    }

    #[test]
    fn points_are_ordered_by_child_id() {
        let recs = vec![
            recording("r1", 1.0, 1.0),
            recording("r2", 1.0, 1.0),
            recording("r3", 1.0, 1.0),
        ];
        let meta = table(&[
            ("r1", "zeta", 0.0, 0.0),
            ("r2", "alpha", 0.0, 0.0),
            ("r3", "mid", 0.0, 0.0),
        ]);
        let (points, _) = per_child_metrics(&recs, &meta).unwrap();
        let ids: Vec<&str> = points.iter().map(|p| p.child_id.as_str()).collect();
        assert_eq!(ids, vec!["alpha", "mid", "zeta"]);
    }
}
