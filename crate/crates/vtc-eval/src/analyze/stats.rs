//! Corpus duration statistics in the shape of a dataset summary table.
//!
//! Each named corpus contributes one row of per-class speech durations plus
//! a total. Two overlap conventions are supported:
//!
//! * raw-sum: every annotation entry counts its full length, so overlapping
//!   or duplicated entries are counted as many times as they appear. This is
//!   how cumulated utterance durations are usually reported.
//! * merged: per recording, each class's entries are merged to their support
//!   first, so overlap within a class counts once. The total column then
//!   merges across classes too, giving the amount of audio containing any
//!   speech at all.
//!
//! All arithmetic is in integer nanoseconds; the totals row is exactly the
//! column-wise sum of the corpus rows.

use crate::core::annotation::AnnotationSet;
use crate::core::label::{VoiceType, NUM_CLASSES};

/// How overlapping annotation entries contribute to durations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OverlapMode {
    RawSum,
    Merged,
}

impl OverlapMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            OverlapMode::RawSum => "raw-sum",
            OverlapMode::Merged => "merged",
        }
    }
}

impl std::fmt::Display for OverlapMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One corpus's durations, in nanoseconds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatsRow {
    pub name: String,
    pub class_nanos: [i64; NUM_CLASSES],
    pub total_nanos: i64,
}

/// The duration table: one row per corpus plus an exact totals row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatsTable {
    pub mode: OverlapMode,
    pub rows: Vec<StatsRow>,
    pub totals: StatsRow,
}

/// Tabulate per-class speech durations for a list of named corpora.
///
/// Rows keep the input order; the totals row is named `TOTAL`.
pub fn dataset_stats(corpora: &[(String, AnnotationSet)], mode: OverlapMode) -> StatsTable {
    let rows: Vec<StatsRow> = corpora
        .iter()
        .map(|(name, annotations)| corpus_row(name, annotations, mode))
        .collect();
    let mut totals = StatsRow {
        name: "TOTAL".to_string(),
        class_nanos: [0; NUM_CLASSES],
        total_nanos: 0,
    };
    for row in &rows {
        for (total, value) in totals.class_nanos.iter_mut().zip(&row.class_nanos) {
            *total += value;
        }
        totals.total_nanos += row.total_nanos;
    }
    StatsTable { mode, rows, totals }
}

fn corpus_row(name: &str, annotations: &AnnotationSet, mode: OverlapMode) -> StatsRow {
    let mut class_nanos = [0i64; NUM_CLASSES];
    let mut total_nanos = 0i64;
    for annotation in annotations.values() {
        match mode {
            OverlapMode::RawSum => {
                for class in VoiceType::ALL {
                    class_nanos[class.index()] +=
                        annotation.class_timeline(class).duration_nanos();
                }
                total_nanos += annotation.raw_duration_nanos();
            }
            OverlapMode::Merged => {
                for class in VoiceType::ALL {
                    class_nanos[class.index()] +=
                        annotation.class_support(class).duration_nanos();
                }
                total_nanos += annotation.overall_support().duration_nanos();
            }
        }
    }
    StatsRow {
        name: name.to_string(),
        class_nanos,
        total_nanos,
    }
}
