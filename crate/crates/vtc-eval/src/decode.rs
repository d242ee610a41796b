//! Score-to-segment decoding and its inverse, frame labelization.
//!
//! Each class is decoded independently: a frame opens a segment when its
//! score reaches the class's onset threshold, and the segment stays open
//! while scores hold at or above the offset threshold. Raw segments snap to
//! frame boundaries. Smoothing then runs in a fixed order: gaps shorter than
//! `min_duration_off` are filled first, and only then are segments shorter
//! than `min_duration_on` dropped, which keeps the two parameters orthogonal
//! in effect.

use crate::core::annotation::Annotation;
use crate::core::grid::FrameGrid;
use crate::core::label::{LabelSet, VoiceType, NUM_CLASSES};
use crate::core::span::TimeSpan;
use crate::core::time::{secs_to_nanos, TimePoint};
use crate::error::{Error, Result};
use crate::formats::scores::{LabelMatrix, ScoreMatrix};

/// Per-class thresholds and duration smoothing parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeConfig {
    onset: [f64; NUM_CLASSES],
    offset: [f64; NUM_CLASSES],
    min_duration_on: f64,
    min_duration_off: f64,
}

impl Default for DecodeConfig {
    /// All thresholds at 0.5, no hysteresis, no duration smoothing.
    fn default() -> DecodeConfig {
        DecodeConfig::uniform(0.5)
    }
}

impl DecodeConfig {
    /// Same onset = offset threshold for every class.
    pub fn uniform(threshold: f64) -> DecodeConfig {
        DecodeConfig {
            onset: [threshold; NUM_CLASSES],
            offset: [threshold; NUM_CLASSES],
            min_duration_on: 0.0,
            min_duration_off: 0.0,
        }
    }

    /// Set one class's onset and offset thresholds together.
    pub fn with_threshold(mut self, class: VoiceType, threshold: f64) -> DecodeConfig {
        self.onset[class.index()] = threshold;
        self.offset[class.index()] = threshold;
        self
    }

    pub fn with_onset(mut self, class: VoiceType, threshold: f64) -> DecodeConfig {
        self.onset[class.index()] = threshold;
        self
    }

    pub fn with_offset(mut self, class: VoiceType, threshold: f64) -> DecodeConfig {
        self.offset[class.index()] = threshold;
        self
    }

    pub fn with_min_duration_on(mut self, seconds: f64) -> DecodeConfig {
        self.min_duration_on = seconds;
        self
    }

    pub fn with_min_duration_off(mut self, seconds: f64) -> DecodeConfig {
        self.min_duration_off = seconds;
        self
    }

    pub fn onset(&self, class: VoiceType) -> f64 {
        self.onset[class.index()]
    }

    pub fn offset(&self, class: VoiceType) -> f64 {
        self.offset[class.index()]
    }

    pub fn min_duration_on(&self) -> f64 {
        self.min_duration_on
    }

    pub fn min_duration_off(&self) -> f64 {
        self.min_duration_off
    }

    pub fn validate(&self) -> Result<()> {
        for class in VoiceType::ALL {
            let (on, off) = (self.onset(class), self.offset(class));
            if !on.is_finite() || !off.is_finite() || off < 0.0 || on > 1.0 || off > on {
                return Err(Error::Parse {
                    line: 0,
                    message: format!(
                        "{class} thresholds must satisfy 0 ≤ offset ≤ onset ≤ 1, got onset {on}, offset {off}"
                    ),
                });
            }
        }
        if !(self.min_duration_on >= 0.0) || !(self.min_duration_off >= 0.0) {
            return Err(Error::Parse {
                line: 0,
                message: format!(
                    "minimum durations must be ≥ 0, got on {}, off {}",
                    self.min_duration_on, self.min_duration_off
                ),
            });
        }
        Ok(())
    }
}

/// Decode a score matrix into a (possibly overlapping) multi-label
/// annotation.
pub fn binarize(scores: &ScoreMatrix, config: &DecodeConfig) -> Result<Annotation> {
    config.validate()?;
    let grid = scores.grid();
    let min_on_nanos = secs_to_nanos(config.min_duration_on);
    let min_off_nanos = secs_to_nanos(config.min_duration_off);
    let mut annotation = Annotation::new(scores.recording_id());
    for class in VoiceType::ALL {
        let runs = hysteresis_runs(
            scores.class_scores(class),
            config.onset(class),
            config.offset(class),
        );
        let mut segments: Vec<(i64, i64)> = runs
            .into_iter()
            .map(|(a, b)| (grid.frame_onset_nanos(a), grid.frame_onset_nanos(b)))
            .collect();
        segments = fill_gaps(segments, min_off_nanos);
        segments.retain(|&(a, b)| b - a >= min_on_nanos);
        for (a, b) in segments {
            annotation.push(
                TimeSpan::from_points(TimePoint::from_nanos(a), TimePoint::from_nanos(b)),
                class,
            );
        }
    }
    Ok(annotation)
}

/// Maximal frame runs `[a, b)` under hysteresis thresholding.
fn hysteresis_runs(
    scores: impl Iterator<Item = f32>,
    onset_threshold: f64,
    offset_threshold: f64,
) -> Vec<(usize, usize)> {
    let mut runs = Vec::new();
    let mut open_at: Option<usize> = None;
    let mut count = 0;
    for (i, score) in scores.enumerate() {
        count = i + 1;
        let score = score as f64;
        match open_at {
            None if score >= onset_threshold => open_at = Some(i),
            Some(a) if score < offset_threshold => {
                runs.push((a, i));
                open_at = None;
            }
            _ => {}
        }
    }
    if let Some(a) = open_at {
        runs.push((a, count));
    }
    runs
}

/// Merge consecutive segments whose gap is strictly shorter than
/// `min_gap_nanos`. Input must be sorted and disjoint.
fn fill_gaps(segments: Vec<(i64, i64)>, min_gap_nanos: i64) -> Vec<(i64, i64)> {
    let mut merged: Vec<(i64, i64)> = Vec::with_capacity(segments.len());
    for segment in segments {
        match merged.last_mut() {
            Some(last) if segment.0 - last.1 < min_gap_nanos => last.1 = segment.1,
            _ => merged.push(segment),
        }
    }
    merged
}

/// Rasterize an annotation onto a frame grid: a cell is active iff the
/// frame's midpoint lies inside some entry with that class.
pub fn labelize(reference: &Annotation, grid: &FrameGrid) -> LabelMatrix {
    let mut rows = vec![LabelSet::EMPTY; grid.count()];
    for (span, label) in reference.entries() {
        let (lo, hi) =
            grid.frames_with_midpoint_in(span.onset().as_nanos(), span.offset().as_nanos());
        for row in &mut rows[lo..hi] {
            row.insert(*label);
        }
    }
    LabelMatrix::from_rows(reference.recording_id(), *grid, rows)
        .expect("row count matches grid by construction")
}
