//! Homogeneous-region decomposition.
//!
//! Every interval-exact metric is defined over maximal regions on which both
//! the reference and the hypothesis label sets are constant. The
//! decomposition partitions the evaluated timeline exactly: no gaps, no
//! overlaps, durations summing to the evaluated duration at nanosecond
//! resolution.

use crate::core::annotation::{Annotation, EvalMap};
use crate::core::label::{LabelSet, VoiceType};
use crate::core::span::TimeSpan;
use crate::core::time::TimePoint;
use crate::core::timeline::Timeline;
use crate::error::{Error, Result};

/// A maximal interval on which both label sets are constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Region {
    pub span: TimeSpan,
    pub ref_labels: LabelSet,
    pub hyp_labels: LabelSet,
}

/// Decompose a reference/hypothesis pair into homogeneous regions over the
/// evaluated timeline of their (shared) recording.
pub fn decompose(
    reference: &Annotation,
    hypothesis: &Annotation,
    eval_map: &EvalMap,
) -> Result<Vec<Region>> {
    if reference.recording_id() != hypothesis.recording_id() {
        return Err(Error::RecordingMismatch {
            reference: reference.recording_id().to_string(),
            hypothesis: hypothesis.recording_id().to_string(),
        });
    }
    let timeline = eval_map
        .get(reference.recording_id())
        .ok_or_else(|| Error::UnknownRecording(reference.recording_id().to_string()))?;
    Ok(decompose_over(reference, hypothesis, timeline))
}

/// Sweep event: a label turning on or off on one of the two sides.
#[derive(Debug, Clone, Copy)]
struct Event {
    at: TimePoint,
    label: VoiceType,
    is_reference: bool,
    on: bool,
}

/// Decomposition against an explicit evaluated timeline.
///
/// Both annotations are cropped to the timeline first, so entry boundaries
/// never fall outside it.
pub fn decompose_over(
    reference: &Annotation,
    hypothesis: &Annotation,
    eval: &Timeline,
) -> Vec<Region> {
    let eval = &eval.support();
    let mut events: Vec<Event> = Vec::new();
    let mut push_entries = |annotation: &Annotation, is_reference: bool| {
        for (span, label) in annotation.crop_to_timeline(eval).entries() {
            events.push(Event {
                at: span.onset(),
                label: *label,
                is_reference,
                on: true,
            });
            events.push(Event {
                at: span.offset(),
                label: *label,
                is_reference,
                on: false,
            });
        }
    };
    push_entries(reference, true);
    push_entries(hypothesis, false);
    events.sort_by_key(|e| e.at);

    // Per-side, per-label counts of currently open entries. A label is
    // active while its count is positive, so same-label overlaps contribute
    // their union.
    let mut ref_open = [0u32; 4];
    let mut hyp_open = [0u32; 4];
    let mut regions = Vec::new();
    let mut idx = 0;

    let active = |open: &[u32; 4]| -> LabelSet {
        VoiceType::ALL
            .into_iter()
            .filter(|c| open[c.index()] > 0)
            .collect()
    };

    for window in eval.spans() {
        // Consume events before this window (none should exist after crop,
        // but clipping keeps the sweep robust regardless).
        while idx < events.len() && events[idx].at < window.onset() {
            apply(&mut ref_open, &mut hyp_open, &events[idx]);
            idx += 1;
        }
        let mut cursor = window.onset();
        while idx < events.len() && events[idx].at <= window.offset() {
            let at = events[idx].at;
            if at > cursor {
                regions.push(Region {
                    span: TimeSpan::from_points(cursor, at),
                    ref_labels: active(&ref_open),
                    hyp_labels: active(&hyp_open),
                });
                cursor = at;
            }
            // Apply every event at this boundary before emitting the next
            // region, so coincident boundaries change the sets atomically.
            while idx < events.len() && events[idx].at == at {
                apply(&mut ref_open, &mut hyp_open, &events[idx]);
                idx += 1;
            }
        }
        if cursor < window.offset() {
            regions.push(Region {
                span: TimeSpan::from_points(cursor, window.offset()),
                ref_labels: active(&ref_open),
                hyp_labels: active(&hyp_open),
            });
        }
    }
    regions
}

fn apply(ref_open: &mut [u32; 4], hyp_open: &mut [u32; 4], event: &Event) {
    let open = if event.is_reference { ref_open } else { hyp_open };
    let slot = &mut open[event.label.index()];
    if event.on {
        *slot += 1;
    } else {
        *slot -= 1;
    }
}
