//! Interval-exact detection and identification metrics, plus frame log-loss.
//!
//! Identification metrics integrate over homogeneous regions. On a region of
//! duration `d` with reference set `R` and hypothesis set `H`:
//!
//! ```text
//! correct     += d·|R∩H|
//! confusion   += d·min(|R\H|, |H\R|)
//! miss        += d·max(0, |R\H| − |H\R|)
//! false_alarm += d·max(0, |H\R| − |R\H|)
//! total_ref   += d·|R|
//! ```
//!
//! All accumulation is in integer nanoseconds, so the identity
//! `correct + miss + confusion = total_reference` holds exactly.

use crate::core::annotation::{Annotation, AnnotationSet, EvalMap};
use crate::core::label::{VoiceType, NUM_CLASSES};
use crate::core::region::{decompose_over, Region};
use crate::core::span::TimeSpan;
use crate::core::time::{nanos_to_secs, secs_to_nanos, TimePoint};
use crate::core::timeline::Timeline;
use crate::error::{Error, Result};
use crate::formats::scores::{LabelMatrix, ScoreMatrix};
use crate::par;

/// Probability clamp applied inside the log-loss, preventing infinities on
/// saturated scores.
pub const LOG_LOSS_CLAMP: f64 = 1e-7;

/// Durations of the identification outcome classes, in nanoseconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MetricComponents {
    correct_nanos: i64,
    miss_nanos: i64,
    false_alarm_nanos: i64,
    confusion_nanos: i64,
    total_reference_nanos: i64,
}

impl MetricComponents {
    pub const ZERO: MetricComponents = MetricComponents {
        correct_nanos: 0,
        miss_nanos: 0,
        false_alarm_nanos: 0,
        confusion_nanos: 0,
        total_reference_nanos: 0,
    };

    pub fn from_regions<'a>(regions: impl IntoIterator<Item = &'a Region>) -> MetricComponents {
        let mut c = MetricComponents::ZERO;
        for region in regions {
            c.accumulate(region);
        }
        debug_assert_eq!(
            c.correct_nanos + c.miss_nanos + c.confusion_nanos,
            c.total_reference_nanos
        );
        c
    }

    /// Add one homogeneous region's contribution.
    pub fn accumulate(&mut self, region: &Region) {
        let d = region.span.duration_nanos();
        let r = region.ref_labels;
        let h = region.hyp_labels;
        let both = r.intersection(h).len() as i64;
        let ref_only = r.difference(h).len() as i64;
        let hyp_only = h.difference(r).len() as i64;
        self.correct_nanos += d * both;
        self.confusion_nanos += d * ref_only.min(hyp_only);
        self.miss_nanos += d * (ref_only - hyp_only).max(0);
        self.false_alarm_nanos += d * (hyp_only - ref_only).max(0);
        self.total_reference_nanos += d * r.len() as i64;
    }

    pub fn merge(&mut self, other: &MetricComponents) {
        self.correct_nanos += other.correct_nanos;
        self.miss_nanos += other.miss_nanos;
        self.false_alarm_nanos += other.false_alarm_nanos;
        self.confusion_nanos += other.confusion_nanos;
        self.total_reference_nanos += other.total_reference_nanos;
    }

    pub fn correct_nanos(&self) -> i64 {
        self.correct_nanos
    }

    pub fn miss_nanos(&self) -> i64 {
        self.miss_nanos
    }

    pub fn false_alarm_nanos(&self) -> i64 {
        self.false_alarm_nanos
    }

    pub fn confusion_nanos(&self) -> i64 {
        self.confusion_nanos
    }

    pub fn total_reference_nanos(&self) -> i64 {
        self.total_reference_nanos
    }

    pub fn correct_secs(&self) -> f64 {
        nanos_to_secs(self.correct_nanos)
    }

    pub fn miss_secs(&self) -> f64 {
        nanos_to_secs(self.miss_nanos)
    }

    pub fn false_alarm_secs(&self) -> f64 {
        nanos_to_secs(self.false_alarm_nanos)
    }

    pub fn confusion_secs(&self) -> f64 {
        nanos_to_secs(self.confusion_nanos)
    }

    pub fn total_reference_secs(&self) -> f64 {
        nanos_to_secs(self.total_reference_nanos)
    }
}

/// Per-class support durations for detection scoring, in nanoseconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DetectionCounts {
    intersection_nanos: i64,
    reference_nanos: i64,
    hypothesis_nanos: i64,
}

impl DetectionCounts {
    pub const ZERO: DetectionCounts = DetectionCounts {
        intersection_nanos: 0,
        reference_nanos: 0,
        hypothesis_nanos: 0,
    };

    pub fn new(intersection_nanos: i64, reference_nanos: i64, hypothesis_nanos: i64) -> DetectionCounts {
        DetectionCounts {
            intersection_nanos,
            reference_nanos,
            hypothesis_nanos,
        }
    }

    pub fn merge(&mut self, other: &DetectionCounts) {
        self.intersection_nanos += other.intersection_nanos;
        self.reference_nanos += other.reference_nanos;
        self.hypothesis_nanos += other.hypothesis_nanos;
    }

    pub fn intersection_nanos(&self) -> i64 {
        self.intersection_nanos
    }

    pub fn reference_nanos(&self) -> i64 {
        self.reference_nanos
    }

    pub fn hypothesis_nanos(&self) -> i64 {
        self.hypothesis_nanos
    }

    pub fn intersection_secs(&self) -> f64 {
        nanos_to_secs(self.intersection_nanos)
    }

    pub fn reference_secs(&self) -> f64 {
        nanos_to_secs(self.reference_nanos)
    }

    pub fn hypothesis_secs(&self) -> f64 {
        nanos_to_secs(self.hypothesis_nanos)
    }
}

/// Precision, recall, and their harmonic mean, each in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f_score: f64,
}

/// Detection precision/recall/F with fixed conventions for empty sides:
/// both empty → (1, 1, 1); empty hypothesis against speech → precision 0;
/// empty reference under hypothesis speech → recall 0.
pub fn prf(counts: &DetectionCounts) -> Prf {
    let i = counts.intersection_nanos as f64;
    let r = counts.reference_nanos;
    let h = counts.hypothesis_nanos;
    let (precision, recall) = if r == 0 && h == 0 {
        (1.0, 1.0)
    } else {
        (
            if h == 0 { 0.0 } else { i / h as f64 },
            if r == 0 { 0.0 } else { i / r as f64 },
        )
    };
    let f_score = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Prf {
        precision,
        recall,
        f_score,
    }
}

/// Identification error rate and component percentages.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rates {
    pub ier: f64,
    pub pct_correct: f64,
    pub pct_miss: f64,
    pub pct_false_alarm: f64,
    pub pct_confusion: f64,
}

/// Rates are ratios against total reference duration and are undefined when
/// it is zero.
pub fn rates(components: &MetricComponents) -> Result<Rates> {
    let total = components.total_reference_nanos;
    if total == 0 {
        return Err(Error::NoReferenceSpeech);
    }
    let total = total as f64;
    let pct = |nanos: i64| nanos as f64 / total * 100.0;
    Ok(Rates {
        ier: (components.miss_nanos + components.false_alarm_nanos + components.confusion_nanos)
            as f64
            / total,
        pct_correct: pct(components.correct_nanos),
        pct_miss: pct(components.miss_nanos),
        pct_false_alarm: pct(components.false_alarm_nanos),
        pct_confusion: pct(components.confusion_nanos),
    })
}

/// Unweighted mean of the four per-class F-scores.
pub fn macro_average(per_class_f: &[f64; NUM_CLASSES]) -> f64 {
    per_class_f.iter().sum::<f64>() / NUM_CLASSES as f64
}

/// Identification components for one recording pair, over the recording's
/// evaluation timeline.
pub fn identification_components(
    reference: &Annotation,
    hypothesis: &Annotation,
    eval_map: &EvalMap,
) -> Result<MetricComponents> {
    if reference.recording_id() != hypothesis.recording_id() {
        return Err(Error::RecordingMismatch {
            reference: reference.recording_id().to_string(),
            hypothesis: hypothesis.recording_id().to_string(),
        });
    }
    let timeline = eval_map
        .get(reference.recording_id())
        .ok_or_else(|| Error::UnknownRecording(reference.recording_id().to_string()))?;
    Ok(identification_components_over(reference, hypothesis, timeline))
}

/// Identification components against an explicit evaluation timeline.
pub fn identification_components_over(
    reference: &Annotation,
    hypothesis: &Annotation,
    eval: &Timeline,
) -> MetricComponents {
    MetricComponents::from_regions(&decompose_over(reference, hypothesis, eval))
}

/// Detection counts for one class of one recording pair.
pub fn detection_counts(
    reference: &Annotation,
    hypothesis: &Annotation,
    eval_map: &EvalMap,
    class: VoiceType,
) -> Result<DetectionCounts> {
    if reference.recording_id() != hypothesis.recording_id() {
        return Err(Error::RecordingMismatch {
            reference: reference.recording_id().to_string(),
            hypothesis: hypothesis.recording_id().to_string(),
        });
    }
    let timeline = eval_map
        .get(reference.recording_id())
        .ok_or_else(|| Error::UnknownRecording(reference.recording_id().to_string()))?;
    Ok(detection_counts_over(reference, hypothesis, timeline, class))
}

/// Detection counts for one class against an explicit evaluation timeline.
pub fn detection_counts_over(
    reference: &Annotation,
    hypothesis: &Annotation,
    eval: &Timeline,
    class: VoiceType,
) -> DetectionCounts {
    let eval = eval.support();
    let ref_support = reference.class_support(class).intersection(&eval);
    let hyp_support = hypothesis.class_support(class).intersection(&eval);
    DetectionCounts {
        intersection_nanos: ref_support.intersection(&hyp_support).duration_nanos(),
        reference_nanos: ref_support.duration_nanos(),
        hypothesis_nanos: hyp_support.duration_nanos(),
    }
}

/// Detection counts for all four classes at once.
pub fn detection_counts_all_over(
    reference: &Annotation,
    hypothesis: &Annotation,
    eval: &Timeline,
) -> [DetectionCounts; NUM_CLASSES] {
    VoiceType::ALL.map(|class| detection_counts_over(reference, hypothesis, eval, class))
}

/// Mean binary cross-entropy over frames, summed over classes, with scores
/// clamped to `[LOG_LOSS_CLAMP, 1 − LOG_LOSS_CLAMP]`. Empty matrices yield
/// zero loss.
pub fn log_loss(labels: &LabelMatrix, scores: &ScoreMatrix) -> Result<f64> {
    if !labels.grid().matches(scores.grid()) {
        return Err(Error::GeometryMismatch(format!(
            "labels {:?} vs scores {:?}",
            labels.grid(),
            scores.grid()
        )));
    }
    let frames = labels.num_frames();
    if frames == 0 {
        return Ok(0.0);
    }
    let mut total = 0.0f64;
    for i in 0..frames {
        let row = labels.row(i);
        for class in VoiceType::ALL {
            let y = row.contains(class);
            let s = (scores.score(i, class) as f64).clamp(LOG_LOSS_CLAMP, 1.0 - LOG_LOSS_CLAMP);
            total -= if y { s.ln() } else { (1.0 - s).ln() };
        }
    }
    Ok(total / frames as f64)
}

/// One recording's exact metric state.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordingEvaluation {
    pub recording_id: String,
    pub components: MetricComponents,
    pub detection: [DetectionCounts; NUM_CLASSES],
}

/// Corpus-level pooled metrics plus the per-recording breakdown.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusEvaluation {
    pub per_recording: Vec<RecordingEvaluation>,
    pub pooled_components: MetricComponents,
    pub pooled_detection: [DetectionCounts; NUM_CLASSES],
}

impl CorpusEvaluation {
    pub fn pooled_prf(&self) -> [Prf; NUM_CLASSES] {
        self.pooled_detection.map(|c| prf(&c))
    }

    /// Macro-average F over the pooled per-class scores, as a fraction.
    pub fn pooled_macro_f(&self) -> f64 {
        macro_average(&self.pooled_prf().map(|p| p.f_score))
    }

    /// Per-class mean F over recordings plus its macro average, `None` when
    /// there are no recordings.
    pub fn per_file_mean_f(&self) -> Option<([f64; NUM_CLASSES], f64)> {
        if self.per_recording.is_empty() {
            return None;
        }
        let n = self.per_recording.len() as f64;
        let mut sums = [0.0f64; NUM_CLASSES];
        for rec in &self.per_recording {
            for (sum, counts) in sums.iter_mut().zip(&rec.detection) {
                *sum += prf(counts).f_score;
            }
        }
        let means = sums.map(|s| s / n);
        Some((means, macro_average(&means)))
    }
}

/// Evaluate every recording in the evaluation map; recordings absent from
/// either annotation set count as silence on that side.
///
/// Annotated recordings missing from the map are an error (their entries
/// would otherwise be silently ignored).
pub fn evaluate_corpus(
    references: &AnnotationSet,
    hypotheses: &AnnotationSet,
    eval_map: &EvalMap,
) -> Result<CorpusEvaluation> {
    let mut unknown: Vec<&str> = references
        .keys()
        .chain(hypotheses.keys())
        .filter(|id| !eval_map.contains(id))
        .map(String::as_str)
        .collect();
    unknown.sort_unstable();
    unknown.dedup();
    if !unknown.is_empty() {
        return Err(Error::UnknownRecording(unknown.join(", ")));
    }

    let ids: Vec<&str> = eval_map.recording_ids().collect();
    let per_recording = par::map_ordered(&ids, |&id| {
        let timeline = eval_map.get(id).expect("validated above");
        let empty = Annotation::new(id);
        let reference = references.get(id).unwrap_or(&empty);
        let hypothesis = hypotheses.get(id).unwrap_or(&empty);
        RecordingEvaluation {
            recording_id: id.to_string(),
            components: identification_components_over(reference, hypothesis, timeline),
            detection: detection_counts_all_over(reference, hypothesis, timeline),
        }
    });

    let mut pooled_components = MetricComponents::ZERO;
    let mut pooled_detection = [DetectionCounts::ZERO; NUM_CLASSES];
    for rec in &per_recording {
        pooled_components.merge(&rec.components);
        for (pooled, counts) in pooled_detection.iter_mut().zip(&rec.detection) {
            pooled.merge(counts);
        }
    }
    Ok(CorpusEvaluation {
        per_recording,
        pooled_components,
        pooled_detection,
    })
}

/// Excise `±collar` seconds around every reference entry boundary from the
/// evaluation map, for boundary-sensitivity analyses.
pub fn apply_collar(eval_map: &EvalMap, references: &AnnotationSet, collar: f64) -> EvalMap {
    if collar <= 0.0 {
        return eval_map.clone();
    }
    let collar_nanos = secs_to_nanos(collar);
    let mut out = EvalMap::new();
    for (id, timeline) in eval_map.iter() {
        let holes: Timeline = references
            .get(id)
            .map(|annotation| {
                annotation
                    .entries()
                    .iter()
                    .flat_map(|(span, _)| [span.onset(), span.offset()])
                    .map(|b| {
                        TimeSpan::from_points(
                            TimePoint::from_nanos((b.as_nanos() - collar_nanos).max(0)),
                            TimePoint::from_nanos(b.as_nanos() + collar_nanos),
                        )
                    })
                    .collect()
            })
            .unwrap_or_default();
        out.insert(id, timeline.subtract(&holes.support()));
    }
    out
}
