//! Detection-threshold tuning over a development set.
//!
//! Sweeps a shared grid of 101 thresholds (0.00 to 1.00 in steps of 0.01),
//! decodes every development recording at each one, and keeps the threshold
//! that maximizes the pooled per-class F-score. Classes are decoded
//! independently, so one uniform-threshold sweep traces each class's curve
//! exactly as a per-class sweep would: class `c`'s segments depend only on
//! its own threshold.
//!
//! Ties resolve to the lowest threshold; the sweep scans in ascending order
//! and only a strictly greater F replaces the incumbent.

use crate::core::annotation::{Annotation, AnnotationSet, EvalMap};
use crate::core::label::{VoiceType, NUM_CLASSES};
use crate::core::timeline::Timeline;
use crate::decode::{binarize, DecodeConfig};
use crate::error::{Error, Result};
use crate::formats::scores::ScoreMatrix;
use crate::metrics::{detection_counts_all_over, prf, DetectionCounts};
use crate::par;

/// Number of points in the threshold grid.
pub const THRESHOLD_GRID_POINTS: usize = 101;

/// The shared sweep grid: 0.00, 0.01, …, 1.00.
pub fn threshold_grid() -> impl Iterator<Item = f64> {
    (0..THRESHOLD_GRID_POINTS).map(|k| k as f64 / 100.0)
}

/// Best threshold found for one class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassTune {
    pub voice_type: VoiceType,
    pub best_threshold: f64,
    /// Pooled F-score attained at the best threshold, as a fraction.
    pub best_f: f64,
}

/// Full sweep output: the winners plus every grid point's pooled F.
#[derive(Debug, Clone, PartialEq)]
pub struct TuneResult {
    pub per_class: [ClassTune; NUM_CLASSES],
    /// One row per grid threshold: `(threshold, per-class pooled F)`.
    pub sweep: Vec<(f64, [f64; NUM_CLASSES])>,
}

/// Tune per-class detection thresholds on a development set.
///
/// `base` supplies the duration-smoothing parameters, which are held fixed
/// while the thresholds sweep. Reference annotations missing for a
/// development recording count as silence; every development recording must
/// be covered by the evaluation map.
pub fn tune_thresholds(
    dev: &[ScoreMatrix],
    references: &AnnotationSet,
    eval_map: &EvalMap,
    base: &DecodeConfig,
) -> Result<TuneResult> {
    if dev.is_empty() {
        return Err(Error::EmptyDevSet);
    }
    base.validate()?;
    let mut seen: Vec<&str> = Vec::with_capacity(dev.len());
    let mut unknown: Vec<&str> = Vec::new();
    for matrix in dev {
        let id = matrix.recording_id();
        if seen.contains(&id) {
            return Err(Error::Parse {
                line: 0,
                message: format!("duplicate development recording: {id}"),
            });
        }
        seen.push(id);
        if !eval_map.contains(id) {
            unknown.push(id);
        }
    }
    if !unknown.is_empty() {
        unknown.sort_unstable();
        return Err(Error::UnknownRecording(unknown.join(", ")));
    }

    let empty = Annotation::new("");
    let pairs: Vec<(&ScoreMatrix, &Annotation, &Timeline)> = dev
        .iter()
        .map(|matrix| {
            let id = matrix.recording_id();
            let reference = references.get(id).unwrap_or(&empty);
            let timeline = eval_map.get(id).expect("validated above");
            (matrix, reference, timeline)
        })
        .collect();

    let grid: Vec<f64> = threshold_grid().collect();
    let sweep_counts = par::map_ordered(&grid, |&threshold| {
        let config = DecodeConfig::uniform(threshold)
            .with_min_duration_on(base.min_duration_on())
            .with_min_duration_off(base.min_duration_off());
        let mut pooled = [DetectionCounts::ZERO; NUM_CLASSES];
        for (matrix, reference, timeline) in &pairs {
            let hypothesis = binarize(matrix, &config).expect("validated config");
            let counts = detection_counts_all_over(reference, &hypothesis, timeline);
            for (pooled, counts) in pooled.iter_mut().zip(&counts) {
                pooled.merge(counts);
            }
        }
        pooled
    });

    let sweep: Vec<(f64, [f64; NUM_CLASSES])> = grid
        .iter()
        .zip(&sweep_counts)
        .map(|(&threshold, counts)| (threshold, counts.map(|c| prf(&c).f_score)))
        .collect();

    let per_class = VoiceType::ALL.map(|voice_type| {
        let mut best = ClassTune {
            voice_type,
            best_threshold: sweep[0].0,
            best_f: sweep[0].1[voice_type.index()],
        };
        for &(threshold, scores) in &sweep[1..] {
            let f = scores[voice_type.index()];
            if f > best.best_f {
                best.best_threshold = threshold;
                best.best_f = f;
            }
        }
        best
    });

    Ok(TuneResult { per_class, sweep })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::grid::FrameGrid;
    use crate::core::span::TimeSpan;
    use crate::core::timeline::Timeline;
    use crate::decode::labelize;
    use crate::oracle::SplitMix64;

    fn eval_map(id: &str, until: f64) -> EvalMap {
        let mut map = EvalMap::new();
        map.insert(id, Timeline::from_spans(vec![span(0.0, until)]));
        map
    }

    fn span(onset: f64, offset: f64) -> TimeSpan {
        TimeSpan::new(onset, offset).unwrap()
    }

    #[test]
    fn perfect_binary_model_peaks_at_the_lowest_nontrivial_threshold() {
        let mut reference = Annotation::new("rec");
        reference.push(span(0.5, 2.0), VoiceType::KeyChild);
        reference.push(span(1.0, 3.0), VoiceType::FemaleAdult);
        let grid = FrameGrid::new(0.010, 0.0, 400).unwrap();
        let scores = labelize(&reference, &grid).to_scores();

        let mut references = AnnotationSet::new();
        references.insert("rec".to_string(), reference.clone());
        let result = tune_thresholds(
            &[scores],
            &references,
            &eval_map("rec", 4.0),
            &DecodeConfig::default(),
        )
        .unwrap();

        for tune in &result.per_class {
            assert_eq!(tune.best_threshold, 0.01, "{}", tune.voice_type);
            assert_eq!(tune.best_f, 1.0, "{}", tune.voice_type);
        }
    }

    #[test]
    fn ties_resolve_to_the_lowest_threshold() {
        // Constant mid scores: the hypothesis is identical for every
        // threshold at or below the score, so F ties across a long prefix.
        let grid = FrameGrid::new(0.010, 0.0, 100).unwrap();
        let scores = ScoreMatrix::new("rec", grid, vec![0.6; 400]).unwrap();
        let mut reference = Annotation::new("rec");
        for class in VoiceType::ALL {
            reference.push(span(0.0, 1.0), class);
        }
        let mut references = AnnotationSet::new();
        references.insert("rec".to_string(), reference);

        let result = tune_thresholds(
            &[scores],
            &references,
            &eval_map("rec", 1.0),
            &DecodeConfig::default(),
        )
        .unwrap();
        for tune in &result.per_class {
            assert_eq!(tune.best_threshold, 0.0);
            assert_eq!(tune.best_f, 1.0);
        }
    }

    #[test]
    fn empty_development_set_is_rejected() {
        assert!(matches!(
            tune_thresholds(
                &[],
                &AnnotationSet::new(),
                &EvalMap::new(),
                &DecodeConfig::default()
            ),
            Err(Error::EmptyDevSet)
        ));
    }

    #[test]
    fn uncovered_recording_is_rejected() {
        let grid = FrameGrid::new(0.010, 0.0, 10).unwrap();
        let scores = ScoreMatrix::new("missing", grid, vec![0.0; 40]).unwrap();
        let err = tune_thresholds(
            &[scores],
            &AnnotationSet::new(),
            &eval_map("other", 1.0),
            &DecodeConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::UnknownRecording(ids) if ids == "missing"));
    }

    #[test]
    fn duplicate_recording_is_rejected() {
        let grid = FrameGrid::new(0.010, 0.0, 10).unwrap();
        let a = ScoreMatrix::new("rec", grid.clone(), vec![0.0; 40]).unwrap();
        let b = ScoreMatrix::new("rec", grid, vec![0.0; 40]).unwrap();
        let err = tune_thresholds(
            &[a, b],
            &AnnotationSet::new(),
            &eval_map("rec", 1.0),
            &DecodeConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
    }

    #[test]
    fn sweep_covers_the_whole_grid_in_order() {
        let grid = FrameGrid::new(0.010, 0.0, 10).unwrap();
        let scores = ScoreMatrix::new("rec", grid, vec![0.3; 40]).unwrap();
        let result = tune_thresholds(
            &[scores],
            &AnnotationSet::new(),
            &eval_map("rec", 1.0),
            &DecodeConfig::default(),
        )
        .unwrap();
        assert_eq!(result.sweep.len(), THRESHOLD_GRID_POINTS);
        for (k, &(threshold, _)) in result.sweep.iter().enumerate() {
            assert_eq!((threshold * 100.0).round() as usize, k);
        }
    }

    #[test]
    fn winner_matches_a_sweep_rescan() {
        let frames = 500;
        let grid = FrameGrid::new(0.010, 0.0, frames).unwrap();
        let mut rng = SplitMix64::new(99);
        let values: Vec<f32> = (0..frames * NUM_CLASSES)
            .map(|_| rng.next_f64() as f32)
            .collect();
        let scores = ScoreMatrix::new("rec", grid, values).unwrap();
        let mut reference = Annotation::new("rec");
        reference.push(span(0.2, 1.7), VoiceType::KeyChild);
        reference.push(span(2.0, 4.5), VoiceType::FemaleAdult);
        reference.push(span(1.0, 1.4), VoiceType::MaleAdult);
        let mut references = AnnotationSet::new();
        references.insert("rec".to_string(), reference);

        let result = tune_thresholds(
            &[scores],
            &references,
            &eval_map("rec", 5.0),
            &DecodeConfig::default(),
        )
        .unwrap();
        for class in VoiceType::ALL {
            let (mut best_t, mut best_f) = (result.sweep[0].0, result.sweep[0].1[class.index()]);
            for &(threshold, scores) in &result.sweep[1..] {
                if scores[class.index()] > best_f {
                    best_t = threshold;
                    best_f = scores[class.index()];
                }
            }
            let tune = result.per_class[class.index()];
            assert_eq!(tune.best_threshold, best_t);
            assert_eq!(tune.best_f, best_f);
        }
    }
}
