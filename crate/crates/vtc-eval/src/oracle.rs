//! Brute-force frame-sampling reference implementation.
//!
//! Everything here trades speed for obviousness: labels are sampled one
//! frame at a time by scanning every entry, and metrics are summed frame by
//! frame. The interval-exact engine is validated against these
//! implementations on seeded random cases; as the sampling step shrinks, the
//! frame sums converge to the exact values, with per-component deviation
//! bounded by (number of distinct boundary points) × step.

use std::collections::BTreeSet;

use crate::core::annotation::{Annotation, EvalMap};
use crate::core::grid::FrameGrid;
use crate::core::label::{LabelSet, VoiceType, NUM_CLASSES};
use crate::core::region::Region;
use crate::core::span::TimeSpan;
use crate::core::time::TimePoint;
use crate::core::timeline::Timeline;
use crate::error::{Error, Result};
use crate::formats::scores::LabelMatrix;
use crate::metrics::{DetectionCounts, MetricComponents};

/// Deterministic 64-bit generator with the SplitMix64 state update, chosen
/// so fixtures can be reproduced in any language from the three constants
/// below.
///
/// ```text
/// state += 0x9E3779B97F4A7C15
/// z = state; z = (z ^ (z >> 30)) · 0xBF58476D1CE4E5B9
/// z = (z ^ (z >> 27)) · 0x94D049BB133111EB
/// output = z ^ (z >> 31)
/// ```
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> SplitMix64 {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn next_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + self.next_f64() * (hi - lo)
    }

    pub fn next_bool(&mut self, probability: f64) -> bool {
        self.next_f64() < probability
    }

    /// Exponential with the given mean (inverse-CDF of `1 − u`).
    pub fn next_exp(&mut self, mean: f64) -> f64 {
        -mean * (1.0 - self.next_f64()).ln()
    }
}

/// Sample an annotation onto a grid by testing each frame midpoint against
/// every entry. Deliberately naive; must agree with the fast labelizer.
pub fn sample_labels(annotation: &Annotation, grid: &FrameGrid) -> LabelMatrix {
    let mut labels = LabelMatrix::zeros(annotation.recording_id(), *grid);
    for i in 0..grid.count() {
        let midpoint = grid.midpoint(i);
        for (span, label) in annotation.entries() {
            if span.contains(midpoint) {
                labels.set(i, *label, true);
            }
        }
    }
    labels
}

/// Active label set at one instant, by scanning every entry.
pub fn labels_at(annotation: &Annotation, at: TimePoint) -> LabelSet {
    annotation
        .entries()
        .iter()
        .filter(|(span, _)| span.contains(at))
        .map(|(_, label)| *label)
        .collect()
}

/// Frame-counting metrics: every frame is treated as one homogeneous region
/// of duration `step`.
pub fn frame_metrics(
    ref_labels: &LabelMatrix,
    hyp_labels: &LabelMatrix,
) -> Result<(MetricComponents, [DetectionCounts; NUM_CLASSES])> {
    if !ref_labels.grid().matches(hyp_labels.grid()) {
        return Err(Error::GeometryMismatch(format!(
            "reference {:?} vs hypothesis {:?}",
            ref_labels.grid(),
            hyp_labels.grid()
        )));
    }
    let step_nanos = ref_labels.grid().step_nanos();
    let mut components = MetricComponents::ZERO;
    let mut detection = [DetectionCounts::ZERO; NUM_CLASSES];
    for i in 0..ref_labels.num_frames() {
        let (r, h) = (ref_labels.row(i), hyp_labels.row(i));
        components.accumulate(&Region {
            span: TimeSpan::from_points(
                TimePoint::from_nanos(0),
                TimePoint::from_nanos(step_nanos),
            ),
            ref_labels: r,
            hyp_labels: h,
        });
        for class in VoiceType::ALL {
            let (in_ref, in_hyp) = (r.contains(class), h.contains(class));
            detection[class.index()].merge(&DetectionCounts::new(
                if in_ref && in_hyp { step_nanos } else { 0 },
                if in_ref { step_nanos } else { 0 },
                if in_hyp { step_nanos } else { 0 },
            ));
        }
    }
    Ok((components, detection))
}

/// Shape of a generated random case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomCaseConfig {
    /// Evaluated duration in seconds; the eval map is `[(0, duration)]`.
    pub duration: f64,
    /// Expected segments per second, per class, per side.
    pub rate: f64,
    /// Mean segment length in seconds.
    pub mean_length: f64,
    /// Probability that the next same-class segment is drawn from the
    /// current segment's onset instead of its offset (allowing overlap).
    pub overlap_probability: f64,
}

impl Default for RandomCaseConfig {
    fn default() -> RandomCaseConfig {
        RandomCaseConfig {
            duration: 60.0,
            rate: 0.08,
            mean_length: 2.5,
            overlap_probability: 0.2,
        }
    }
}

/// Deterministically generate a (reference, hypothesis, eval map) triple.
///
/// Segments that would cross `duration` are dropped rather than clipped, so
/// generated boundaries never coincide with the eval boundary or each other.
pub fn random_case(seed: u64, config: &RandomCaseConfig) -> (Annotation, Annotation, EvalMap) {
    let mut rng = SplitMix64::new(seed);
    let reference = random_annotation(&mut rng, config);
    let hypothesis = random_annotation(&mut rng, config);
    let mut eval_map = EvalMap::new();
    eval_map.insert(
        "case",
        Timeline::from_spans(vec![TimeSpan::new(0.0, config.duration).expect("duration > 0")]),
    );
    (reference, hypothesis, eval_map)
}

fn random_annotation(rng: &mut SplitMix64, config: &RandomCaseConfig) -> Annotation {
    let mut annotation = Annotation::new("case");
    for class in VoiceType::ALL {
        if config.rate <= 0.0 {
            continue;
        }
        let mean_gap = 1.0 / config.rate - config.mean_length;
        let mean_gap = mean_gap.max(0.05);
        let mut cursor = 0.0f64;
        loop {
            let onset = cursor + rng.next_exp(mean_gap);
            let length = rng.next_exp(config.mean_length).max(1e-3);
            let offset = onset + length;
            if offset >= config.duration {
                break;
            }
            annotation.push(TimeSpan::new(onset, offset).expect("generated span"), class);
            cursor = if rng.next_bool(config.overlap_probability) {
                onset + 1e-3
            } else {
                offset
            };
        }
    }
    annotation
}

/// Distinct boundary time points of a pair, the grain of the deviation
/// bound.
pub fn distinct_boundaries(reference: &Annotation, hypothesis: &Annotation) -> usize {
    let mut points = BTreeSet::new();
    for annotation in [reference, hypothesis] {
        for (span, _) in annotation.entries() {
            points.insert(span.onset());
            points.insert(span.offset());
        }
    }
    points.len()
}

/// Worst deviation between the interval-exact engine and the sampling
/// oracle, in seconds, over all five components and all per-class counts.
pub fn max_deviation_secs(
    exact: &(MetricComponents, [DetectionCounts; NUM_CLASSES]),
    sampled: &(MetricComponents, [DetectionCounts; NUM_CLASSES]),
) -> f64 {
    let mut worst = 0i64;
    let pairs = [
        (exact.0.correct_nanos(), sampled.0.correct_nanos()),
        (exact.0.miss_nanos(), sampled.0.miss_nanos()),
        (exact.0.false_alarm_nanos(), sampled.0.false_alarm_nanos()),
        (exact.0.confusion_nanos(), sampled.0.confusion_nanos()),
        (
            exact.0.total_reference_nanos(),
            sampled.0.total_reference_nanos(),
        ),
    ];
    for (a, b) in pairs {
        worst = worst.max((a - b).abs());
    }
    for (e, s) in exact.1.iter().zip(&sampled.1) {
        worst = worst.max((e.intersection_nanos() - s.intersection_nanos()).abs());
        worst = worst.max((e.reference_nanos() - s.reference_nanos()).abs());
        worst = worst.max((e.hypothesis_nanos() - s.hypothesis_nanos()).abs());
    }
    crate::core::time::nanos_to_secs(worst)
}

/// One seeded case compared at one sampling step.
#[derive(Debug, Clone, Copy)]
pub struct CaseDeviation {
    pub seed: u64,
    pub deviation_secs: f64,
    pub bound_secs: f64,
    pub total_reference_secs: f64,
}

impl CaseDeviation {
    pub fn within_bound(&self) -> bool {
        self.deviation_secs <= self.bound_secs
    }
}

/// Run one seeded case: exact engine vs oracle at `step` seconds.
pub fn run_case(seed: u64, config: &RandomCaseConfig, step: f64) -> CaseDeviation {
    let (reference, hypothesis, eval_map) = random_case(seed, config);
    let timeline = eval_map.get("case").expect("generated map");

    let exact = (
        crate::metrics::identification_components_over(&reference, &hypothesis, timeline),
        crate::metrics::detection_counts_all_over(&reference, &hypothesis, timeline),
    );

    let count = (config.duration / step).round() as usize;
    let grid = FrameGrid::new(step, 0.0, count).expect("positive step");
    let sampled = frame_metrics(
        &sample_labels(&reference, &grid),
        &sample_labels(&hypothesis, &grid),
    )
    .expect("identical grids");

    CaseDeviation {
        seed,
        deviation_secs: max_deviation_secs(&exact, &sampled),
        bound_secs: distinct_boundaries(&reference, &hypothesis) as f64 * step,
        total_reference_secs: exact.0.total_reference_secs(),
    }
}

/// Aggregate deviation report over `cases` consecutive seeds.
#[derive(Debug, Clone)]
pub struct DeviationReport {
    pub cases: Vec<CaseDeviation>,
    pub step: f64,
}

impl DeviationReport {
    pub fn max_deviation_secs(&self) -> f64 {
        self.cases
            .iter()
            .map(|c| c.deviation_secs)
            .fold(0.0, f64::max)
    }

    pub fn all_within_bound(&self) -> bool {
        self.cases.iter().all(CaseDeviation::within_bound)
    }
}

/// Run `cases` seeded cases starting at `base_seed`.
pub fn check_cases(
    cases: usize,
    base_seed: u64,
    config: &RandomCaseConfig,
    step: f64,
) -> DeviationReport {
    let seeds: Vec<u64> = (0..cases as u64).map(|i| base_seed.wrapping_add(i)).collect();
    let cases = crate::par::map_ordered(&seeds, |&seed| run_case(seed, config, step));
    DeviationReport { cases, step }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decode::labelize;

    #[test]
    fn splitmix_matches_reference_sequence() {
        // First outputs for seed 42 of the published SplitMix64 algorithm.
        let mut rng = SplitMix64::new(42);
        assert_eq!(rng.next_u64(), 0xBDD7_3226_2FEB_6E95);
        assert_eq!(rng.next_u64(), 0x28EF_E333_B266_F103);
        assert_eq!(rng.next_u64(), 0x4752_6757_130F_9F52);
        assert_eq!(rng.next_u64(), 0x581C_E1FF_0E4A_E394);

        let mut rng = SplitMix64::new(42);
        assert!((rng.next_f64() - 0.741_564_878_771_823_3).abs() < 1e-15);
    }

    #[test]
    fn sampling_covers_full_entries() {
        let mut annotation = Annotation::new("rec");
        annotation.push(TimeSpan::new(0.0, 0.05).unwrap(), VoiceType::KeyChild);
        let grid = FrameGrid::new(0.01, 0.0, 10).unwrap();
        let labels = sample_labels(&annotation, &grid);
        for frame in 0..5 {
            assert!(labels.get(frame, VoiceType::KeyChild));
        }
        for frame in 5..10 {
            assert!(!labels.get(frame, VoiceType::KeyChild));
        }
    }

    #[test]
    fn one_frame_entry_activates_exactly_one_frame() {
        let mut annotation = Annotation::new("rec");
        annotation.push(TimeSpan::new(0.03, 0.04).unwrap(), VoiceType::MaleAdult);
        let grid = FrameGrid::new(0.01, 0.0, 10).unwrap();
        let labels = sample_labels(&annotation, &grid);
        assert_eq!(labels.active_cells(), 1);
        assert!(labels.get(3, VoiceType::MaleAdult));
    }

    #[test]
    fn empty_annotation_samples_to_zero_matrix() {
        let grid = FrameGrid::new(0.01, 0.0, 7).unwrap();
        let labels = sample_labels(&Annotation::new("rec"), &grid);
        assert_eq!(labels.active_cells(), 0);
    }

    #[test]
    fn sampler_agrees_with_fast_labelizer() {
        let config = RandomCaseConfig {
            duration: 20.0,
            ..RandomCaseConfig::default()
        };
        for seed in 0..20 {
            let (reference, _, _) = random_case(seed, &config);
            let grid = FrameGrid::new(0.01, 0.0, 2000).unwrap();
            assert_eq!(
                sample_labels(&reference, &grid),
                labelize(&reference, &grid),
                "seed {seed}"
            );
        }
    }

    #[test]
    fn frame_metrics_identity_and_complement() {
        let grid = FrameGrid::new(0.01, 0.0, 100).unwrap();
        let mut a = LabelMatrix::zeros("rec", grid);
        for frame in 0..50 {
            a.set(frame, VoiceType::KeyChild, true);
        }
        let (components, _) = frame_metrics(&a, &a.clone()).unwrap();
        assert_eq!(components.correct_nanos(), components.total_reference_nanos());
        assert_eq!(components.miss_nanos(), 0);

        let mut b = LabelMatrix::zeros("rec", grid);
        for frame in 50..100 {
            b.set(frame, VoiceType::KeyChild, true);
        }
        let (components, _) = frame_metrics(&a, &b).unwrap();
        assert_eq!(components.correct_nanos(), 0);
        assert_eq!(components.miss_nanos(), 500_000_000);
        assert_eq!(components.false_alarm_nanos(), 500_000_000);
    }

    #[test]
    fn random_case_is_deterministic_in_seed() {
        let config = RandomCaseConfig::default();
        let (r1, h1, m1) = random_case(1, &config);
        let (r2, h2, m2) = random_case(1, &config);
        assert_eq!(r1, r2);
        assert_eq!(h1, h2);
        assert_eq!(m1, m2);
        let (r3, _, _) = random_case(2, &config);
        assert_ne!(r1, r3);
    }

    #[test]
    fn zero_rate_generates_silence() {
        let config = RandomCaseConfig {
            rate: 0.0,
            ..RandomCaseConfig::default()
        };
        let (reference, hypothesis, eval_map) = random_case(5, &config);
        assert!(reference.is_empty());
        assert!(hypothesis.is_empty());
        assert_eq!(
            eval_map.get("case").unwrap().duration_nanos(),
            60_000_000_000
        );
    }

    #[test]
    fn generated_segments_stay_inside_duration() {
        let config = RandomCaseConfig::default();
        for seed in 0..20 {
            let (reference, hypothesis, _) = random_case(seed, &config);
            for annotation in [&reference, &hypothesis] {
                for (span, _) in annotation.entries() {
                    assert!(span.onset().as_nanos() >= 0);
                    assert!(span.offset().as_secs() < config.duration);
                }
            }
        }
    }

    #[test]
    fn deviation_bound_holds_and_halving_step_halves_the_bound() {
        let config = RandomCaseConfig::default();
        let coarse = check_cases(50, 7, &config, 0.02);
        let fine = check_cases(50, 7, &config, 0.01);
        assert!(coarse.all_within_bound());
        assert!(fine.all_within_bound());
        for (c, f) in coarse.cases.iter().zip(&fine.cases) {
            assert!((f.bound_secs - c.bound_secs / 2.0).abs() < 1e-9);
        }
    }
}
