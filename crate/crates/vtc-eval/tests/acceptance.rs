//! Acceptance gate: one test per criterion, each printing a pass/fail line.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::time::{Duration, Instant};

use vtc_eval::analyze::stats::{dataset_stats, OverlapMode};
use vtc_eval::analyze::{ols_fit, student_t_quantile, tune_thresholds};
use vtc_eval::decode::labelize;
use vtc_eval::formats::scores::{LabelMatrix, ScoreMatrix};
use vtc_eval::metrics::{
    detection_counts_over, evaluate_corpus, identification_components_over, log_loss,
    macro_average, prf, rates, DetectionCounts,
};
use vtc_eval::oracle::{check_cases, random_case, RandomCaseConfig, SplitMix64};
use vtc_eval::report::{render_eval, ReportFormat};
use vtc_eval::{
    binarize, par, Annotation, AnnotationSet, DecodeConfig, EvalMap, FrameGrid, TimeSpan,
    Timeline, VoiceType, NUM_CLASSES,
};

fn span(onset: f64, offset: f64) -> TimeSpan {
    TimeSpan::new(onset, offset).unwrap()
}

fn conclude(number: u32, name: &str, started: Instant, budget: Option<Duration>) {
    let elapsed = started.elapsed();
    if let Some(budget) = budget {
        assert!(
            elapsed <= budget,
            "ACCEPTANCE {number:02} {name}: FAIL (runtime {elapsed:?} exceeds {budget:?})"
        );
    }
    println!("ACCEPTANCE {number:02} {name}: PASS ({elapsed:.2?})");
}

#[test]
fn acceptance_01_macro_average_fixtures() {
    let started = Instant::now();
    // Published per-class F rows and the averages their source prints.
    let rows: [([f64; 4], f64, &str); 3] = [
        ([79.7, 60.4, 67.6, 71.5], 69.8, "69.8"),
        ([68.2, 30.5, 41.2, 63.7], 50.9, "50.9"),
        ([68.4, 20.6, 56.7, 68.9], 53.65, "53.6"),
    ];
    for (scores, expected, displayed) in rows {
        let mean = macro_average(&scores);
        assert!(
            (mean - expected).abs() < 0.05,
            "macro {mean} vs {expected} for {scores:?}"
        );
        assert_eq!(vtc_eval::report::fmt_percent(mean), displayed);
    }
    conclude(1, "macro-average fixtures", started, Some(Duration::from_secs(1)));
}

#[test]
fn acceptance_02_corpus_duration_totals() {
    let started = Instant::now();
    // Eight corpus rows as per-class minutes, and the printed totals row.
    let rows: [(&str, [i64; 4]); 8] = [
        ("corpus-a", [2398, 237, 101, 3885]),
        ("corpus-b", [727, 248, 209, 733]),
        ("corpus-c", [268, 31, 259, 149]),
        ("corpus-d", [5555, 4, 57, 9893]),
        ("corpus-e", [150, 60, 19, 750]),
        ("corpus-f", [3, 2, 1, 3]),
        ("corpus-g", [36, 63, 32, 68]),
        ("corpus-h", [347, 54, 85, 237]),
    ];
    let printed_totals_minutes: [i64; 4] = [9488, 701, 765, 15720];

    let corpora: Vec<(String, AnnotationSet)> = rows
        .iter()
        .map(|(name, minutes)| {
            let mut annotation = Annotation::new("rec");
            for class in VoiceType::ALL {
                let secs = (minutes[class.index()] * 60) as f64;
                annotation.push(span(0.0, secs), class);
            }
            let mut set = AnnotationSet::new();
            set.insert("rec".to_string(), annotation);
            (name.to_string(), set)
        })
        .collect();

    let table = dataset_stats(&corpora, OverlapMode::RawSum);
    const MINUTE: i64 = 60 * 1_000_000_000;
    for class in VoiceType::ALL {
        let total = table.totals.class_nanos[class.index()];
        let printed = printed_totals_minutes[class.index()] * MINUTE;
        assert!(
            (total - printed).abs() <= 5 * MINUTE,
            "{class}: computed {total} vs printed {printed}"
        );
    }
    conclude(2, "corpus duration totals", started, Some(Duration::from_secs(1)));
}

#[test]
fn acceptance_03_oracle_equivalence() {
    let started = Instant::now();
    let config = RandomCaseConfig::default();

    let coarse = check_cases(100, 1, &config, 0.010);
    assert!(
        coarse.all_within_bound(),
        "a case exceeded its boundary-count bound at 10 ms"
    );

    let fine = check_cases(100, 1, &config, 0.001);
    for case in &fine.cases {
        assert!(
            case.deviation_secs <= 0.005 * case.total_reference_secs,
            "seed {}: deviation {} vs 0.5% of reference {}",
            case.seed,
            case.deviation_secs,
            case.total_reference_secs
        );
    }
    conclude(3, "oracle equivalence", started, Some(Duration::from_secs(30)));
}

#[test]
fn acceptance_04_decomposition_identity() {
    let started = Instant::now();
    let config = RandomCaseConfig::default();
    for seed in 0..1000u64 {
        let (reference, hypothesis, eval_map) = random_case(seed, &config);
        let timeline = eval_map.get("case").unwrap();
        let c = identification_components_over(&reference, &hypothesis, timeline);
        assert_eq!(
            c.correct_nanos() + c.miss_nanos() + c.confusion_nanos(),
            c.total_reference_nanos(),
            "identity violated at seed {seed}"
        );
    }
    conclude(4, "decomposition identity", started, Some(Duration::from_secs(10)));
}

#[test]
fn acceptance_05_identity_and_empty_conventions() {
    let started = Instant::now();
    let mut annotation = Annotation::new("rec");
    annotation.push(span(0.0, 10.0), VoiceType::KeyChild);
    annotation.push(span(4.0, 7.0), VoiceType::FemaleAdult);
    let mut set = AnnotationSet::new();
    set.insert("rec".to_string(), annotation.clone());
    let mut eval_map = EvalMap::new();
    eval_map.insert("rec", Timeline::from_spans(vec![span(0.0, 12.0)]));

    // Identical hypothesis: zero error rate, perfect F on every class.
    let evaluation = evaluate_corpus(&set, &set, &eval_map).unwrap();
    let pooled = rates(&evaluation.pooled_components).unwrap();
    assert_eq!(pooled.ier, 0.0);
    assert_eq!(pooled.pct_correct, 100.0);
    for prf in evaluation.pooled_prf() {
        assert_eq!(prf.f_score, 1.0);
    }

    // Empty hypothesis: everything is missed.
    let empty = Annotation::new("rec");
    let timeline = eval_map.get("rec").unwrap();
    let components = identification_components_over(&annotation, &empty, timeline);
    let rates = rates(&components).unwrap();
    assert_eq!(rates.pct_miss, 100.0);
    let counts = detection_counts_over(&annotation, &empty, timeline, VoiceType::KeyChild);
    let detection = prf(&counts);
    assert_eq!(detection.recall, 0.0);
    assert_eq!(detection.precision, 0.0);

    // Both sides empty: the (1, 1, 1) convention.
    let both_empty = prf(&DetectionCounts::ZERO);
    assert_eq!(
        (both_empty.precision, both_empty.recall, both_empty.f_score),
        (1.0, 1.0, 1.0)
    );
    conclude(5, "identity and empty conventions", started, None);
}

#[test]
fn acceptance_06_log_loss_analytics() {
    let started = Instant::now();
    let grid = FrameGrid::new(0.010, 0.0, 250).unwrap();

    // All labels on, all scores at one half: 4·ln 2 per frame.
    let mut labels = LabelMatrix::zeros("rec", grid.clone());
    for frame in 0..250 {
        for class in VoiceType::ALL {
            labels.set(frame, class, true);
        }
    }
    let half = ScoreMatrix::new("rec", grid.clone(), vec![0.5; 250 * NUM_CLASSES]).unwrap();
    let loss = log_loss(&labels, &half).unwrap();
    assert!(
        (loss - 4.0 * std::f64::consts::LN_2).abs() < 1e-9,
        "loss {loss}"
    );

    // Saturated perfect predictions: only the clamp floor remains.
    let mut rng = SplitMix64::new(3);
    let mut varied = LabelMatrix::zeros("rec", grid);
    for frame in 0..250 {
        for class in VoiceType::ALL {
            varied.set(frame, class, rng.next_bool(0.5));
        }
    }
    let perfect = varied.to_scores();
    let loss = log_loss(&varied, &perfect).unwrap();
    assert!(loss <= 5e-7, "saturated loss {loss}");
    conclude(6, "log-loss analytics", started, None);
}

#[test]
fn acceptance_07_decoder_hand_traces_and_monotonicity() {
    let started = Instant::now();
    let kchi_matrix = |scores: &[f32]| {
        let grid = FrameGrid::new(0.010, 0.0, scores.len()).unwrap();
        let mut values = vec![0.0f32; scores.len() * NUM_CLASSES];
        for (frame, &score) in scores.iter().enumerate() {
            values[frame * NUM_CLASSES + VoiceType::KeyChild.index()] = score;
        }
        ScoreMatrix::new("rec", grid, values).unwrap()
    };
    let kchi_segments = |annotation: &Annotation| -> Vec<(f64, f64)> {
        annotation
            .entries()
            .iter()
            .filter(|(_, label)| *label == VoiceType::KeyChild)
            .map(|(span, _)| (span.onset_secs(), span.offset_secs()))
            .collect()
    };
    let close = |a: f64, b: f64| (a - b).abs() < 1e-9;

    // Everything below threshold decodes to silence.
    let silent = binarize(&kchi_matrix(&[0.4; 6]), &DecodeConfig::default()).unwrap();
    assert!(silent.is_empty());

    // Gap filling: a one-frame hole survives with no smoothing and is
    // bridged once min_duration_off exceeds it.
    let gappy = kchi_matrix(&[0.6, 0.6, 0.4, 0.6]);
    let plain = binarize(&gappy, &DecodeConfig::default()).unwrap();
    let segments = kchi_segments(&plain);
    assert_eq!(segments.len(), 2);
    assert!(close(segments[0].0, 0.00) && close(segments[0].1, 0.02));
    assert!(close(segments[1].0, 0.03) && close(segments[1].1, 0.04));
    let bridged = binarize(
        &gappy,
        &DecodeConfig::default().with_min_duration_off(0.015),
    )
    .unwrap();
    let segments = kchi_segments(&bridged);
    assert_eq!(segments.len(), 1);
    assert!(close(segments[0].0, 0.00) && close(segments[0].1, 0.04));

    // Hysteresis: frames above the offset threshold keep a segment open.
    let mut config = DecodeConfig::uniform(0.5);
    for class in VoiceType::ALL {
        config = config.with_onset(class, 0.5).with_offset(class, 0.4);
    }
    let hysteretic = binarize(&kchi_matrix(&[0.6, 0.45, 0.45, 0.3]), &config).unwrap();
    let segments = kchi_segments(&hysteretic);
    assert_eq!(segments.len(), 1);
    assert!(close(segments[0].0, 0.00) && close(segments[0].1, 0.03));

    // Monotonicity across 200 random matrices: raising the threshold never
    // adds decoded speech.
    let mut rng = SplitMix64::new(77);
    for _ in 0..200 {
        let frames = 40 + (rng.next_u64() % 40) as usize;
        let grid = FrameGrid::new(0.010, 0.0, frames).unwrap();
        let values: Vec<f32> = (0..frames * NUM_CLASSES)
            .map(|_| rng.next_f64() as f32)
            .collect();
        let matrix = ScoreMatrix::new("rec", grid, values).unwrap();
        let mut previous: Option<Annotation> = None;
        for k in 0..=10 {
            let decoded =
                binarize(&matrix, &DecodeConfig::uniform(k as f64 / 10.0)).unwrap();
            if let Some(previous) = &previous {
                for class in VoiceType::ALL {
                    let wider = previous.class_support(class);
                    let narrower = decoded.class_support(class);
                    assert_eq!(
                        narrower.intersection(&wider).duration_nanos(),
                        narrower.duration_nanos(),
                        "support grew when raising the threshold"
                    );
                }
            }
            previous = Some(decoded);
        }
    }
    conclude(7, "decoder hand-traces and monotonicity", started, None);
}

#[test]
fn acceptance_08_least_squares_and_t_quantiles() {
    let started = Instant::now();

    // Exact line recovery.
    let points: Vec<(f64, f64)> = (0..8).map(|i| (i as f64, 3.0 * i as f64 - 4.0)).collect();
    let fit = ols_fit(&points).unwrap();
    assert!((fit.slope - 3.0).abs() < 1e-9);
    assert!((fit.intercept + 4.0).abs() < 1e-9);

    // Residual orthogonality on noisy data.
    let mut rng = SplitMix64::new(21);
    let noisy: Vec<(f64, f64)> = (0..40)
        .map(|_| {
            let x = rng.next_range(-5.0, 5.0);
            (x, 1.5 * x + 2.0 + rng.next_range(-1.0, 1.0))
        })
        .collect();
    let fit = ols_fit(&noisy).unwrap();
    let scale: f64 = noisy.iter().map(|&(_, y)| y.abs()).sum::<f64>();
    let (mut sum_e, mut sum_ex) = (0.0, 0.0);
    for &(x, y) in &noisy {
        let e = y - fit.predict(x);
        sum_e += e;
        sum_ex += e * x;
    }
    assert!(sum_e.abs() <= 1e-9 * scale.max(1.0), "Σe = {sum_e}");
    assert!(sum_ex.abs() <= 1e-9 * (5.0 * scale).max(1.0), "Σex = {sum_ex}");

    // Two-sided 95% critical values.
    let table = [
        (3u32, 3.182446305284363),
        (10, 2.2281388519649385),
        (30, 2.0422724563012373),
        (100, 1.9839715184496334),
    ];
    for (dof, expected) in table {
        let got = student_t_quantile(0.975, dof);
        assert!(
            ((got - expected) / expected).abs() < 1e-3,
            "t(0.975, {dof}) = {got}"
        );
    }
    conclude(8, "least squares and t quantiles", started, None);
}

#[test]
fn acceptance_09_threshold_tuning() {
    let started = Instant::now();

    // A perfect 0/1 model: F reaches 1.0, at the lowest nontrivial
    // threshold.
    let mut reference = Annotation::new("rec");
    reference.push(span(0.2, 1.8), VoiceType::KeyChild);
    reference.push(span(1.0, 2.6), VoiceType::OtherChild);
    reference.push(span(0.0, 0.8), VoiceType::MaleAdult);
    reference.push(span(2.0, 3.0), VoiceType::FemaleAdult);
    let grid = FrameGrid::new(0.010, 0.0, 300).unwrap();
    let scores = labelize(&reference, &grid).to_scores();
    let mut references = AnnotationSet::new();
    references.insert("rec".to_string(), reference);
    let mut eval_map = EvalMap::new();
    eval_map.insert("rec", Timeline::from_spans(vec![span(0.0, 3.0)]));

    let result = tune_thresholds(&[scores], &references, &eval_map, &DecodeConfig::default())
        .unwrap();
    for tune in &result.per_class {
        assert_eq!(tune.best_f, 1.0, "{}", tune.voice_type);
        assert_eq!(tune.best_threshold, 0.01, "{}", tune.voice_type);
    }

    // Constant scores tie across a threshold prefix: lowest wins.
    let grid = FrameGrid::new(0.010, 0.0, 100).unwrap();
    let constant = ScoreMatrix::new("rec", grid, vec![0.7; 400]).unwrap();
    let mut full = Annotation::new("rec");
    for class in VoiceType::ALL {
        full.push(span(0.0, 1.0), class);
    }
    let mut references = AnnotationSet::new();
    references.insert("rec".to_string(), full);
    let mut eval_map = EvalMap::new();
    eval_map.insert("rec", Timeline::from_spans(vec![span(0.0, 1.0)]));
    let result = tune_thresholds(&[constant], &references, &eval_map, &DecodeConfig::default())
        .unwrap();
    for tune in &result.per_class {
        assert_eq!(tune.best_f, 1.0);
        assert_eq!(tune.best_threshold, 0.0, "ties must resolve downward");
    }
    conclude(9, "threshold tuning", started, None);
}

#[test]
fn acceptance_10_corpus_scale_performance_and_determinism() {
    let started = Instant::now();

    // 50 recordings × 2 hours = 100 hours; 200 segments per side each,
    // 10,000 reference and 10,000 hypothesis segments in total.
    let mut rng = SplitMix64::new(2024);
    let mut references = AnnotationSet::new();
    let mut hypotheses = AnnotationSet::new();
    let mut eval_map = EvalMap::new();
    let duration = 7200.0;
    for i in 0..50 {
        let id = format!("rec_{i:03}");
        let mut build = || {
            let mut annotation = Annotation::new(&id);
            for _ in 0..200 {
                let length = rng.next_range(0.3, 5.0);
                let onset = rng.next_range(0.0, duration - length);
                let class = VoiceType::ALL[(rng.next_u64() % 4) as usize];
                annotation.push(span(onset, onset + length), class);
            }
            annotation
        };
        references.insert(id.clone(), build());
        hypotheses.insert(id.clone(), build());
        eval_map.insert(id, Timeline::from_spans(vec![span(0.0, duration)]));
    }
    let total_segments: usize = references.values().map(Annotation::len).sum();
    assert_eq!(total_segments, 10_000);

    let timed = Instant::now();
    let single = par::with_jobs(Some(1), || {
        evaluate_corpus(&references, &hypotheses, &eval_map).unwrap()
    });
    let elapsed = timed.elapsed();
    assert!(
        elapsed < Duration::from_secs(1),
        "single-worker evaluation took {elapsed:?}"
    );

    let reference_csv = render_eval(&single, true, ReportFormat::Csv).unwrap();
    let reference_json = render_eval(&single, true, ReportFormat::Json).unwrap();
    for jobs in [Some(2), Some(8), None] {
        let evaluation = par::with_jobs(jobs, || {
            evaluate_corpus(&references, &hypotheses, &eval_map).unwrap()
        });
        assert_eq!(evaluation, single, "results differ at jobs {jobs:?}");
        assert_eq!(
            render_eval(&evaluation, true, ReportFormat::Csv).unwrap(),
            reference_csv,
            "CSV differs at jobs {jobs:?}"
        );
        assert_eq!(
            render_eval(&evaluation, true, ReportFormat::Json).unwrap(),
            reference_json,
            "JSON differs at jobs {jobs:?}"
        );
    }
    conclude(
        10,
        "corpus-scale performance and determinism",
        started,
        None,
    );
}
