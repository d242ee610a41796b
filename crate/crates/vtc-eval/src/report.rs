//! Report rendering with fixed decimal precision.
//!
//! Every number a report prints goes through decimal string rounding:
//! durations get 3 decimals, percentages 1, ratios 4. Rounding is half-even
//! in decimal, applied after a 12-decimal pre-round that absorbs binary
//! representation noise, so a computed 53.650000000000006 prints as the 53.6
//! a reader of the source tables expects.
//!
//! JSON reports re-parse the formatted strings, which makes the numeric
//! content of the CSV and JSON renderings of a report identical by
//! construction.

use serde_json::{json, Map, Value};

use crate::analyze::child::ChildPoint;
use crate::analyze::ols::{ols_fit, OlsFit};
use crate::analyze::stats::StatsTable;
use crate::analyze::tune::TuneResult;
use crate::analyze::AgreementReport;
use crate::core::label::{VoiceType, NUM_CLASSES};
use crate::error::Result;
use crate::metrics::{rates, CorpusEvaluation, MetricComponents, Rates};
use crate::oracle::DeviationReport;

/// Output format shared by every report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl ReportFormat {
    pub fn as_str(&self) -> &'static str {
        match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
        }
    }
}

/// Fixed-precision decimal rendering with half-even ties.
///
/// The value is first written with 12 decimals (more than any reported
/// quantity carries meaningfully), then rounded to `decimals` in decimal
/// arithmetic. A tie (`…5000…` remainder) rounds to the nearest even digit.
pub fn fmt_fixed(value: f64, decimals: usize) -> String {
    debug_assert!(decimals >= 1 && decimals <= 9);
    if !value.is_finite() {
        return format!("{value}");
    }
    let magnitude = value.abs();
    let coarse = format!("{magnitude:.12}");
    let (int_part, frac_part) = coarse.split_once('.').expect("fixed format has a point");
    let kept = &frac_part[..decimals];
    let rest = frac_part[decimals..].as_bytes();
    let round_up = match rest[0].cmp(&b'5') {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => {
            if rest[1..].iter().any(|&b| b != b'0') {
                true
            } else {
                let last = kept.as_bytes().last().copied().unwrap_or(
                    int_part.as_bytes().last().copied().unwrap_or(b'0'),
                );
                (last - b'0') % 2 == 1
            }
        }
    };
    let mut digits: Vec<u8> = int_part.bytes().chain(kept.bytes()).collect();
    if round_up {
        let mut carried = true;
        for digit in digits.iter_mut().rev() {
            if *digit < b'9' {
                *digit += 1;
                carried = false;
                break;
            }
            *digit = b'0';
        }
        if carried {
            digits.insert(0, b'1');
        }
    }
    let split = digits.len() - decimals;
    let int_str = std::str::from_utf8(&digits[..split]).expect("ascii digits");
    let frac_str = std::str::from_utf8(&digits[split..]).expect("ascii digits");
    let sign = if value < 0.0 && digits.iter().any(|&b| b != b'0') {
        "-"
    } else {
        ""
    };
    format!("{sign}{int_str}.{frac_str}")
}

/// Durations in seconds: 3 decimals.
pub fn fmt_duration(seconds: f64) -> String {
    fmt_fixed(seconds, 3)
}

/// Percentages: 1 decimal.
pub fn fmt_percent(value: f64) -> String {
    fmt_fixed(value, 1)
}

/// Dimensionless ratios (PRF, thresholds, slopes): 4 decimals.
pub fn fmt_ratio(value: f64) -> String {
    fmt_fixed(value, 4)
}

/// Exact millisecond rendering of a non-negative nanosecond count, with a
/// half-even tie at the half-millisecond. Integer arithmetic end to end, so
/// millisecond-aligned times survive a write/read cycle bit for bit.
pub fn fmt_nanos_as_secs3(nanos: i64) -> String {
    debug_assert!(nanos >= 0);
    let mut ms = nanos / 1_000_000;
    let rem = nanos % 1_000_000;
    if rem > 500_000 || (rem == 500_000 && ms % 2 == 1) {
        ms += 1;
    }
    format!("{}.{:03}", ms / 1000, ms % 1000)
}

/// A formatted number as a JSON value, guaranteeing CSV/JSON agreement.
fn num(formatted: &str) -> Value {
    formatted
        .parse::<f64>()
        .map(Value::from)
        .unwrap_or(Value::Null)
}

fn json_string(value: &Value) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("serializable report");
    out.push('\n');
    out
}

fn components_csv(components: &MetricComponents) -> [String; 5] {
    [
        fmt_duration(components.correct_secs()),
        fmt_duration(components.miss_secs()),
        fmt_duration(components.false_alarm_secs()),
        fmt_duration(components.confusion_secs()),
        fmt_duration(components.total_reference_secs()),
    ]
}

fn components_json(components: &MetricComponents) -> Value {
    let [correct, miss, false_alarm, confusion, total_reference] = components_csv(components);
    json!({
        "correct": num(&correct),
        "miss": num(&miss),
        "false_alarm": num(&false_alarm),
        "confusion": num(&confusion),
        "total_reference": num(&total_reference),
    })
}

fn rates_json(rates: &Rates) -> Value {
    json!({
        "pct_correct": num(&fmt_percent(rates.pct_correct)),
        "pct_miss": num(&fmt_percent(rates.pct_miss)),
        "pct_false_alarm": num(&fmt_percent(rates.pct_false_alarm)),
        "pct_confusion": num(&fmt_percent(rates.pct_confusion)),
        "ier": num(&fmt_ratio(rates.ier)),
    })
}

/// Render a corpus evaluation; `per_file` adds the per-recording breakdown.
///
/// Fails only when the pooled reference is empty, in which case the
/// identification rates are undefined.
pub fn render_eval(
    evaluation: &CorpusEvaluation,
    per_file: bool,
    format: ReportFormat,
) -> Result<String> {
    let pooled_rates = rates(&evaluation.pooled_components)?;
    let pooled_prf = evaluation.pooled_prf();
    let macro_f_pct = fmt_percent(evaluation.pooled_macro_f() * 100.0);

    match format {
        ReportFormat::Csv => {
            let mut lines = vec!["class,precision,recall,f_score".to_string()];
            for class in VoiceType::ALL {
                let prf = pooled_prf[class.index()];
                lines.push(format!(
                    "{class},{},{},{}",
                    fmt_ratio(prf.precision),
                    fmt_ratio(prf.recall),
                    fmt_ratio(prf.f_score)
                ));
            }
            lines.push(String::new());
            lines.push("metric,value".to_string());
            lines.push(format!("macro_f_pct,{macro_f_pct}"));
            let [correct, miss, false_alarm, confusion, total_reference] =
                components_csv(&evaluation.pooled_components);
            lines.push(format!("correct_s,{correct}"));
            lines.push(format!("miss_s,{miss}"));
            lines.push(format!("false_alarm_s,{false_alarm}"));
            lines.push(format!("confusion_s,{confusion}"));
            lines.push(format!("total_reference_s,{total_reference}"));
            lines.push(format!("pct_correct,{}", fmt_percent(pooled_rates.pct_correct)));
            lines.push(format!("pct_miss,{}", fmt_percent(pooled_rates.pct_miss)));
            lines.push(format!(
                "pct_false_alarm,{}",
                fmt_percent(pooled_rates.pct_false_alarm)
            ));
            lines.push(format!(
                "pct_confusion,{}",
                fmt_percent(pooled_rates.pct_confusion)
            ));
            lines.push(format!("ier,{}", fmt_ratio(pooled_rates.ier)));

            if per_file {
                lines.push(String::new());
                lines.push("recording_id,class,precision,recall,f_score".to_string());
                for rec in &evaluation.per_recording {
                    for class in VoiceType::ALL {
                        let prf = crate::metrics::prf(&rec.detection[class.index()]);
                        lines.push(format!(
                            "{},{class},{},{},{}",
                            rec.recording_id,
                            fmt_ratio(prf.precision),
                            fmt_ratio(prf.recall),
                            fmt_ratio(prf.f_score)
                        ));
                    }
                }
                lines.push(String::new());
                lines.push(
                    "recording_id,correct_s,miss_s,false_alarm_s,confusion_s,total_reference_s,macro_f_pct,ier"
                        .to_string(),
                );
                for rec in &evaluation.per_recording {
                    let [correct, miss, false_alarm, confusion, total_reference] =
                        components_csv(&rec.components);
                    let per_class: [f64; NUM_CLASSES] =
                        std::array::from_fn(|i| crate::metrics::prf(&rec.detection[i]).f_score);
                    let macro_pct =
                        fmt_percent(crate::metrics::macro_average(&per_class) * 100.0);
                    let ier = rates(&rec.components)
                        .map(|r| fmt_ratio(r.ier))
                        .unwrap_or_default();
                    lines.push(format!(
                        "{},{correct},{miss},{false_alarm},{confusion},{total_reference},{macro_pct},{ier}",
                        rec.recording_id
                    ));
                }
                if let Some((means, macro_mean)) = evaluation.per_file_mean_f() {
                    lines.push(String::new());
                    lines.push("metric,value".to_string());
                    for class in VoiceType::ALL {
                        lines.push(format!(
                            "per_file_mean_f_pct_{class},{}",
                            fmt_percent(means[class.index()] * 100.0)
                        ));
                    }
                    lines.push(format!(
                        "per_file_mean_macro_f_pct,{}",
                        fmt_percent(macro_mean * 100.0)
                    ));
                }
            }
            lines.push(String::new());
            Ok(lines.join("\n"))
        }
        ReportFormat::Json => {
            let mut detection = Map::new();
            for class in VoiceType::ALL {
                let prf = pooled_prf[class.index()];
                detection.insert(
                    class.to_string(),
                    json!({
                        "precision": num(&fmt_ratio(prf.precision)),
                        "recall": num(&fmt_ratio(prf.recall)),
                        "f_score": num(&fmt_ratio(prf.f_score)),
                    }),
                );
            }
            let mut root = Map::new();
            root.insert(
                "pooled".to_string(),
                json!({
                    "detection": Value::Object(detection),
                    "macro_f_pct": num(&macro_f_pct),
                    "components_s": components_json(&evaluation.pooled_components),
                    "rates": rates_json(&pooled_rates),
                }),
            );
            if per_file {
                let mut files = Vec::new();
                for rec in &evaluation.per_recording {
                    let mut detection = Map::new();
                    for class in VoiceType::ALL {
                        let prf = crate::metrics::prf(&rec.detection[class.index()]);
                        detection.insert(
                            class.to_string(),
                            json!({
                                "precision": num(&fmt_ratio(prf.precision)),
                                "recall": num(&fmt_ratio(prf.recall)),
                                "f_score": num(&fmt_ratio(prf.f_score)),
                            }),
                        );
                    }
                    let per_class: [f64; NUM_CLASSES] =
                        std::array::from_fn(|i| crate::metrics::prf(&rec.detection[i]).f_score);
                    let macro_pct =
                        fmt_percent(crate::metrics::macro_average(&per_class) * 100.0);
                    let ier = rates(&rec.components)
                        .map(|r| num(&fmt_ratio(r.ier)))
                        .unwrap_or(Value::Null);
                    files.push(json!({
                        "recording_id": rec.recording_id,
                        "detection": Value::Object(detection),
                        "macro_f_pct": num(&macro_pct),
                        "components_s": components_json(&rec.components),
                        "ier": ier,
                    }));
                }
                root.insert("per_file".to_string(), Value::Array(files));
                if let Some((means, macro_mean)) = evaluation.per_file_mean_f() {
                    let mut f_pct = Map::new();
                    for class in VoiceType::ALL {
                        f_pct.insert(
                            class.to_string(),
                            num(&fmt_percent(means[class.index()] * 100.0)),
                        );
                    }
                    root.insert(
                        "per_file_mean".to_string(),
                        json!({
                            "f_pct": Value::Object(f_pct),
                            "macro_f_pct": num(&fmt_percent(macro_mean * 100.0)),
                        }),
                    );
                }
            }
            Ok(json_string(&Value::Object(root)))
        }
    }
}

/// Render a threshold-tuning result: winners first, then the full sweep.
pub fn render_tune(result: &TuneResult, format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => {
            let mut lines = vec!["class,best_threshold,best_f".to_string()];
            for tune in &result.per_class {
                lines.push(format!(
                    "{},{},{}",
                    tune.voice_type,
                    fmt_ratio(tune.best_threshold),
                    fmt_ratio(tune.best_f)
                ));
            }
            lines.push(String::new());
            lines.push("threshold,KCHI,OCH,MAL,FEM".to_string());
            for &(threshold, scores) in &result.sweep {
                let scores = scores.map(|f| fmt_ratio(f));
                lines.push(format!(
                    "{},{}",
                    fmt_ratio(threshold),
                    scores.join(",")
                ));
            }
            lines.push(String::new());
            lines.join("\n")
        }
        ReportFormat::Json => {
            let mut best = Map::new();
            for tune in &result.per_class {
                best.insert(
                    tune.voice_type.to_string(),
                    json!({
                        "threshold": num(&fmt_ratio(tune.best_threshold)),
                        "f": num(&fmt_ratio(tune.best_f)),
                    }),
                );
            }
            let sweep: Vec<Value> = result
                .sweep
                .iter()
                .map(|&(threshold, scores)| {
                    let mut row = Map::new();
                    row.insert("threshold".to_string(), num(&fmt_ratio(threshold)));
                    for class in VoiceType::ALL {
                        row.insert(
                            class.to_string(),
                            num(&fmt_ratio(scores[class.index()])),
                        );
                    }
                    Value::Object(row)
                })
                .collect();
            json_string(&json!({
                "best": Value::Object(best),
                "sweep": sweep,
            }))
        }
    }
}

/// Render inter-annotator agreement as per-class F percentages plus their
/// macro average, pooled and as a per-file mean.
pub fn render_agreement(report: &AgreementReport, format: ReportFormat) -> String {
    let pooled: [f64; NUM_CLASSES] = report.evaluation.pooled_prf().map(|p| p.f_score * 100.0);
    let pooled_macro = report.evaluation.pooled_macro_f() * 100.0;
    let per_file = report
        .evaluation
        .per_file_mean_f()
        .map(|(means, macro_mean)| (means.map(|f| f * 100.0), macro_mean * 100.0));

    match format {
        ReportFormat::Csv => {
            let mut lines = vec!["aggregation,KCHI,OCH,MAL,FEM,macro".to_string()];
            let row = pooled.map(|f| fmt_percent(f));
            lines.push(format!("pooled,{},{}", row.join(","), fmt_percent(pooled_macro)));
            if let Some((means, macro_mean)) = per_file {
                let row = means.map(|f| fmt_percent(f));
                lines.push(format!(
                    "per_file_mean,{},{}",
                    row.join(","),
                    fmt_percent(macro_mean)
                ));
            }
            lines.push(String::new());
            lines.push("metric,value".to_string());
            lines.push(format!(
                "shared_recordings,{}",
                report.shared_recordings.len()
            ));
            lines.push(String::new());
            lines.join("\n")
        }
        ReportFormat::Json => {
            let f_map = |values: [f64; NUM_CLASSES], macro_f: f64| {
                let mut map = Map::new();
                for class in VoiceType::ALL {
                    map.insert(
                        class.to_string(),
                        num(&fmt_percent(values[class.index()])),
                    );
                }
                map.insert("macro".to_string(), num(&fmt_percent(macro_f)));
                Value::Object(map)
            };
            let mut root = Map::new();
            root.insert("pooled".to_string(), f_map(pooled, pooled_macro));
            if let Some((means, macro_mean)) = per_file {
                root.insert("per_file_mean".to_string(), f_map(means, macro_mean));
            }
            root.insert(
                "shared_recordings".to_string(),
                Value::from(report.shared_recordings.len()),
            );
            json_string(&Value::Object(root))
        }
    }
}

/// Render one or more dataset duration tables (one per overlap mode).
pub fn render_stats(tables: &[StatsTable], format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => {
            let mut lines = vec!["mode,corpus,kchi_s,och_s,mal_s,fem_s,total_s".to_string()];
            for table in tables {
                for row in table.rows.iter().chain(std::iter::once(&table.totals)) {
                    let classes = row
                        .class_nanos
                        .map(|nanos| fmt_duration(crate::core::time::nanos_to_secs(nanos)));
                    lines.push(format!(
                        "{},{},{},{}",
                        table.mode,
                        row.name,
                        classes.join(","),
                        fmt_duration(crate::core::time::nanos_to_secs(row.total_nanos))
                    ));
                }
            }
            lines.push(String::new());
            lines.join("\n")
        }
        ReportFormat::Json => {
            let tables: Vec<Value> = tables
                .iter()
                .map(|table| {
                    let row_json = |row: &crate::analyze::StatsRow| {
                        let mut map = Map::new();
                        map.insert("corpus".to_string(), Value::from(row.name.clone()));
                        for class in VoiceType::ALL {
                            map.insert(
                                format!("{}_s", class.to_string().to_lowercase()),
                                num(&fmt_duration(crate::core::time::nanos_to_secs(
                                    row.class_nanos[class.index()],
                                ))),
                            );
                        }
                        map.insert(
                            "total_s".to_string(),
                            num(&fmt_duration(crate::core::time::nanos_to_secs(
                                row.total_nanos,
                            ))),
                        );
                        Value::Object(map)
                    };
                    json!({
                        "mode": table.mode.as_str(),
                        "rows": table.rows.iter().map(row_json).collect::<Vec<_>>(),
                        "totals": row_json(&table.totals),
                    })
                })
                .collect();
            json_string(&json!({ "tables": tables }))
        }
    }
}

/// The predictors a stratified report regresses on.
pub const STRATIFY_X_VARS: [&str; 2] = ["snr", "c50"];
/// The outcome rates a stratified report regresses.
pub const STRATIFY_Y_VARS: [&str; 4] = ["pct_miss", "pct_false_alarm", "pct_confusion", "pct_correct"];
/// Points per fitted confidence band.
pub const BAND_POINTS: usize = 101;

/// One regression of an outcome rate on an acoustic condition.
#[derive(Debug, Clone, PartialEq)]
pub struct StratifyFit {
    pub x_var: &'static str,
    pub y_var: &'static str,
    pub fit: OlsFit,
    /// Fitted line with its 95% band, sampled across the predictor range;
    /// `None` when the band is undefined (two points).
    pub band: Option<Vec<BandPoint>>,
}

/// One plot-ready band sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandPoint {
    pub x: f64,
    pub y_fit: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Per-child points plus every (condition, rate) regression that could be
/// fitted; fits that were skipped are explained in `warnings`.
#[derive(Debug, Clone, PartialEq)]
pub struct StratifyReport {
    pub points: Vec<ChildPoint>,
    pub fits: Vec<StratifyFit>,
    pub warnings: Vec<String>,
}

fn point_x(point: &ChildPoint, x_var: &str) -> f64 {
    match x_var {
        "snr" => point.snr,
        "c50" => point.c50,
        other => unreachable!("unknown predictor {other}"),
    }
}

fn point_y(point: &ChildPoint, y_var: &str) -> f64 {
    match y_var {
        "pct_miss" => point.rates.pct_miss,
        "pct_false_alarm" => point.rates.pct_false_alarm,
        "pct_confusion" => point.rates.pct_confusion,
        "pct_correct" => point.rates.pct_correct,
        other => unreachable!("unknown outcome {other}"),
    }
}

/// Fit every outcome rate against every acoustic condition.
///
/// Degenerate regressions (too few children, or no variance in the
/// condition) are skipped with a warning instead of failing the report;
/// two-point fits keep the line but omit the band, with a notice.
pub fn build_stratify(points: Vec<ChildPoint>) -> StratifyReport {
    let mut fits = Vec::new();
    let mut warnings = Vec::new();
    for x_var in STRATIFY_X_VARS {
        for y_var in STRATIFY_Y_VARS {
            let pairs: Vec<(f64, f64)> = points
                .iter()
                .map(|p| (point_x(p, x_var), point_y(p, y_var)))
                .collect();
            let fit = match ols_fit(&pairs) {
                Ok(fit) => fit,
                Err(error) => {
                    warnings.push(format!("skipped {y_var} vs {x_var}: {error}"));
                    continue;
                }
            };
            let band = if fit.t_critical.is_some() {
                let lo = pairs.iter().map(|&(x, _)| x).fold(f64::INFINITY, f64::min);
                let hi = pairs
                    .iter()
                    .map(|&(x, _)| x)
                    .fold(f64::NEG_INFINITY, f64::max);
                let step = (hi - lo) / (BAND_POINTS - 1) as f64;
                Some(
                    (0..BAND_POINTS)
                        .map(|i| {
                            let x = lo + step * i as f64;
                            let (ci_low, ci_high) = fit.ci_band(x).expect("t defined");
                            BandPoint {
                                x,
                                y_fit: fit.predict(x),
                                ci_low,
                                ci_high,
                            }
                        })
                        .collect(),
                )
            } else {
                warnings.push(format!(
                    "{y_var} vs {x_var}: two points interpolate exactly; confidence band omitted"
                ));
                None
            };
            fits.push(StratifyFit {
                x_var,
                y_var,
                fit,
                band,
            });
        }
    }
    StratifyReport {
        points,
        fits,
        warnings,
    }
}

/// Render the stratified report: child points, fit parameters, and bands.
pub fn render_stratify(report: &StratifyReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => {
            let mut lines = vec![
                "child_id,snr,c50,pct_miss,pct_false_alarm,pct_confusion,pct_correct,total_reference_s,recordings"
                    .to_string(),
            ];
            for point in &report.points {
                lines.push(format!(
                    "{},{},{},{},{},{},{},{},{}",
                    point.child_id,
                    fmt_ratio(point.snr),
                    fmt_ratio(point.c50),
                    fmt_percent(point.rates.pct_miss),
                    fmt_percent(point.rates.pct_false_alarm),
                    fmt_percent(point.rates.pct_confusion),
                    fmt_percent(point.rates.pct_correct),
                    fmt_duration(point.components.total_reference_secs()),
                    point.recordings
                ));
            }
            lines.push(String::new());
            lines.push(
                "x_var,y_var,slope,intercept,n,residual_std,slope_se,intercept_se,t_critical"
                    .to_string(),
            );
            for fit in &report.fits {
                lines.push(format!(
                    "{},{},{},{},{},{},{},{},{}",
                    fit.x_var,
                    fit.y_var,
                    fmt_ratio(fit.fit.slope),
                    fmt_ratio(fit.fit.intercept),
                    fit.fit.n,
                    fmt_ratio(fit.fit.residual_std),
                    fmt_ratio(fit.fit.slope_se),
                    fmt_ratio(fit.fit.intercept_se),
                    fit.fit
                        .t_critical
                        .map(|t| fmt_ratio(t))
                        .unwrap_or_default()
                ));
            }
            let banded: Vec<&StratifyFit> =
                report.fits.iter().filter(|f| f.band.is_some()).collect();
            if !banded.is_empty() {
                lines.push(String::new());
                lines.push("x_var,y_var,x,y_fit,ci_low,ci_high".to_string());
                for fit in banded {
                    for point in fit.band.as_ref().expect("filtered") {
                        lines.push(format!(
                            "{},{},{},{},{},{}",
                            fit.x_var,
                            fit.y_var,
                            fmt_ratio(point.x),
                            fmt_ratio(point.y_fit),
                            fmt_ratio(point.ci_low),
                            fmt_ratio(point.ci_high)
                        ));
                    }
                }
            }
            lines.push(String::new());
            lines.join("\n")
        }
        ReportFormat::Json => {
            let points: Vec<Value> = report
                .points
                .iter()
                .map(|point| {
                    json!({
                        "child_id": point.child_id,
                        "snr": num(&fmt_ratio(point.snr)),
                        "c50": num(&fmt_ratio(point.c50)),
                        "pct_miss": num(&fmt_percent(point.rates.pct_miss)),
                        "pct_false_alarm": num(&fmt_percent(point.rates.pct_false_alarm)),
                        "pct_confusion": num(&fmt_percent(point.rates.pct_confusion)),
                        "pct_correct": num(&fmt_percent(point.rates.pct_correct)),
                        "total_reference_s": num(&fmt_duration(point.components.total_reference_secs())),
                        "recordings": point.recordings,
                    })
                })
                .collect();
            let fits: Vec<Value> = report
                .fits
                .iter()
                .map(|fit| {
                    let band = fit.band.as_ref().map(|band| {
                        band.iter()
                            .map(|p| {
                                json!({
                                    "x": num(&fmt_ratio(p.x)),
                                    "y_fit": num(&fmt_ratio(p.y_fit)),
                                    "ci_low": num(&fmt_ratio(p.ci_low)),
                                    "ci_high": num(&fmt_ratio(p.ci_high)),
                                })
                            })
                            .collect::<Vec<_>>()
                    });
                    json!({
                        "x_var": fit.x_var,
                        "y_var": fit.y_var,
                        "slope": num(&fmt_ratio(fit.fit.slope)),
                        "intercept": num(&fmt_ratio(fit.fit.intercept)),
                        "n": fit.fit.n,
                        "residual_std": num(&fmt_ratio(fit.fit.residual_std)),
                        "slope_se": num(&fmt_ratio(fit.fit.slope_se)),
                        "intercept_se": num(&fmt_ratio(fit.fit.intercept_se)),
                        "t_critical": fit
                            .fit
                            .t_critical
                            .map(|t| num(&fmt_ratio(t)))
                            .unwrap_or(Value::Null),
                        "band": band.map(Value::Array).unwrap_or(Value::Null),
                    })
                })
                .collect();
            json_string(&json!({ "points": points, "fits": fits }))
        }
    }
}

/// Plot-ready band CSV for one fit, with the pinned header.
pub fn render_band_csv(fit: &StratifyFit) -> Option<String> {
    let band = fit.band.as_ref()?;
    let mut lines = vec!["x,y_fit,ci_low,ci_high".to_string()];
    for point in band {
        lines.push(format!(
            "{},{},{},{}",
            fmt_ratio(point.x),
            fmt_ratio(point.y_fit),
            fmt_ratio(point.ci_low),
            fmt_ratio(point.ci_high)
        ));
    }
    lines.push(String::new());
    Some(lines.join("\n"))
}

/// Render an oracle deviation report. Deviations carry 6 decimals: they live
/// well below the duration precision and are the whole point of the check.
pub fn render_oracle(report: &DeviationReport, format: ReportFormat) -> String {
    let max_bound = report
        .cases
        .iter()
        .map(|c| c.bound_secs)
        .fold(0.0, f64::max);
    match format {
        ReportFormat::Csv => {
            let mut lines = vec!["metric,value".to_string()];
            lines.push(format!("cases,{}", report.cases.len()));
            lines.push(format!("step_s,{}", fmt_fixed(report.step, 6)));
            lines.push(format!(
                "max_deviation_s,{}",
                fmt_fixed(report.max_deviation_secs(), 6)
            ));
            lines.push(format!("max_bound_s,{}", fmt_fixed(max_bound, 6)));
            lines.push(format!("all_within_bound,{}", report.all_within_bound()));
            lines.push(String::new());
            lines.join("\n")
        }
        ReportFormat::Json => json_string(&json!({
            "cases": report.cases.len(),
            "step_s": num(&fmt_fixed(report.step, 6)),
            "max_deviation_s": num(&fmt_fixed(report.max_deviation_secs(), 6)),
            "max_bound_s": num(&fmt_fixed(max_bound, 6)),
            "all_within_bound": report.all_within_bound(),
        })),
    }
}
