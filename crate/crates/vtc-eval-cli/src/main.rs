//! Batch command line front end wiring score decoding, interval metrics,
//! and the analysis reports together.
//!
//! Exit codes follow a fixed contract so shell pipelines can tell bad input
//! from bugs: 0 on success, 2 on any input or usage error, 3 on an internal
//! invariant violation. Reports go to stdout (or `--out`); warnings and
//! errors go to stderr. Identical inputs and flags produce byte-identical
//! reports regardless of `--jobs`.

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use vtc_eval::analyze::{
    agreement, dataset_stats, per_child_metrics, tune_thresholds, OverlapMode, StatsTable,
};
use vtc_eval::formats::{
    load_scores_path, parse_label_map, parse_metadata, parse_rttm, parse_uem, rttm_to_string,
    LabelMap, ScoreMatrix, DEFAULT_FRAME_STEP,
};
use vtc_eval::metrics::{apply_collar, evaluate_corpus};
use vtc_eval::oracle::{check_cases, RandomCaseConfig};
use vtc_eval::report::{
    build_stratify, render_agreement, render_band_csv, render_eval, render_oracle, render_stats,
    render_stratify, render_tune, StratifyFit,
};
use vtc_eval::{binarize, par, AnnotationSet, DecodeConfig, Error, ReportFormat, VoiceType};

#[derive(Parser)]
#[command(name = "vtc-eval", version)]
#[command(about = "Decode, score, and analyze voice type annotations of long-form recordings")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Worker count for data-parallel stages (default: one per core).
    #[arg(long, global = true, env = "VTC_EVAL_JOBS", value_name = "N")]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Decode per-frame score files into an RTTM of labeled segments.
    Decode(DecodeArgs),
    /// Score a hypothesis RTTM against a reference RTTM.
    Eval(EvalArgs),
    /// Sweep detection thresholds on a development set.
    Tune(TuneArgs),
    /// Score a second annotator against a first on their shared recordings.
    Agree(AgreeArgs),
    /// Tabulate per-class speech durations for one or more corpora.
    Stats(StatsArgs),
    /// Regress per-child error rates on recording conditions.
    Stratify(StratifyArgs),
    /// Check the interval-exact engine against the frame-sampling oracle.
    OracleCheck(OracleArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

impl From<OutputFormat> for ReportFormat {
    fn from(format: OutputFormat) -> ReportFormat {
        match format {
            OutputFormat::Csv => ReportFormat::Csv,
            OutputFormat::Json => ReportFormat::Json,
        }
    }
}

#[derive(Args)]
struct ReportArgs {
    /// Report format; both carry identical numeric content.
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,

    /// Write the report here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DecodeArgs {
    /// Directory of score files (*.csv or *.vtcs); ids are file stems.
    #[arg(long, value_name = "DIR")]
    scores: PathBuf,

    /// Write the decoded RTTM here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Detection threshold for KCHI (sets onset and offset together).
    #[arg(long, value_name = "SCORE")]
    threshold_kchi: Option<f64>,
    /// Detection threshold for OCH (sets onset and offset together).
    #[arg(long, value_name = "SCORE")]
    threshold_och: Option<f64>,
    /// Detection threshold for MAL (sets onset and offset together).
    #[arg(long, value_name = "SCORE")]
    threshold_mal: Option<f64>,
    /// Detection threshold for FEM (sets onset and offset together).
    #[arg(long, value_name = "SCORE")]
    threshold_fem: Option<f64>,

    /// Onset (segment-opening) threshold for KCHI.
    #[arg(long, value_name = "SCORE")]
    onset_kchi: Option<f64>,
    /// Onset (segment-opening) threshold for OCH.
    #[arg(long, value_name = "SCORE")]
    onset_och: Option<f64>,
    /// Onset (segment-opening) threshold for MAL.
    #[arg(long, value_name = "SCORE")]
    onset_mal: Option<f64>,
    /// Onset (segment-opening) threshold for FEM.
    #[arg(long, value_name = "SCORE")]
    onset_fem: Option<f64>,

    /// Offset (segment-sustaining) threshold for KCHI.
    #[arg(long, value_name = "SCORE")]
    offset_kchi: Option<f64>,
    /// Offset (segment-sustaining) threshold for OCH.
    #[arg(long, value_name = "SCORE")]
    offset_och: Option<f64>,
    /// Offset (segment-sustaining) threshold for MAL.
    #[arg(long, value_name = "SCORE")]
    offset_mal: Option<f64>,
    /// Offset (segment-sustaining) threshold for FEM.
    #[arg(long, value_name = "SCORE")]
    offset_fem: Option<f64>,

    /// Drop decoded segments shorter than this (seconds, applied last).
    #[arg(long, value_name = "SECONDS", default_value_t = 0.0)]
    min_on: f64,

    /// Fill silences shorter than this (seconds, applied first).
    #[arg(long, value_name = "SECONDS", default_value_t = 0.0)]
    min_off: f64,

    /// Frame step assumed for single-row score files (seconds).
    #[arg(long, value_name = "SECONDS", default_value_t = DEFAULT_FRAME_STEP)]
    step: f64,
}

#[derive(Args)]
struct EvalArgs {
    /// Reference annotation (RTTM).
    #[arg(long = "ref", value_name = "RTTM")]
    reference: PathBuf,

    /// Hypothesis annotation (RTTM).
    #[arg(long, value_name = "RTTM")]
    hyp: PathBuf,

    /// Evaluation map (UEM) naming the scored regions.
    #[arg(long, value_name = "UEM")]
    uem: PathBuf,

    /// Excise this many seconds around every reference boundary.
    #[arg(long, value_name = "SECONDS", default_value_t = 0.0)]
    collar: f64,

    /// Also report per-recording rows and their unweighted means.
    #[arg(long)]
    per_file: bool,

    /// CSV ("from,to") mapping nonstandard labels into the four classes.
    #[arg(long, value_name = "FILE")]
    label_map: Option<PathBuf>,

    #[command(flatten)]
    report: ReportArgs,
}

#[derive(Args)]
struct TuneArgs {
    /// Directory of development score files (*.csv or *.vtcs).
    #[arg(long, value_name = "DIR")]
    scores: PathBuf,

    /// Reference annotation (RTTM).
    #[arg(long = "ref", value_name = "RTTM")]
    reference: PathBuf,

    /// Evaluation map (UEM) naming the scored regions.
    #[arg(long, value_name = "UEM")]
    uem: PathBuf,

    /// Drop decoded segments shorter than this (seconds) while sweeping.
    #[arg(long, value_name = "SECONDS", default_value_t = 0.0)]
    min_on: f64,

    /// Fill silences shorter than this (seconds) while sweeping.
    #[arg(long, value_name = "SECONDS", default_value_t = 0.0)]
    min_off: f64,

    /// Frame step assumed for single-row score files (seconds).
    #[arg(long, value_name = "SECONDS", default_value_t = DEFAULT_FRAME_STEP)]
    step: f64,

    /// CSV ("from,to") mapping nonstandard labels into the four classes.
    #[arg(long, value_name = "FILE")]
    label_map: Option<PathBuf>,

    #[command(flatten)]
    report: ReportArgs,
}

#[derive(Args)]
struct AgreeArgs {
    /// First annotator's RTTM (treated as the reference).
    #[arg(long, value_name = "RTTM")]
    first: PathBuf,

    /// Second annotator's RTTM (treated as the hypothesis).
    #[arg(long, value_name = "RTTM")]
    second: PathBuf,

    /// Evaluation map (UEM) naming the scored regions.
    #[arg(long, value_name = "UEM")]
    uem: PathBuf,

    /// CSV ("from,to") mapping nonstandard labels into the four classes.
    #[arg(long, value_name = "FILE")]
    label_map: Option<PathBuf>,

    #[command(flatten)]
    report: ReportArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OverlapArg {
    /// Sum entry durations as annotated (overlaps count twice).
    RawSum,
    /// Measure each class's merged support (overlaps count once).
    Merged,
    /// Print one table per mode.
    Both,
}

#[derive(Args)]
struct StatsArgs {
    /// Corpus RTTM files; each corpus is named by its file stem.
    #[arg(required = true, value_name = "RTTM")]
    corpora: Vec<PathBuf>,

    /// Which overlap accounting to print.
    #[arg(long, value_enum, default_value_t = OverlapArg::Both)]
    overlap: OverlapArg,

    /// CSV ("from,to") mapping nonstandard labels into the four classes.
    #[arg(long, value_name = "FILE")]
    label_map: Option<PathBuf>,

    #[command(flatten)]
    report: ReportArgs,
}

#[derive(Args)]
struct StratifyArgs {
    /// Reference annotation (RTTM).
    #[arg(long = "ref", value_name = "RTTM")]
    reference: PathBuf,

    /// Hypothesis annotation (RTTM).
    #[arg(long, value_name = "RTTM")]
    hyp: PathBuf,

    /// Evaluation map (UEM) naming the scored regions.
    #[arg(long, value_name = "UEM")]
    uem: PathBuf,

    /// Per-file metadata CSV ("file_id,child_id,snr,c50").
    #[arg(long, value_name = "CSV")]
    metadata: PathBuf,

    /// Excise this many seconds around every reference boundary.
    #[arg(long, value_name = "SECONDS", default_value_t = 0.0)]
    collar: f64,

    /// CSV ("from,to") mapping nonstandard labels into the four classes.
    #[arg(long, value_name = "FILE")]
    label_map: Option<PathBuf>,

    #[command(flatten)]
    report: ReportArgs,
}

#[derive(Args)]
struct OracleArgs {
    /// Number of seeded cases to run.
    #[arg(long, default_value_t = 100, value_name = "N")]
    cases: usize,

    /// First seed; cases use consecutive seeds.
    #[arg(long, default_value_t = 1, value_name = "SEED")]
    seed: u64,

    /// Oracle sampling step (seconds).
    #[arg(long, default_value_t = 0.010, value_name = "SECONDS")]
    step: f64,

    /// Evaluated duration of each case (seconds).
    #[arg(long, default_value_t = 60.0, value_name = "SECONDS")]
    duration: f64,

    #[command(flatten)]
    report: ReportArgs,
}

/// A user-facing failure paired with its exit code.
#[derive(Debug)]
struct Failure {
    message: String,
    code: u8,
}

impl Failure {
    fn input(message: impl Into<String>) -> Failure {
        Failure {
            message: message.into(),
            code: 2,
        }
    }

    fn internal(message: impl Into<String>) -> Failure {
        Failure {
            message: message.into(),
            code: 3,
        }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Failure {
        match err {
            Error::Internal(message) => Failure::internal(message),
            other => Failure::input(other.to_string()),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let jobs = cli.jobs;
    let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| {
        par::with_jobs(jobs, || dispatch(cli.command))
    }));
    match outcome {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(failure)) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
        Err(panic) => {
            eprintln!("error: internal invariant violation: {}", panic_text(&panic));
            ExitCode::from(3)
        }
    }
}

fn panic_text(panic: &(dyn std::any::Any + Send)) -> &str {
    if let Some(text) = panic.downcast_ref::<&str>() {
        text
    } else if let Some(text) = panic.downcast_ref::<String>() {
        text
    } else {
        "unknown panic payload"
    }
}

fn dispatch(command: Command) -> CliResult<()> {
    match command {
        Command::Decode(args) => run_decode(args),
        Command::Eval(args) => run_eval(args),
        Command::Tune(args) => run_tune(args),
        Command::Agree(args) => run_agree(args),
        Command::Stats(args) => run_stats(args),
        Command::Stratify(args) => run_stratify(args),
        Command::OracleCheck(args) => run_oracle_check(args),
    }
}

fn run_decode(args: DecodeArgs) -> CliResult<()> {
    let config = decode_config(&args)?;
    let matrices = load_score_dir(&args.scores, args.step)?;
    let decoded = par::map_ordered(&matrices, |matrix| binarize(matrix, &config));
    let mut annotations = AnnotationSet::new();
    for result in decoded {
        let annotation = result?;
        let id = annotation.recording_id().to_string();
        if annotations.insert(id.clone(), annotation).is_some() {
            return Err(Failure::input(format!(
                "duplicate recording id \"{id}\" in {}",
                args.scores.display()
            )));
        }
    }
    emit(args.out.as_deref(), &rttm_to_string(&annotations))
}

fn run_eval(args: EvalArgs) -> CliResult<()> {
    let label_map = load_label_map(args.label_map.as_deref())?;
    let references = with_path(
        parse_rttm(open(&args.reference)?, label_map.as_ref()),
        &args.reference,
    )?;
    let hypotheses = with_path(parse_rttm(open(&args.hyp)?, label_map.as_ref()), &args.hyp)?;
    let eval_map = with_path(parse_uem(open(&args.uem)?), &args.uem)?;
    let eval_map = collared(&eval_map, &references, args.collar)?;

    let evaluation = evaluate_corpus(&references, &hypotheses, &eval_map)?;
    let report = render_eval(&evaluation, args.per_file, args.report.format.into())?;
    emit(args.report.out.as_deref(), &report)
}

fn run_tune(args: TuneArgs) -> CliResult<()> {
    let label_map = load_label_map(args.label_map.as_deref())?;
    let matrices = load_score_dir(&args.scores, args.step)?;
    let references = with_path(
        parse_rttm(open(&args.reference)?, label_map.as_ref()),
        &args.reference,
    )?;
    let eval_map = with_path(parse_uem(open(&args.uem)?), &args.uem)?;
    let base = DecodeConfig::default()
        .with_min_duration_on(args.min_on)
        .with_min_duration_off(args.min_off);

    let result = tune_thresholds(&matrices, &references, &eval_map, &base)?;
    emit(
        args.report.out.as_deref(),
        &render_tune(&result, args.report.format.into()),
    )
}

fn run_agree(args: AgreeArgs) -> CliResult<()> {
    let label_map = load_label_map(args.label_map.as_deref())?;
    let first = with_path(parse_rttm(open(&args.first)?, label_map.as_ref()), &args.first)?;
    let second = with_path(
        parse_rttm(open(&args.second)?, label_map.as_ref()),
        &args.second,
    )?;
    let eval_map = with_path(parse_uem(open(&args.uem)?), &args.uem)?;

    let report = agreement(&first, &second, &eval_map)?;
    emit(
        args.report.out.as_deref(),
        &render_agreement(&report, args.report.format.into()),
    )
}

fn run_stats(args: StatsArgs) -> CliResult<()> {
    let label_map = load_label_map(args.label_map.as_deref())?;
    let mut corpora = Vec::with_capacity(args.corpora.len());
    for path in &args.corpora {
        let annotations = with_path(parse_rttm(open(path)?, label_map.as_ref()), path)?;
        corpora.push((corpus_name(path), annotations));
    }

    let tables: Vec<StatsTable> = match args.overlap {
        OverlapArg::RawSum => vec![dataset_stats(&corpora, OverlapMode::RawSum)],
        OverlapArg::Merged => vec![dataset_stats(&corpora, OverlapMode::Merged)],
        OverlapArg::Both => vec![
            dataset_stats(&corpora, OverlapMode::RawSum),
            dataset_stats(&corpora, OverlapMode::Merged),
        ],
    };
    emit(
        args.report.out.as_deref(),
        &render_stats(&tables, args.report.format.into()),
    )
}

fn run_stratify(args: StratifyArgs) -> CliResult<()> {
    let label_map = load_label_map(args.label_map.as_deref())?;
    let references = with_path(
        parse_rttm(open(&args.reference)?, label_map.as_ref()),
        &args.reference,
    )?;
    let hypotheses = with_path(parse_rttm(open(&args.hyp)?, label_map.as_ref()), &args.hyp)?;
    let eval_map = with_path(parse_uem(open(&args.uem)?), &args.uem)?;
    let eval_map = collared(&eval_map, &references, args.collar)?;
    let metadata = with_path(parse_metadata(open(&args.metadata)?), &args.metadata)?;

    let evaluation = evaluate_corpus(&references, &hypotheses, &eval_map)?;
    let (points, warnings) = per_child_metrics(&evaluation.per_recording, &metadata)?;
    for warning in &warnings {
        eprintln!("warning: {warning}");
    }
    let report = build_stratify(points);
    for warning in &report.warnings {
        eprintln!("warning: {warning}");
    }
    emit(
        args.report.out.as_deref(),
        &render_stratify(&report, args.report.format.into()),
    )?;

    // Plot-ready side files, one per fitted band, next to the main report.
    if args.report.format == OutputFormat::Csv {
        if let Some(out) = &args.report.out {
            for fit in &report.fits {
                if let Some(csv) = render_band_csv(fit) {
                    emit(Some(&band_path(out, fit)), &csv)?;
                }
            }
        }
    }
    Ok(())
}

fn run_oracle_check(args: OracleArgs) -> CliResult<()> {
    if args.cases == 0 {
        return Err(Failure::input("oracle-check needs at least one case"));
    }
    if !(args.step > 0.0) {
        return Err(Failure::input(format!(
            "sampling step must be positive, got {}",
            args.step
        )));
    }
    if !(args.duration > 0.0) {
        return Err(Failure::input(format!(
            "case duration must be positive, got {}",
            args.duration
        )));
    }
    let config = RandomCaseConfig {
        duration: args.duration,
        ..RandomCaseConfig::default()
    };

    let report = check_cases(args.cases, args.seed, &config, args.step);
    emit(
        args.report.out.as_deref(),
        &render_oracle(&report, args.report.format.into()),
    )?;
    if !report.all_within_bound() {
        return Err(Failure::internal(
            "oracle deviation exceeded the boundary-count bound",
        ));
    }
    Ok(())
}

/// Build the decode configuration from the per-class flags. `--threshold-*`
/// sets both thresholds of a class; `--onset-*` / `--offset-*` then override
/// one side.
fn decode_config(args: &DecodeArgs) -> CliResult<DecodeConfig> {
    let mut config = DecodeConfig::default()
        .with_min_duration_on(args.min_on)
        .with_min_duration_off(args.min_off);
    let thresholds = [
        (VoiceType::KeyChild, args.threshold_kchi),
        (VoiceType::OtherChild, args.threshold_och),
        (VoiceType::MaleAdult, args.threshold_mal),
        (VoiceType::FemaleAdult, args.threshold_fem),
    ];
    for (class, threshold) in thresholds {
        if let Some(threshold) = threshold {
            config = config.with_threshold(class, threshold);
        }
    }
    let onsets = [
        (VoiceType::KeyChild, args.onset_kchi),
        (VoiceType::OtherChild, args.onset_och),
        (VoiceType::MaleAdult, args.onset_mal),
        (VoiceType::FemaleAdult, args.onset_fem),
    ];
    for (class, onset) in onsets {
        if let Some(onset) = onset {
            config = config.with_onset(class, onset);
        }
    }
    let offsets = [
        (VoiceType::KeyChild, args.offset_kchi),
        (VoiceType::OtherChild, args.offset_och),
        (VoiceType::MaleAdult, args.offset_mal),
        (VoiceType::FemaleAdult, args.offset_fem),
    ];
    for (class, offset) in offsets {
        if let Some(offset) = offset {
            config = config.with_offset(class, offset);
        }
    }
    if let Err(err) = config.validate() {
        let message = match err {
            Error::Parse { message, .. } => message,
            other => other.to_string(),
        };
        return Err(Failure::input(message));
    }
    Ok(config)
}

/// Load every score file in `dir` (sorted by name for determinism).
fn load_score_dir(dir: &Path, default_step: f64) -> CliResult<Vec<ScoreMatrix>> {
    let entries = std::fs::read_dir(dir)
        .map_err(|err| Failure::input(format!("{}: {err}", dir.display())))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|path| {
            path.is_file()
                && path
                    .extension()
                    .and_then(|e| e.to_str())
                    .is_some_and(|e| e == "csv" || e == "vtcs")
        })
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Failure::input(format!(
            "no input: no score files (*.csv or *.vtcs) in {}",
            dir.display()
        )));
    }

    let mut matrices = Vec::with_capacity(paths.len());
    for path in &paths {
        let parse = with_path(load_scores_path(path, default_step), path)?;
        for warning in &parse.warnings {
            eprintln!("warning: {}: {warning}", path.display());
        }
        matrices.push(parse.matrix);
    }
    Ok(matrices)
}

fn load_label_map(path: Option<&Path>) -> CliResult<Option<LabelMap>> {
    match path {
        None => Ok(None),
        Some(path) => Ok(Some(with_path(parse_label_map(open(path)?), path)?)),
    }
}

fn collared(
    eval_map: &vtc_eval::EvalMap,
    references: &AnnotationSet,
    collar: f64,
) -> CliResult<vtc_eval::EvalMap> {
    if !(collar >= 0.0) {
        return Err(Failure::input(format!(
            "collar must be non-negative, got {collar}"
        )));
    }
    Ok(apply_collar(eval_map, references, collar))
}

fn corpus_name(path: &Path) -> String {
    path.file_stem()
        .and_then(|s| s.to_str())
        .map(str::to_string)
        .unwrap_or_else(|| path.display().to_string())
}

fn band_path(out: &Path, fit: &StratifyFit) -> PathBuf {
    let stem = out
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("stratify");
    out.with_file_name(format!("{stem}.band.{}.{}.csv", fit.x_var, fit.y_var))
}

fn open(path: &Path) -> CliResult<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|err| Failure::input(format!("{}: {err}", path.display())))
}

/// Prefix a library error with the file it came from, so parse failures name
/// both the file and the line.
fn with_path<T>(result: vtc_eval::Result<T>, path: &Path) -> CliResult<T> {
    result.map_err(|err| {
        let failure = Failure::from(err);
        Failure {
            message: format!("{}: {}", path.display(), failure.message),
            code: failure.code,
        }
    })
}

/// Write a report to the given path or stdout, ending with one newline.
fn emit(out: Option<&Path>, content: &str) -> CliResult<()> {
    let mut text = content.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|err| Failure::input(format!("{}: {err}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|err| Failure::input(format!("stdout: {err}")))
        }
    }
}
