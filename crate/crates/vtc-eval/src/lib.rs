//! Interval-exact evaluation for voice-type classification.
//!
//! The crate measures how well a frame-level multi-label classifier finds
//! four voice types (key child, other children, male adults, female adults)
//! in long-form audio:
//!
//! * [`formats`] reads and writes RTTM annotations, UEM evaluation maps,
//!   score matrices (CSV or binary), metadata tables, and label maps.
//! * [`decode`] turns per-frame scores into labeled segments via hysteresis
//!   thresholds and duration smoothing.
//! * [`metrics`] computes detection precision/recall/F and identification
//!   error components exactly, by decomposing time into homogeneous regions
//!   and integrating in integer nanoseconds.
//! * [`analyze`] layers threshold tuning, per-child stratification with
//!   regression fits, dataset duration tables, and inter-annotator
//!   agreement on top.
//! * [`oracle`] cross-checks the exact engine against an independent
//!   frame-sampling implementation with a provable deviation bound.
//! * [`report`] renders everything as CSV or JSON with fixed decimal
//!   precision.
//!
//! With the default `parallel` feature, corpus-scale loops fan out over a
//! worker pool; results are merged in a fixed order, so output is
//! byte-identical at any worker count, including the sequential build.

pub mod analyze;
pub mod core;
pub mod decode;
pub mod error;
pub mod formats;
pub mod metrics;
pub mod oracle;
pub mod par;
pub mod report;

pub use crate::core::{
    Annotation, AnnotationSet, EvalMap, FrameGrid, LabelSet, TimePoint, TimeSpan, Timeline,
    VoiceType, NUM_CLASSES,
};
pub use decode::{binarize, labelize, DecodeConfig};
pub use error::{Error, Result};
pub use metrics::{evaluate_corpus, CorpusEvaluation, MetricComponents};
pub use report::ReportFormat;
