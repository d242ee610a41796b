//! Time, label, and interval primitives shared by every other module.

pub mod annotation;
pub mod grid;
pub mod label;
pub mod region;
pub mod span;
pub mod time;
pub mod timeline;

pub use annotation::{crop, Annotation, AnnotationSet, EvalMap};
pub use grid::FrameGrid;
pub use label::{LabelSet, VoiceType, NUM_CLASSES};
pub use region::{decompose, decompose_over, Region};
pub use span::TimeSpan;
pub use time::{nanos_to_secs, secs_to_nanos, TimePoint, NANOS_PER_SEC};
pub use timeline::Timeline;
