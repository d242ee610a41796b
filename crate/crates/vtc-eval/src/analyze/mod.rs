//! Analyses layered on top of the exact metric engine: threshold tuning,
//! per-child stratification with regression fits, dataset duration tables,
//! and inter-annotator agreement.

pub mod agreement;
pub mod child;
pub mod ols;
pub mod stats;
pub mod tune;

pub use agreement::{agreement, AgreementReport};
pub use child::{per_child_metrics, ChildPoint};
pub use ols::{ols_fit, student_t_quantile, OlsFit};
pub use stats::{dataset_stats, OverlapMode, StatsRow, StatsTable};
pub use tune::{threshold_grid, tune_thresholds, ClassTune, TuneResult, THRESHOLD_GRID_POINTS};
