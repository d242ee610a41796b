//! On-disk interchange formats. All parsers are pure functions over readers
//! and report 1-based line positions in errors, so independent files can be
//! parsed concurrently.

pub mod label_map;
pub mod metadata;
pub mod rttm;
pub mod scores;
pub mod uem;

pub use label_map::{parse_label_map, LabelMap, MappedLabel};
pub use metadata::{parse_metadata, MetadataRow, MetadataTable};
pub use rttm::{parse_rttm, rttm_to_string, write_rttm};
pub use scores::{
    load_scores_path, parse_scores_binary, parse_scores_csv, write_scores_binary,
    write_scores_csv, LabelMatrix, ScoreMatrix, ScoresParse, DEFAULT_FRAME_STEP,
};
pub use uem::parse_uem;
