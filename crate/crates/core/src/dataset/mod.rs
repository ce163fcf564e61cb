//! Dataset ingestion, synthetic generators and result export.

pub mod export;
pub mod format;
pub mod synth;

pub use export::{export_series, parse_series_csv, ResultRow, SeriesFormat, SERIES_HEADER};
pub use format::{
    parse_pose_graph, serialize_pose_graph, truncate_prefix, DatasetDescriptor, Dimension,
    ParsedGraph,
};
pub use synth::{random_spd, synth_graph, GraphKind, PhiSource};
