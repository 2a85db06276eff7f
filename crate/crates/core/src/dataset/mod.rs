//! Annotation files, MOT-Challenge interchange and dataset statistics.

mod annotations;
mod build;
mod mot;
mod stats;

use thiserror::Error;

pub use annotations::{read_annotations, write_annotations, AnnotationFile, AnnotationFormat, AnnotationHeader};
pub use build::{build_annotations, BuildError};
pub use mot::{annotations_to_tracks, export_mot, import_tracker_results, IdMap};
pub use stats::{compute_stats, CameraStats, DatasetStats, StatsConfig, DEFAULT_SECONDS_PER_INSTANCE};

/// A malformed line in one of the text formats. `line` is 1-based.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        Self { line, message: message.into() }
    }
}
