//! Tracking and detection metrics over [`TrackSequence`]s.

mod assignment;
pub mod clear;
pub mod detection;
pub mod hota;
pub mod identity;
pub mod report;

use thiserror::Error;

pub use crate::tracks::TrackSequence;
pub use assignment::max_weight_assignment;
pub use clear::{clear_tallies, match_frame, mota, ClearState, FrameTally, MatchedPair, MotaResult};
pub use detection::{ap_thresholds, detection_ap_ar, DetectionMetrics};
pub use hota::{hota_alpha, hota_alpha_detail, hota_integrated, hota_integrated_detail, hota_thresholds, HotaAlpha};
pub use identity::{idf1, idf1_detail, Idf1Result};
pub use report::{evaluate, format_table, EvalConfig, MetricReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("metric undefined: {0}")]
    Undefined(&'static str),
    #[error("IoU threshold {0} outside (0, 1)")]
    InvalidThreshold(f64),
}

pub(crate) fn check_threshold(alpha: f64) -> Result<(), MetricError> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(MetricError::InvalidThreshold(alpha))
    }
}
