//! Multi-camera capture simulation and image ↔ pose-stream synchronization.

mod capture;
pub(crate) mod io;
mod matching;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use capture::{
    achieved_fps, check_lock_safety, simulate_capture, CameraCycle, CameraLatency, CaptureCycle, CaptureRun, Latency,
};
pub use io::{
    read_image_log, read_matched, read_pose_stream, write_image_log, write_matched, write_pose_stream, StreamFormat,
};
pub use matching::{filter_invalid, match_pose, match_pose_within, synchronize, MatchedPose, PoseSample};

/// Nominal motion-capture update rate.
pub const POSE_RATE_HZ: f64 = 200.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SyncError {
    #[error("latency must be positive and finite: {0}")]
    InvalidLatency(String),
    #[error("duration must be finite and non-negative, got {0}")]
    InvalidDuration(f64),
    #[error("no cameras")]
    NoCameras,
    #[error("camera {0} listed twice")]
    DuplicateCamera(u8),
    #[error("cameras captured unequal frame counts ({expected} vs {found})")]
    UnequalFrameCounts { expected: usize, found: usize },
    #[error("need at least 2 frames to measure a frame rate, got {0}")]
    TooFewFrames(usize),
}

/// One captured image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageEvent {
    pub camera_id: u8,
    pub frame_index: u64,
    /// Seconds on the shared monotonic clock.
    pub timestamp: f64,
    pub image_path: String,
}

/// Image path relative to the dataset root, e.g. `camera_6/images/3.jpg`.
pub fn image_path(camera_id: u8, frame_index: u64) -> String {
    format!("camera_{camera_id}/images/{frame_index}.jpg")
}

/// Frame number encoded in an image path's file stem (`.../769.jpg` → 769).
pub fn frame_from_image_path(path: &str) -> Option<u64> {
    let name = path.rsplit(['/', '\\']).next()?;
    let stem = name.split_once('.').map_or(name, |(s, _)| s);
    stem.parse().ok()
}
