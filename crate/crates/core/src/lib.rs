//! Hardware-free toolkit for building and scoring multi-camera tracking
//! datasets: trigger-locked capture simulation, pose-stream synchronization,
//! projection-based auto-annotation, MOT-Challenge interchange, and the
//! MOTA / HOTA / IDF1 / AP evaluation suite.

pub mod annotate;
pub mod bbox;
pub mod camera;
pub mod dataset;
pub mod geometry;
pub mod metrics;
mod numfmt;
pub mod scenario;
pub mod sync;
pub mod tracks;

/// Version tag carried by every file this crate writes.
pub const SCHEMA_VERSION: &str = "tomie/1";

pub use annotate::{
    annotate_frame, fit_bbox, project_model, AnnotationRow, EntityCatalog, EntityClass, EntityModel, PoseFrame, Shape,
};
pub use bbox::{iou, BBox};
pub use camera::{Camera, CameraRig, Distortion, Intrinsics, Projection};
pub use geometry::{relative_pose, EulerXyz, Pose, Rotation};
pub use tracks::{Frame, TrackSequence, TrackedBox};
