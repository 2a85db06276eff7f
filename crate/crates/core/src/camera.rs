//! Pinhole camera with Brown–Conrady distortion, and the camera-rig file.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{EulerXyz, GeometryError, Pose, Rotation};
use crate::SCHEMA_VERSION;

#[derive(Debug, Error)]
pub enum CameraError {
    #[error("invalid intrinsics for camera {camera}: {reason}")]
    InvalidIntrinsics { camera: u8, reason: String },
    #[error("non-finite point")]
    NonFinitePoint,
    #[error("camera {camera}: {source}")]
    Pose { camera: u8, source: GeometryError },
    #[error("rig file: {0}")]
    Rig(String),
    #[error("rig file is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// Three radial and two tangential coefficients (OpenCV ordering).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Distortion {
    #[serde(default)]
    pub k1: f64,
    #[serde(default)]
    pub k2: f64,
    #[serde(default)]
    pub k3: f64,
    #[serde(default)]
    pub p1: f64,
    #[serde(default)]
    pub p2: f64,
}

impl Distortion {
    pub fn is_zero(&self) -> bool {
        *self == Self::default()
    }

    /// Maps ideal normalized coordinates to distorted normalized coordinates.
    pub fn apply(&self, x: f64, y: f64) -> (f64, f64) {
        let r2 = x * x + y * y;
        let radial = 1.0 + r2 * (self.k1 + r2 * (self.k2 + r2 * self.k3));
        let xd = x * radial + 2.0 * self.p1 * x * y + self.p2 * (r2 + 2.0 * x * x);
        let yd = y * radial + self.p1 * (r2 + 2.0 * y * y) + 2.0 * self.p2 * x * y;
        (xd, yd)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Intrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: u32,
    pub height: u32,
    #[serde(default)]
    pub distortion: Distortion,
}

/// Image size used when a rig does not say otherwise (2 MP sensor).
pub const DEFAULT_WIDTH: u32 = 1920;
pub const DEFAULT_HEIGHT: u32 = 1200;

impl Intrinsics {
    pub fn validate(&self, camera: u8) -> Result<(), CameraError> {
        let bad = |reason: &str| Err(CameraError::InvalidIntrinsics { camera, reason: reason.to_string() });
        let d = &self.distortion;
        let all = [self.fx, self.fy, self.cx, self.cy, d.k1, d.k2, d.k3, d.p1, d.p2];
        if all.iter().any(|v| !v.is_finite()) {
            return bad("non-finite value");
        }
        if self.width == 0 || self.height == 0 {
            return bad("image size must be positive");
        }
        if self.fx <= 0.0 || self.fy <= 0.0 {
            return bad("focal lengths must be positive");
        }
        if !(0.0..self.width as f64).contains(&self.cx) || !(0.0..self.height as f64).contains(&self.cy) {
            return bad("principal point outside the image");
        }
        Ok(())
    }

    /// Lens distortion applied to normalized image coordinates.
    pub fn distort(&self, x: f64, y: f64) -> (f64, f64) {
        self.distortion.apply(x, y)
    }

    /// Projects a point given in the camera frame (mm, z forward, x right, y down).
    pub fn project_point(&self, p: &Vector3<f64>) -> Result<Projection, CameraError> {
        if p.iter().any(|v| !v.is_finite()) {
            return Err(CameraError::NonFinitePoint);
        }
        Ok(self.project_finite(p))
    }

    pub(crate) fn project_finite(&self, p: &Vector3<f64>) -> Projection {
        if p.z <= 0.0 {
            return Projection::BehindCamera;
        }
        let (xd, yd) = self.distort(p.x / p.z, p.y / p.z);
        Projection::Pixel { u: self.fx * xd + self.cx, v: self.fy * yd + self.cy }
    }
}

/// Outcome of projecting one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Projection {
    Pixel { u: f64, v: f64 },
    BehindCamera,
}

impl Projection {
    pub fn pixel(&self) -> Option<(f64, f64)> {
        match *self {
            Projection::Pixel { u, v } => Some((u, v)),
            Projection::BehindCamera => None,
        }
    }
}

/// A calibrated camera: intrinsics plus its pose in the world frame
/// (`T_world←camera`).
#[derive(Debug, Clone, PartialEq)]
pub struct Camera {
    pub id: u8,
    pub intrinsics: Intrinsics,
    pub pose: Pose,
}

/// Serialized form of a pose: position in mm, intrinsic XYZ radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoseRecord {
    pub position: [f64; 3],
    pub orientation: [f64; 3],
}

impl PoseRecord {
    pub fn from_pose(p: &Pose) -> Self {
        Self { position: p.position(), orientation: p.euler().to_array() }
    }

    pub fn to_pose(&self) -> Result<Pose, GeometryError> {
        Pose::from_position_euler(self.position, EulerXyz::from_array(self.orientation))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CameraRecord {
    id: u8,
    intrinsics: IntrinsicsRecord,
    #[serde(default)]
    distortion: Distortion,
    pose: PoseRecord,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IntrinsicsRecord {
    fx: f64,
    fy: f64,
    cx: f64,
    cy: f64,
    #[serde(default = "default_width")]
    width: u32,
    #[serde(default = "default_height")]
    height: u32,
}

fn default_width() -> u32 {
    DEFAULT_WIDTH
}

fn default_height() -> u32 {
    DEFAULT_HEIGHT
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RigRecord {
    schema: String,
    cameras: Vec<CameraRecord>,
}

/// The set of calibrated cameras observing the scene.
#[derive(Debug, Clone, PartialEq)]
pub struct CameraRig {
    pub cameras: Vec<Camera>,
}

impl CameraRig {
    pub fn new(cameras: Vec<Camera>) -> Result<Self, CameraError> {
        if cameras.is_empty() {
            return Err(CameraError::Rig("rig has no cameras".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for c in &cameras {
            if !(1..=6).contains(&c.id) {
                return Err(CameraError::Rig(format!("camera id {} outside 1..=6", c.id)));
            }
            if !seen.insert(c.id) {
                return Err(CameraError::Rig(format!("duplicate camera id {}", c.id)));
            }
            c.intrinsics.validate(c.id)?;
        }
        Ok(Self { cameras })
    }

    pub fn camera(&self, id: u8) -> Option<&Camera> {
        self.cameras.iter().find(|c| c.id == id)
    }

    /// Six ceiling-mounted cameras on a ring around the origin, all looking
    /// at the floor centre. Values are plausible for an 8 mm lens on a
    /// 1920×1200 sensor.
    pub fn default_six() -> Self {
        let intrinsics = Intrinsics {
            fx: 1150.0,
            fy: 1150.0,
            cx: 959.5,
            cy: 599.5,
            width: DEFAULT_WIDTH,
            height: DEFAULT_HEIGHT,
            distortion: Distortion { k1: -0.12, k2: 0.03, k3: 0.0, p1: 0.0005, p2: -0.0003 },
        };
        let cameras = (0..6)
            .map(|i| {
                let angle = i as f64 * std::f64::consts::TAU / 6.0 + 0.3;
                let eye = Vector3::new(9000.0 * angle.cos(), 9000.0 * angle.sin(), 5500.0);
                Camera { id: i as u8 + 1, intrinsics, pose: look_at(eye, Vector3::new(0.0, 0.0, 300.0)) }
            })
            .collect();
        Self { cameras }
    }

    pub fn to_json(&self) -> String {
        let rec = RigRecord {
            schema: SCHEMA_VERSION.to_string(),
            cameras: self
                .cameras
                .iter()
                .map(|c| CameraRecord {
                    id: c.id,
                    intrinsics: IntrinsicsRecord {
                        fx: c.intrinsics.fx,
                        fy: c.intrinsics.fy,
                        cx: c.intrinsics.cx,
                        cy: c.intrinsics.cy,
                        width: c.intrinsics.width,
                        height: c.intrinsics.height,
                    },
                    distortion: c.intrinsics.distortion,
                    pose: PoseRecord::from_pose(&c.pose),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&rec).expect("rig serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self, CameraError> {
        let rec: RigRecord = serde_json::from_str(text)?;
        if rec.schema != SCHEMA_VERSION {
            return Err(CameraError::Rig(format!("unknown schema version {:?}", rec.schema)));
        }
        let cameras = rec
            .cameras
            .into_iter()
            .map(|c| {
                let pose = c.pose.to_pose().map_err(|source| CameraError::Pose { camera: c.id, source })?;
                Ok(Camera {
                    id: c.id,
                    intrinsics: Intrinsics {
                        fx: c.intrinsics.fx,
                        fy: c.intrinsics.fy,
                        cx: c.intrinsics.cx,
                        cy: c.intrinsics.cy,
                        width: c.intrinsics.width,
                        height: c.intrinsics.height,
                        distortion: c.distortion,
                    },
                    pose,
                })
            })
            .collect::<Result<Vec<_>, CameraError>>()?;
        Self::new(cameras)
    }
}

/// Camera pose at `eye` looking at `target` with world +z up. The camera
/// frame follows the usual vision convention: x right, y down, z forward.
pub fn look_at(eye: Vector3<f64>, target: Vector3<f64>) -> Pose {
    let forward = (target - eye).normalize();
    let up = Vector3::z();
    let down = (-up + forward * up.dot(&forward)).normalize();
    let right = down.cross(&forward);
    let m = nalgebra::Matrix3::from_columns(&[right, down, forward]);
    let rotation = Rotation::from_matrix(m).expect("look_at builds an orthonormal frame");
    Pose { rotation, translation: eye }
}
