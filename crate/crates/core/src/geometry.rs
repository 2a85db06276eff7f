//! Rigid transforms in millimeters and intrinsic XYZ Euler angles.
//!
//! The Euler convention is fixed as `R = Rx(θx) · Ry(θy) · Rz(θz)`: rotate
//! about the body X axis, then the new Y axis, then the new Z axis. For
//! example `(0, 0, π/2)` maps the x-axis onto the y-axis, and
//! `(π/2, 0, 0)` maps the y-axis onto the z-axis.

use nalgebra::{Matrix3, Matrix4, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance for orthonormality and determinant checks.
pub const ROTATION_TOLERANCE: f64 = 1e-9;

/// Below this value of `|cos θy|` extraction treats the rotation as gimbal locked.
pub const GIMBAL_LOCK_EPSILON: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("matrix is not a proper rotation (orthonormality error {orthonormality:e}, det {determinant})")]
    NotARotation { orthonormality: f64, determinant: f64 },
}

/// Intrinsic X-then-Y-then-Z Euler angles in radians.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EulerXyz {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl EulerXyz {
    pub const ZERO: EulerXyz = EulerXyz { x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

/// Result of converting a rotation back to Euler angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerExtraction {
    pub angles: EulerXyz,
    /// Set when `|cos θy| < GIMBAL_LOCK_EPSILON`. In that case `θx = 0` and
    /// `θz` carries the combined free rotation.
    pub gimbal_lock: bool,
}

/// A proper rotation matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation(Matrix3<f64>);

impl Rotation {
    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    /// Validates orthonormality and `det = +1` within [`ROTATION_TOLERANCE`].
    pub fn from_matrix(m: Matrix3<f64>) -> Result<Self, GeometryError> {
        if m.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite("rotation matrix"));
        }
        let orthonormality = (m.transpose() * m - Matrix3::identity()).abs().max();
        let determinant = m.determinant();
        if orthonormality > ROTATION_TOLERANCE || (determinant - 1.0).abs() > ROTATION_TOLERANCE {
            return Err(GeometryError::NotARotation { orthonormality, determinant });
        }
        Ok(Self(m))
    }

    pub fn about_x(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self(Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c))
    }

    pub fn about_y(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self(Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c))
    }

    pub fn about_z(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self(Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0))
    }

    /// `Rx(θx) · Ry(θy) · Rz(θz)`.
    pub fn from_euler(e: EulerXyz) -> Result<Self, GeometryError> {
        if !e.is_finite() {
            return Err(GeometryError::NonFinite("euler angles"));
        }
        Ok(Self(Self::about_x(e.x).0 * Self::about_y(e.y).0 * Self::about_z(e.z).0))
    }

    /// Inverse of [`Rotation::from_euler`], canonical range
    /// `θx, θz ∈ (−π, π]`, `θy ∈ [−π/2, π/2]`.
    pub fn to_euler(&self) -> EulerExtraction {
        let m = &self.0;
        // For R = Rx Ry Rz: r02 = sin θy, r00 = cos θy cos θz, r01 = −cos θy sin θz,
        // r12 = −sin θx cos θy, r22 = cos θx cos θy.
        let cos_y = m[(0, 0)].hypot(m[(0, 1)]);
        let y = m[(0, 2)].atan2(cos_y);
        if cos_y < GIMBAL_LOCK_EPSILON {
            // Row 1 reduces to [sin(θz ± θx), cos(θz ± θx), 0]; pin θx to zero.
            let z = m[(1, 0)].atan2(m[(1, 1)]);
            return EulerExtraction { angles: EulerXyz::new(0.0, y, canonical_angle(z)), gimbal_lock: true };
        }
        let x = (-m[(1, 2)]).atan2(m[(2, 2)]);
        let z = (-m[(0, 1)]).atan2(m[(0, 0)]);
        EulerExtraction { angles: EulerXyz::new(canonical_angle(x), y, canonical_angle(z)), gimbal_lock: false }
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn rotate(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.0 * v
    }
}

impl std::ops::Mul for Rotation {
    type Output = Rotation;

    fn mul(self, rhs: Rotation) -> Rotation {
        Rotation(self.0 * rhs.0)
    }
}

// atan2 returns -π for (-0.0, negative); fold it onto +π.
fn canonical_angle(a: f64) -> f64 {
    if a <= -std::f64::consts::PI {
        a + 2.0 * std::f64::consts::PI
    } else {
        a
    }
}

/// Rigid transform mapping points from a child frame into a parent frame.
/// Translation is in millimeters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub rotation: Rotation,
    pub translation: Vector3<f64>,
}

impl Pose {
    pub fn identity() -> Self {
        Self { rotation: Rotation::identity(), translation: Vector3::zeros() }
    }

    pub fn new(rotation: Rotation, translation: Vector3<f64>) -> Result<Self, GeometryError> {
        if translation.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite("translation"));
        }
        Ok(Self { rotation, translation })
    }

    pub fn from_translation(t: Vector3<f64>) -> Result<Self, GeometryError> {
        Self::new(Rotation::identity(), t)
    }

    /// Builds a pose from a position in mm and intrinsic XYZ angles.
    pub fn from_position_euler(position: [f64; 3], orientation: EulerXyz) -> Result<Self, GeometryError> {
        Self::new(Rotation::from_euler(orientation)?, Vector3::from(position))
    }

    pub fn position(&self) -> [f64; 3] {
        [self.translation.x, self.translation.y, self.translation.z]
    }

    pub fn euler(&self) -> EulerXyz {
        self.rotation.to_euler().angles
    }

    /// `self ∘ other`: `(R_a·R_b, R_a·t_b + t_a)`.
    pub fn compose(&self, other: &Pose) -> Pose {
        Pose {
            rotation: self.rotation * other.rotation,
            translation: self.rotation.rotate(&other.translation) + self.translation,
        }
    }

    /// `(Rᵀ, −Rᵀ·t)`.
    pub fn inverse(&self) -> Pose {
        let rt = self.rotation.transpose();
        Pose { rotation: rt, translation: -rt.rotate(&self.translation) }
    }

    pub fn transform_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation.rotate(p) + self.translation
    }

    pub fn to_homogeneous(&self) -> Matrix4<f64> {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(self.rotation.matrix());
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.translation);
        m
    }
}

/// Pose of an entity expressed in a camera frame.
///
/// Both arguments are poses in the unified world frame (`T_world←camera` and
/// `T_world←entity`); the result is `T_camera←entity = inverse(camera) ∘ entity`.
pub fn relative_pose(world_to_camera: &Pose, world_to_entity: &Pose) -> Pose {
    world_to_camera.inverse().compose(world_to_entity)
}
