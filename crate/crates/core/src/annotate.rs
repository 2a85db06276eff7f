//! Automated 2D annotation from 3D entity models at known poses.
//!
//! Each entity model is placed at its pose relative to a camera, its vertices
//! are projected, and the axis-aligned hull of the in-front projections is
//! clipped to the image to give the bounding box. Entities whose hull misses
//! the image get the `(-1, -1, -1, -1)` sentinel and `visible = 0`.
//! Occlusion between entities is not modelled.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bbox::BBox;
use crate::camera::{Camera, Intrinsics, Projection};
use crate::geometry::{relative_pose, EulerXyz, Pose};
use crate::SCHEMA_VERSION;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("entity {0:?}: box extents must be positive and finite")]
    BadExtents(String),
    #[error("entity {0:?}: vertex list is empty or non-finite")]
    BadVertices(String),
    #[error("duplicate entity name {0:?}")]
    DuplicateName(String),
    #[error("unknown entity class {0:?}")]
    UnknownClass(String),
    #[error("catalog: {0}")]
    Catalog(String),
    #[error("catalog is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntityClass {
    Pallet,
    MeshBox,
    SmallLoadCarrier,
    CardboardBox,
    Barrel,
    Forklift,
}

impl EntityClass {
    pub const ALL: [EntityClass; 6] = [
        EntityClass::Pallet,
        EntityClass::MeshBox,
        EntityClass::SmallLoadCarrier,
        EntityClass::CardboardBox,
        EntityClass::Barrel,
        EntityClass::Forklift,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            EntityClass::Pallet => "pallet",
            EntityClass::MeshBox => "mesh_box",
            EntityClass::SmallLoadCarrier => "small_load_carrier",
            EntityClass::CardboardBox => "cardboard_box",
            EntityClass::Barrel => "barrel",
            EntityClass::Forklift => "forklift",
        }
    }

    /// Prefix used for instance names, e.g. `Pallet_9`.
    pub fn name_prefix(&self) -> &'static str {
        match self {
            EntityClass::Pallet => "Pallet",
            EntityClass::MeshBox => "MeshBox",
            EntityClass::SmallLoadCarrier => "LoadCarrier",
            EntityClass::CardboardBox => "Cardboard",
            EntityClass::Barrel => "Barrel",
            EntityClass::Forklift => "Forklift",
        }
    }

    /// Guesses the class from an instance name such as `Forklift_2`.
    pub fn from_entity_name(name: &str) -> Option<EntityClass> {
        let prefix = name.rsplit_once('_').map_or(name, |(p, _)| p);
        Self::ALL.into_iter().find(|c| c.name_prefix().eq_ignore_ascii_case(prefix))
    }

    /// Default oriented-box extents in mm (length, width, height).
    pub fn default_extents(&self) -> [f64; 3] {
        match self {
            EntityClass::Pallet => [1200.0, 800.0, 144.0],
            EntityClass::MeshBox => [1240.0, 835.0, 970.0],
            EntityClass::SmallLoadCarrier => [600.0, 400.0, 280.0],
            EntityClass::CardboardBox => [600.0, 400.0, 400.0],
            EntityClass::Barrel => [580.0, 580.0, 880.0],
            EntityClass::Forklift => [2300.0, 1100.0, 2100.0],
        }
    }
}

impl fmt::Display for EntityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EntityClass {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL.into_iter().find(|c| c.as_str() == s).ok_or_else(|| ModelError::UnknownClass(s.to_string()))
    }
}

/// Geometry of an entity in its own frame (mm).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    /// Box centred on the model origin with the given full edge lengths.
    Box {
        extents: [f64; 3],
    },
    Vertices {
        vertices: Vec<[f64; 3]>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntityModel {
    pub class: EntityClass,
    pub name: String,
    pub shape: Shape,
}

impl EntityModel {
    pub fn with_default_box(class: EntityClass, name: impl Into<String>) -> Self {
        Self { class, name: name.into(), shape: Shape::Box { extents: class.default_extents() } }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        match &self.shape {
            Shape::Box { extents } => {
                if extents.iter().any(|e| !e.is_finite() || *e <= 0.0) {
                    return Err(ModelError::BadExtents(self.name.clone()));
                }
            }
            Shape::Vertices { vertices } => {
                if vertices.is_empty() || vertices.iter().flatten().any(|v| !v.is_finite()) {
                    return Err(ModelError::BadVertices(self.name.clone()));
                }
            }
        }
        Ok(())
    }

    /// Model-frame vertices: the 8 box corners, or the explicit list.
    pub fn vertices(&self) -> Vec<Vector3<f64>> {
        match &self.shape {
            Shape::Box { extents } => {
                let [hx, hy, hz] = extents.map(|e| e / 2.0);
                let mut out = Vec::with_capacity(8);
                for sx in [-1.0, 1.0] {
                    for sy in [-1.0, 1.0] {
                        for sz in [-1.0, 1.0] {
                            out.push(Vector3::new(sx * hx, sy * hy, sz * hz));
                        }
                    }
                }
                out
            }
            Shape::Vertices { vertices } => vertices.iter().map(|v| Vector3::from(*v)).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CatalogRecord {
    schema: String,
    entities: Vec<EntityModel>,
}

/// Entity models keyed by unique instance name.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EntityCatalog {
    models: BTreeMap<String, EntityModel>,
}

impl EntityCatalog {
    pub fn new(models: impl IntoIterator<Item = EntityModel>) -> Result<Self, ModelError> {
        let mut out = BTreeMap::new();
        for m in models {
            m.validate()?;
            if out.contains_key(&m.name) {
                return Err(ModelError::DuplicateName(m.name));
            }
            out.insert(m.name.clone(), m);
        }
        Ok(Self { models: out })
    }

    pub fn get(&self, name: &str) -> Option<&EntityModel> {
        self.models.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &EntityModel> {
        self.models.values()
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    pub fn class_of(&self, name: &str) -> Option<EntityClass> {
        self.get(name).map(|m| m.class).or_else(|| EntityClass::from_entity_name(name))
    }

    pub fn to_json(&self) -> String {
        let rec = CatalogRecord { schema: SCHEMA_VERSION.into(), entities: self.models.values().cloned().collect() };
        serde_json::to_string_pretty(&rec).expect("catalog serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let rec: CatalogRecord = serde_json::from_str(text)?;
        if rec.schema != SCHEMA_VERSION {
            return Err(ModelError::Catalog(format!("unknown schema version {:?}", rec.schema)));
        }
        Self::new(rec.entities)
    }
}

/// Transforms every model vertex by `rel` (`T_camera←entity`) and projects it.
/// Output order follows [`EntityModel::vertices`].
pub fn project_model(intr: &Intrinsics, rel: &Pose, model: &EntityModel) -> Vec<Projection> {
    model.vertices().iter().map(|v| intr.project_finite(&rel.transform_point(v))).collect()
}

/// Fits the image-clipped axis-aligned hull of the in-front projections.
///
/// Pixel `(i, j)` covers `[i, i+1) × [j, j+1)`, so a hull from `u0` to `u1`
/// spans columns `floor(u0)..=floor(u1)` after clamping to the image. The box
/// is the sentinel when nothing is in front of the camera or when the hull
/// shares no pixel with the image.
pub fn fit_bbox(projected: &[Projection], intr: &Intrinsics) -> BBox {
    let mut hull: Option<(f64, f64, f64, f64)> = None;
    for (u, v) in projected.iter().filter_map(Projection::pixel) {
        hull = Some(match hull {
            None => (u, v, u, v),
            Some((u0, v0, u1, v1)) => (u0.min(u), v0.min(v), u1.max(u), v1.max(v)),
        });
    }
    let Some((u0, v0, u1, v1)) = hull else {
        return BBox::SENTINEL;
    };
    let (w, h) = (intr.width as f64, intr.height as f64);
    let (c0, c1) = (u0.floor(), u1.floor());
    let (r0, r1) = (v0.floor(), v1.floor());
    if c1 < 0.0 || r1 < 0.0 || c0 > w - 1.0 || r0 > h - 1.0 {
        return BBox::SENTINEL;
    }
    let x0 = c0.max(0.0);
    let x1 = c1.min(w - 1.0);
    let y0 = r0.max(0.0);
    let y1 = r1.min(h - 1.0);
    BBox::new(x0, y0, x1 - x0 + 1.0, y1 - y0 + 1.0)
}

/// Which frame an annotation row's position and orientation are expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoseFrame {
    /// Entity pose relative to the annotating camera.
    #[default]
    Camera,
    /// Entity pose in the unified motion-capture world frame.
    World,
}

impl FromStr for PoseFrame {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "camera" => Ok(PoseFrame::Camera),
            "world" => Ok(PoseFrame::World),
            other => Err(format!("unknown pose frame {other:?} (expected camera or world)")),
        }
    }
}

impl fmt::Display for PoseFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PoseFrame::Camera => "camera",
            PoseFrame::World => "world",
        })
    }
}

/// One annotated entity in one image.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationRow {
    pub image_path: String,
    pub entity_name: String,
    /// mm
    pub position: [f64; 3],
    pub orientation: EulerXyz,
    /// `t_pose − t_image` in seconds.
    pub delta_time: f64,
    pub bbox: BBox,
    pub visible: bool,
}

/// A synchronized entity pose for one image. `pose` is `None` when the
/// motion-capture sample was invalid; such entities produce no row.
#[derive(Debug, Clone)]
pub struct EntityObservation<'a> {
    pub model: &'a EntityModel,
    pub pose: Option<Pose>,
    pub delta_time: f64,
}

/// Annotates every entity with a valid pose in one camera image.
pub fn annotate_frame(
    camera: &Camera,
    entities: &[EntityObservation<'_>],
    image_path: &str,
    frame: PoseFrame,
) -> Vec<AnnotationRow> {
    entities
        .iter()
        .filter_map(|obs| {
            let world = obs.pose?;
            let rel = relative_pose(&camera.pose, &world);
            let bbox = fit_bbox(&project_model(&camera.intrinsics, &rel, obs.model), &camera.intrinsics);
            let reported = match frame {
                PoseFrame::Camera => rel,
                PoseFrame::World => world,
            };
            Some(AnnotationRow {
                image_path: image_path.to_string(),
                entity_name: obs.model.name.clone(),
                position: reported.position(),
                orientation: reported.euler(),
                delta_time: obs.delta_time,
                visible: !bbox.is_sentinel(),
                bbox,
            })
        })
        .collect()
}
