//! Per-camera and per-class dataset statistics.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::AnnotationFile;
use crate::annotate::EntityCatalog;

/// Measured annotation effort per entity instance with the renderer-based pipeline.
pub const DEFAULT_SECONDS_PER_INSTANCE: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatsConfig {
    pub seconds_per_instance: f64,
}

impl Default for StatsConfig {
    fn default() -> Self {
        Self { seconds_per_instance: DEFAULT_SECONDS_PER_INSTANCE }
    }
}

impl StatsConfig {
    /// Estimated annotation time in minutes for `instances` entity instances.
    pub fn annotation_minutes(&self, instances: u64) -> f64 {
        instances as f64 * self.seconds_per_instance / 60.0
    }

    /// Estimated seconds per image holding `instances_per_image` visible entities.
    pub fn seconds_per_image(&self, instances_per_image: f64) -> f64 {
        instances_per_image * self.seconds_per_instance
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CameraStats {
    pub camera_id: u8,
    /// Visible entity instances.
    pub instances: u64,
    /// Distinct images.
    pub frames: u64,
    pub annotation_time_min: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DatasetStats {
    pub per_camera: Vec<CameraStats>,
    /// Visible instances per class name; names that cannot be classified
    /// are counted under `unknown`.
    pub per_class: BTreeMap<String, u64>,
}

impl DatasetStats {
    pub fn total_instances(&self) -> u64 {
        self.per_camera.iter().map(|c| c.instances).sum()
    }

    /// Two aligned tables: the per-camera table and the per-class table.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let numerals = ["I", "II", "III", "IV", "V", "VI"];
        let label = |id: u8| numerals.get(id as usize - 1).map_or(id.to_string(), |s| s.to_string());
        let _ = write!(out, "{:<24}", "Sequence");
        for c in &self.per_camera {
            let _ = write!(out, "{:>12}", label(c.camera_id));
        }
        out.push('\n');
        let _ = write!(out, "{:<24}", "# instances");
        for c in &self.per_camera {
            let _ = write!(out, "{:>12}", c.instances);
        }
        out.push('\n');
        let _ = write!(out, "{:<24}", "# frames");
        for c in &self.per_camera {
            let _ = write!(out, "{:>12}", c.frames);
        }
        out.push('\n');
        let _ = write!(out, "{:<24}", "Annotation time (min)");
        for c in &self.per_camera {
            let _ = write!(out, "{:>12.0}", c.annotation_time_min);
        }
        out.push_str("\n\n");
        let _ = write!(out, "{:<24}", "Entity");
        for k in self.per_class.keys() {
            let _ = write!(out, "{:>20}", k);
        }
        out.push('\n');
        let _ = write!(out, "{:<24}", "# instances");
        for v in self.per_class.values() {
            let _ = write!(out, "{:>20}", v);
        }
        out.push('\n');
        out
    }
}

/// Counts visible instances and images per camera and visible instances per
/// class. Files sharing a camera id are merged. The result does not depend
/// on file order.
pub fn compute_stats(files: &[AnnotationFile], catalog: &EntityCatalog, config: &StatsConfig) -> DatasetStats {
    let mut instances: BTreeMap<u8, u64> = BTreeMap::new();
    let mut images: BTreeMap<u8, BTreeSet<&str>> = BTreeMap::new();
    let mut per_class: BTreeMap<String, u64> = BTreeMap::new();
    for f in files {
        let cam = f.header.camera_id;
        let inst = instances.entry(cam).or_default();
        let imgs = images.entry(cam).or_default();
        for r in &f.rows {
            imgs.insert(r.image_path.as_str());
            if r.visible {
                *inst += 1;
                let class = catalog.class_of(&r.entity_name).map_or("unknown", |c| c.as_str());
                *per_class.entry(class.to_string()).or_default() += 1;
            }
        }
    }
    let per_camera = instances
        .into_iter()
        .map(|(camera_id, n)| CameraStats {
            camera_id,
            instances: n,
            frames: images[&camera_id].len() as u64,
            annotation_time_min: config.annotation_minutes(n),
        })
        .collect();
    DatasetStats { per_camera, per_class }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotate::{AnnotationRow, PoseFrame};
    use crate::bbox::BBox;
    use crate::dataset::AnnotationHeader;
    use crate::geometry::EulerXyz;

    fn file(cam: u8, rows: &[(&str, &str, bool)]) -> AnnotationFile {
        AnnotationFile {
            header: AnnotationHeader::new(cam, "rig", PoseFrame::Camera),
            rows: rows
                .iter()
                .map(|(p, n, v)| AnnotationRow {
                    image_path: p.to_string(),
                    entity_name: n.to_string(),
                    position: [0.0; 3],
                    orientation: EulerXyz::ZERO,
                    delta_time: 0.0,
                    bbox: if *v { BBox::new(0.0, 0.0, 5.0, 5.0) } else { BBox::SENTINEL },
                    visible: *v,
                })
                .collect(),
        }
    }

    #[test]
    fn empty_dataset_is_all_zero() {
        let s = compute_stats(&[], &EntityCatalog::default(), &StatsConfig::default());
        assert!(s.per_camera.is_empty() && s.per_class.is_empty());
        assert_eq!(s.total_instances(), 0);
    }

    #[test]
    fn counts_visible_instances_and_images() {
        let a =
            file(1, &[("c1/0.jpg", "Pallet_1", true), ("c1/0.jpg", "Barrel_1", false), ("c1/1.jpg", "Pallet_1", true)]);
        let b = file(2, &[("c2/0.jpg", "Robot_7", true)]);
        let s = compute_stats(&[a.clone(), b.clone()], &EntityCatalog::default(), &StatsConfig::default());
        assert_eq!(s.per_camera[0].instances, 2);
        assert_eq!(s.per_camera[0].frames, 2);
        assert_eq!(s.per_camera[0].annotation_time_min, 2.0 * 1.5 / 60.0);
        assert_eq!(s.per_class["pallet"], 2);
        assert_eq!(s.per_class["unknown"], 1);
        assert_eq!(s.per_class.values().sum::<u64>(), s.total_instances());
        assert_eq!(compute_stats(&[b, a], &EntityCatalog::default(), &StatsConfig::default()), s);
        assert!(s.to_table().contains("# instances"));
    }

    #[test]
    fn annotation_time_model() {
        let c = StatsConfig::default();
        let minutes = c.annotation_minutes(208_134);
        assert!((minutes - 5203.35).abs() < 1e-9);
        assert!((minutes - 5209.0).abs() / 5209.0 < 0.002);
        assert_eq!(c.seconds_per_image(6.0), 9.0);
    }
}
