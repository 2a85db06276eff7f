//! Turns synchronized image/pose pairs into per-camera annotation files.

use std::collections::BTreeMap;

use thiserror::Error;

use super::{AnnotationFile, AnnotationHeader};
use crate::annotate::{annotate_frame, EntityCatalog, EntityObservation, PoseFrame};
use crate::camera::CameraRig;
use crate::geometry::{EulerXyz, Pose};
use crate::sync::MatchedPose;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BuildError {
    #[error("camera {0} is not in the rig")]
    UnknownCamera(u8),
    #[error("entity {0:?} is not in the model catalog")]
    UnknownEntity(String),
    #[error("entity {entity:?} in {image}: pose is not a rigid transform")]
    BadPose { image: String, entity: String },
}

/// One annotation file per camera present in `matched`, cameras ascending,
/// images by frame index, entities by name.
pub fn build_annotations(
    rig: &CameraRig,
    catalog: &EntityCatalog,
    matched: &[MatchedPose],
    rig_name: &str,
    frame: PoseFrame,
) -> Result<Vec<AnnotationFile>, BuildError> {
    let mut grouped: BTreeMap<u8, BTreeMap<(u64, &str), Vec<&MatchedPose>>> = BTreeMap::new();
    for m in matched {
        grouped.entry(m.camera_id).or_default().entry((m.frame_index, m.image_path.as_str())).or_default().push(m);
    }
    let mut files = Vec::with_capacity(grouped.len());
    for (cam_id, images) in grouped {
        let camera = rig.camera(cam_id).ok_or(BuildError::UnknownCamera(cam_id))?;
        let mut rows = Vec::new();
        for ((_, path), mut entities) in images {
            entities.sort_by(|a, b| a.entity_name.cmp(&b.entity_name));
            let obs = entities
                .iter()
                .map(|m| {
                    let model =
                        catalog.get(&m.entity_name).ok_or_else(|| BuildError::UnknownEntity(m.entity_name.clone()))?;
                    let pose = Pose::from_position_euler(m.position, EulerXyz::from_array(m.orientation))
                        .map_err(|_| BuildError::BadPose { image: path.to_string(), entity: m.entity_name.clone() })?;
                    Ok(EntityObservation { model, pose: Some(pose), delta_time: m.delta_time })
                })
                .collect::<Result<Vec<_>, BuildError>>()?;
            rows.extend(annotate_frame(camera, &obs, path, frame));
        }
        files.push(AnnotationFile { header: AnnotationHeader::new(cam_id, rig_name, frame), rows });
    }
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotate::{EntityClass, EntityModel};

    fn matched(cam: u8, frame: u64, name: &str, pos: [f64; 3]) -> MatchedPose {
        MatchedPose {
            camera_id: cam,
            frame_index: frame,
            image_path: crate::sync::image_path(cam, frame),
            image_timestamp: frame as f64 * 0.05,
            entity_name: name.into(),
            pose_timestamp: frame as f64 * 0.05,
            delta_time: 0.0,
            position: pos,
            orientation: [0.0; 3],
        }
    }

    #[test]
    fn groups_by_camera_and_image() {
        let rig = CameraRig::default_six();
        let catalog = EntityCatalog::new([
            EntityModel::with_default_box(EntityClass::Pallet, "Pallet_1"),
            EntityModel::with_default_box(EntityClass::Barrel, "Barrel_1"),
        ])
        .unwrap();
        let input = vec![
            matched(2, 1, "Pallet_1", [0.0, 0.0, 72.0]),
            matched(1, 1, "Pallet_1", [0.0, 0.0, 72.0]),
            matched(1, 0, "Pallet_1", [0.0, 0.0, 72.0]),
            matched(1, 0, "Barrel_1", [500.0, 0.0, 440.0]),
        ];
        let files = build_annotations(&rig, &catalog, &input, "rig.json", PoseFrame::Camera).unwrap();
        assert_eq!(files.len(), 2);
        assert_eq!(files[0].header.camera_id, 1);
        let names: Vec<_> = files[0].rows.iter().map(|r| (r.image_path.as_str(), r.entity_name.as_str())).collect();
        assert_eq!(
            names,
            vec![
                ("camera_1/images/0.jpg", "Barrel_1"),
                ("camera_1/images/0.jpg", "Pallet_1"),
                ("camera_1/images/1.jpg", "Pallet_1")
            ]
        );
        assert!(files.iter().flat_map(|f| &f.rows).all(|r| r.visible));

        let unknown = vec![matched(1, 0, "Forklift_9", [0.0; 3])];
        assert_eq!(
            build_annotations(&rig, &catalog, &unknown, "rig.json", PoseFrame::Camera),
            Err(BuildError::UnknownEntity("Forklift_9".into()))
        );
        let no_cam = vec![matched(7, 0, "Pallet_1", [0.0; 3])];
        assert!(matches!(
            build_annotations(&rig, &catalog, &no_cam, "r", PoseFrame::Camera),
            Err(BuildError::UnknownCamera(7))
        ));
    }
}
