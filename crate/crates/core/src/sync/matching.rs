//! Nearest-timestamp matching of images to the motion-capture pose stream.
//!
//! `delta_time` is always `t_pose − t_image`: negative when the matched pose
//! was sampled before the image. When two samples are equally close the
//! earlier one wins.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ImageEvent;
use crate::geometry::{EulerXyz, Pose};

/// One motion-capture sample. Position in mm, orientation intrinsic XYZ radians.
#[derive(Debug, Clone, PartialEq)]
pub struct PoseSample {
    pub timestamp: f64,
    pub entity_name: String,
    pub position: [f64; 3],
    pub orientation: EulerXyz,
    pub valid: bool,
}

impl PoseSample {
    pub fn is_usable(&self) -> bool {
        self.valid
            && self.timestamp.is_finite()
            && self.position.iter().all(|v| v.is_finite())
            && self.orientation.is_finite()
    }

    /// The rigid pose, or `None` for an unusable sample.
    pub fn pose(&self) -> Option<Pose> {
        if !self.is_usable() {
            return None;
        }
        Pose::from_position_euler(self.position, self.orientation).ok()
    }
}

/// Drops samples flagged invalid or carrying non-finite values; order is kept.
pub fn filter_invalid(poses: impl IntoIterator<Item = PoseSample>) -> Vec<PoseSample> {
    poses.into_iter().filter(PoseSample::is_usable).collect()
}

/// Finds the sample closest in time to `image_ts`.
///
/// `poses` must be sorted by timestamp and already filtered. Returns the
/// sample and `t_pose − t_image`, or `None` for an empty stream.
pub fn match_pose(image_ts: f64, poses: &[PoseSample]) -> Option<(&PoseSample, f64)> {
    let idx = poses.partition_point(|p| p.timestamp < image_ts);
    let before = idx.checked_sub(1).map(|i| &poses[i]);
    let after = poses.get(idx);
    let best = match (before, after) {
        (Some(b), Some(a)) => {
            if (a.timestamp - image_ts).abs() < (image_ts - b.timestamp).abs() {
                a
            } else {
                b
            }
        }
        (Some(b), None) => b,
        (None, Some(a)) => a,
        (None, None) => return None,
    };
    Some((best, best.timestamp - image_ts))
}

/// As [`match_pose`], rejecting matches with `|Δt| > max_dt` when a cutoff is set.
pub fn match_pose_within(image_ts: f64, poses: &[PoseSample], max_dt: Option<f64>) -> Option<(&PoseSample, f64)> {
    match_pose(image_ts, poses).filter(|(_, dt)| max_dt.is_none_or(|m| dt.abs() <= m))
}

/// An image paired with one entity's nearest valid pose.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchedPose {
    pub camera_id: u8,
    pub frame_index: u64,
    pub image_path: String,
    pub image_timestamp: f64,
    pub entity_name: String,
    pub pose_timestamp: f64,
    pub delta_time: f64,
    pub position: [f64; 3],
    pub orientation: [f64; 3],
}

/// Pairs every image with every entity's nearest valid pose.
///
/// Invalid samples are filtered first and each entity's stream is sorted by
/// time. Output follows image order, then entity name. Entities with no
/// usable sample (or none within `max_dt`) produce no pair for that image.
pub fn synchronize(images: &[ImageEvent], poses: &[PoseSample], max_dt: Option<f64>) -> Vec<MatchedPose> {
    let mut by_entity: BTreeMap<&str, Vec<PoseSample>> = BTreeMap::new();
    for p in poses.iter().filter(|p| p.is_usable()) {
        by_entity.entry(p.entity_name.as_str()).or_default().push(p.clone());
    }
    for stream in by_entity.values_mut() {
        stream.sort_by(|a, b| a.timestamp.total_cmp(&b.timestamp));
    }
    let mut out = Vec::new();
    for img in images {
        for (name, stream) in &by_entity {
            if let Some((p, dt)) = match_pose_within(img.timestamp, stream, max_dt) {
                out.push(MatchedPose {
                    camera_id: img.camera_id,
                    frame_index: img.frame_index,
                    image_path: img.image_path.clone(),
                    image_timestamp: img.timestamp,
                    entity_name: name.to_string(),
                    pose_timestamp: p.timestamp,
                    delta_time: dt,
                    position: p.position,
                    orientation: p.orientation.to_array(),
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sample(t: f64) -> PoseSample {
        PoseSample {
            timestamp: t,
            entity_name: "Pallet_1".into(),
            position: [0.0; 3],
            orientation: EulerXyz::ZERO,
            valid: true,
        }
    }

    #[test]
    fn nearest_neighbour_examples() {
        let poses = [sample(0.010), sample(0.015)];
        let (p, dt) = match_pose(0.012, &poses).unwrap();
        assert_eq!(p.timestamp, 0.010);
        assert!((dt + 0.002).abs() < 1e-15);

        let (p, dt) = match_pose(0.015, &poses).unwrap();
        assert_eq!(p.timestamp, 0.015);
        assert_eq!(dt, 0.0);

        let poses = [sample(0.010), sample(0.020)];
        let (p, dt) = match_pose(0.015, &poses).unwrap();
        assert_eq!(p.timestamp, 0.010);
        assert!((dt + 0.005).abs() < 1e-15);

        // Exactly representable tie.
        let poses = [sample(0.25), sample(0.75)];
        assert_eq!(match_pose(0.5, &poses).unwrap().0.timestamp, 0.25);

        assert!(match_pose(1.0, &[]).is_none());
        assert_eq!(match_pose(-5.0, &poses).unwrap().0.timestamp, 0.25);
        assert_eq!(match_pose(5.0, &poses).unwrap().0.timestamp, 0.75);
    }

    #[test]
    fn cutoff_rejects_far_matches() {
        let poses = [sample(0.0), sample(1.0)];
        assert!(match_pose_within(0.4, &poses, Some(0.1)).is_none());
        assert!(match_pose_within(0.05, &poses, Some(0.1)).is_some());
        assert!(match_pose_within(0.4, &poses, None).is_some());
    }

    #[test]
    fn match_is_a_global_minimizer() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..500 {
            let n = rng.random_range(1..30);
            let mut poses: Vec<_> = (0..n).map(|_| sample(rng.random_range(0.0..1.0))).collect();
            poses.sort_by(|a, b| a.timestamp.total_cmp(&b.timestamp));
            let t = rng.random_range(-0.1..1.1);
            let (p, dt) = match_pose(t, &poses).unwrap();
            let best = poses.iter().map(|q| (q.timestamp - t).abs()).fold(f64::INFINITY, f64::min);
            assert_eq!(dt.abs(), best);
            assert_eq!(dt, p.timestamp - t);
        }
    }

    #[test]
    fn filtering() {
        let all: Vec<_> = (0..5).map(|i| sample(i as f64)).collect();
        assert_eq!(filter_invalid(all.clone()), all);
        let none: Vec<_> = all
            .iter()
            .cloned()
            .map(|mut s| {
                s.valid = false;
                s
            })
            .collect();
        assert!(filter_invalid(none).is_empty());

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mixed: Vec<_> = (0..1000)
            .map(|i| {
                let mut s = sample(i as f64 * 0.005);
                match rng.random_range(0..4) {
                    0 => s.valid = false,
                    1 => s.position[1] = f64::NAN,
                    2 => s.orientation.z = f64::INFINITY,
                    _ => {}
                }
                s
            })
            .collect();
        let expected = mixed
            .iter()
            .filter(|s| s.valid && s.position.iter().all(|v| v.is_finite()) && s.orientation.is_finite())
            .count();
        let kept = filter_invalid(mixed);
        assert_eq!(kept.len(), expected);
        assert!(kept.windows(2).all(|w| w[0].timestamp < w[1].timestamp));
    }

    #[test]
    fn synchronize_pairs_every_entity() {
        let images = vec![ImageEvent {
            camera_id: 2,
            frame_index: 0,
            timestamp: 0.051,
            image_path: "camera_2/images/0.jpg".into(),
        }];
        let mut poses = vec![sample(0.050), sample(0.055)];
        let mut other = sample(0.040);
        other.entity_name = "Barrel_1".into();
        poses.push(other);
        let mut bad = sample(0.051);
        bad.entity_name = "Barrel_1".into();
        bad.valid = false;
        poses.push(bad);
        let pairs = synchronize(&images, &poses, None);
        assert_eq!(pairs.len(), 2);
        assert_eq!(pairs[0].entity_name, "Barrel_1");
        assert_eq!(pairs[0].pose_timestamp, 0.040);
        assert_eq!(pairs[1].pose_timestamp, 0.050);
        assert!(synchronize(&images, &poses, Some(0.005)).iter().all(|p| p.entity_name == "Pallet_1"));
    }
}
