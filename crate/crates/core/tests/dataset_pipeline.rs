use std::collections::BTreeMap;

use nalgebra::Vector3;

use trackforge_core::camera::look_at;
use trackforge_core::dataset::{build_annotations, compute_stats, StatsConfig};
use trackforge_core::scenario::{generate_scenario, simulate_images, ScenarioKind, ScenarioSpec, Stage};
use trackforge_core::sync::synchronize;
use trackforge_core::{Camera, CameraRig, Distortion, Intrinsics, PoseFrame};

/// One camera high above the floor that sees the whole scene.
fn overhead_rig() -> CameraRig {
    let intrinsics = Intrinsics {
        fx: 1150.0,
        fy: 1150.0,
        cx: 959.5,
        cy: 599.5,
        width: 1920,
        height: 1200,
        distortion: Distortion::default(),
    };
    let pose = look_at(Vector3::new(0.0, 1.0, 60_000.0), Vector3::new(0.0, 0.0, 0.0));
    CameraRig::new(vec![Camera { id: 1, intrinsics, pose }]).unwrap()
}

#[test]
fn class_counts_match_roster_when_everything_is_visible() {
    let spec = ScenarioSpec::new(ScenarioKind::LanesBroad, Stage::LoadedPallets, 3.0, 4);
    let scenario = generate_scenario(&spec).unwrap();
    assert_eq!(scenario.removed().count(), 0);
    let images: Vec<_> = simulate_images(&spec).unwrap().streams.into_iter().next().unwrap();
    let matched = synchronize(&images, &scenario.poses, Some(0.005));
    let files = build_annotations(&overhead_rig(), &scenario.catalog, &matched, "overhead", PoseFrame::World).unwrap();
    let stats = compute_stats(&files, &scenario.catalog, &StatsConfig::default());

    let mut roster: BTreeMap<String, u64> = BTreeMap::new();
    for m in scenario.catalog.iter() {
        *roster.entry(m.class.as_str().to_string()).or_default() += 1;
    }
    let frames = images.len() as u64;
    let expected: BTreeMap<String, u64> = roster.into_iter().map(|(k, n)| (k, n * frames)).collect();
    assert_eq!(stats.per_class, expected);
    assert_eq!(stats.per_camera[0].frames, frames);
    assert_eq!(stats.total_instances(), scenario.catalog.len() as u64 * frames);
}

#[test]
fn stats_ignore_file_order() {
    let spec = ScenarioSpec::new(ScenarioKind::Block2x2, Stage::LoadedPallets, 2.0, 9);
    let scenario = generate_scenario(&spec).unwrap();
    let images: Vec<_> = simulate_images(&spec).unwrap().streams.into_iter().flatten().collect();
    let matched = synchronize(&images, &scenario.poses, Some(0.005));
    let mut files =
        build_annotations(&CameraRig::default_six(), &scenario.catalog, &matched, "rig", PoseFrame::Camera).unwrap();
    let forward = compute_stats(&files, &scenario.catalog, &StatsConfig::default());
    files.reverse();
    files.swap(0, 2);
    assert_eq!(compute_stats(&files, &scenario.catalog, &StatsConfig::default()), forward);
}
