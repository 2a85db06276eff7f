//! Benchmark inputs.

use trackforge_core::annotate::EntityObservation;
use trackforge_core::scenario::{
    corrupt_tracks, generate_scenario, simulate_images, CorruptionSpec, Scenario, ScenarioKind, ScenarioSpec, Stage,
};
use trackforge_core::sync::{ImageEvent, PoseSample};
use trackforge_core::TrackSequence;

/// The largest roster: nine loaded pallets.
pub fn block_3x3(duration: f64) -> Scenario {
    generate_scenario(&ScenarioSpec::new(ScenarioKind::Block3x3, Stage::LoadedPallets, duration, 1))
        .expect("valid spec")
}

/// Scenario poses with every camera's image events.
pub fn sync_inputs(duration: f64) -> (Vec<ImageEvent>, Vec<PoseSample>) {
    let spec = ScenarioSpec::new(ScenarioKind::Block3x3, Stage::LoadedPallets, duration, 1);
    let scenario = generate_scenario(&spec).expect("valid spec");
    let images = simulate_images(&spec).expect("valid capture").streams.into_iter().flatten().collect();
    (images, scenario.poses)
}

/// Observations of every entity at the first pose tick.
pub fn first_tick(scenario: &Scenario) -> Vec<EntityObservation<'_>> {
    let t0 = scenario.poses.first().map_or(0.0, |p| p.timestamp);
    scenario
        .poses
        .iter()
        .take_while(|p| p.timestamp == t0)
        .map(|p| EntityObservation {
            model: scenario.catalog.get(&p.entity_name).expect("catalogued"),
            pose: p.pose(),
            delta_time: 0.0,
        })
        .collect()
}

/// A synthetic ground-truth sequence and a noisy copy of it.
pub fn tracking_pair(frames: u64, objects: u64) -> (TrackSequence, TrackSequence) {
    use trackforge_core::{BBox, Frame, TrackedBox};
    let gt = TrackSequence::new(
        (0..frames)
            .map(|f| Frame {
                index: f,
                boxes: (0..objects)
                    .map(|o| {
                        let x = (o % 10) as f64 * 180.0 + f as f64 * 0.5;
                        let y = (o / 10) as f64 * 120.0;
                        TrackedBox::new(o + 1, BBox::new(x, y, 90.0, 60.0), 1.0)
                    })
                    .collect(),
            })
            .collect(),
    )
    .expect("valid sequence");
    let spec = CorruptionSpec { dropout_prob: 0.05, jitter_sigma: 3.0, idswitch_rate: 0.2, fp_rate: 1.0, seed: 3 };
    let (pred, _) = corrupt_tracks(&gt, &spec).expect("valid corruption");
    (gt, pred)
}
