use std::collections::BTreeSet;

use nalgebra::Vector3;
use proptest::prelude::*;

use trackforge_core::metrics::{hota_integrated, idf1, mota};
use trackforge_core::scenario::ScenarioKind;
use trackforge_core::{
    fit_bbox, project_model, BBox, EntityClass, EntityModel, EulerXyz, Frame, Intrinsics, Pose, Projection, Rotation,
    TrackSequence, TrackedBox,
};

#[derive(Debug, Clone)]
struct Obj {
    bbox: BBox,
    detected: bool,
    pred_id: u64,
    noise: (f64, f64),
}

fn obj() -> impl Strategy<Value = Obj> {
    (
        0.0..300.0f64,
        0.0..300.0f64,
        10.0..80.0f64,
        10.0..80.0f64,
        prop::bool::weighted(0.8),
        1u64..6,
        -8.0..8.0f64,
        -8.0..8.0f64,
    )
        .prop_map(|(x, y, w, h, detected, pred_id, nx, ny)| Obj {
            bbox: BBox::new(x, y, w, h),
            detected,
            pred_id,
            noise: (nx, ny),
        })
}

fn scene() -> impl Strategy<Value = (TrackSequence, TrackSequence)> {
    prop::collection::vec(prop::collection::vec(obj(), 1..5), 1..6).prop_map(|frames| {
        let (mut gt, mut pred) = (Vec::new(), Vec::new());
        for (f, objs) in frames.iter().enumerate() {
            let mut used = BTreeSet::new();
            let mut g = Vec::new();
            let mut p = Vec::new();
            for (i, o) in objs.iter().enumerate() {
                g.push(TrackedBox::new(i as u64 + 1, o.bbox, 1.0));
                if o.detected && used.insert(o.pred_id) {
                    p.push(TrackedBox::new(o.pred_id, o.bbox.translated(o.noise.0, o.noise.1), 0.9));
                }
            }
            gt.push(Frame { index: f as u64, boxes: g });
            pred.push(Frame { index: f as u64, boxes: p });
        }
        (TrackSequence::new(gt).unwrap(), TrackSequence::new(pred).unwrap())
    })
}

fn map_seq(s: &TrackSequence, f: impl Fn(&TrackedBox) -> TrackedBox) -> TrackSequence {
    let frames =
        s.frames().iter().map(|fr| Frame { index: fr.index, boxes: fr.boxes.iter().map(&f).collect() }).collect();
    TrackSequence::new(frames).unwrap()
}

fn scores(gt: &TrackSequence, pred: &TrackSequence) -> (f64, u64, f64, f64) {
    let m = mota(gt, pred, 0.5).unwrap();
    (m.mota, m.id_switches, idf1(gt, pred, 0.5).unwrap(), hota_integrated(gt, pred).unwrap())
}

proptest! {
    #[test]
    fn metrics_ignore_id_labels((gt, pred) in scene(), g_off in 1u64..1000, p_off in 1u64..1000) {
        let gt2 = map_seq(&gt, |b| TrackedBox::new(b.id * 7 + g_off, b.bbox, b.confidence));
        let pred2 = map_seq(&pred, |b| TrackedBox::new(1_000_000 - b.id * 3 - p_off, b.bbox, b.confidence));
        let (a, b) = (scores(&gt, &pred), scores(&gt2, &pred2));
        prop_assert_eq!(a.0, b.0);
        prop_assert_eq!(a.1, b.1);
        prop_assert_eq!(a.2, b.2);
        prop_assert!((a.3 - b.3).abs() < 1e-12);
    }

    #[test]
    fn metrics_ignore_common_translation((gt, pred) in scene(), dx in -500.0..500.0f64, dy in -500.0..500.0f64) {
        let shift = |s: &TrackSequence| map_seq(s, |b| TrackedBox::new(b.id, b.bbox.translated(dx, dy), b.confidence));
        let (a, b) = (scores(&gt, &pred), scores(&shift(&gt), &shift(&pred)));
        prop_assert!((a.0 - b.0).abs() < 1e-9);
        prop_assert_eq!(a.1, b.1);
        prop_assert!((a.2 - b.2).abs() < 1e-9);
        prop_assert!((a.3 - b.3).abs() < 1e-9);
    }

    #[test]
    fn mota_never_rises_with_false_positives((gt, pred) in scene(), extra in prop::collection::vec((0usize..6, 0.0..300.0f64), 1..6)) {
        let mut frames: Vec<Frame> = pred.frames().to_vec();
        let base = mota(&gt, &pred, 0.5).unwrap().mota;
        let mut last = base;
        for (k, (f, y)) in extra.iter().enumerate() {
            let index = *f as u64;
            let fp = TrackedBox::new(100 + k as u64, BBox::new(10_000.0, *y, 20.0, 20.0), 0.5);
            match frames.iter_mut().find(|fr| fr.index == index) {
                Some(fr) => fr.boxes.push(fp),
                None => frames.push(Frame { index, boxes: vec![fp] }),
            }
            frames.sort_by_key(|fr| fr.index);
            let now = mota(&gt, &TrackSequence::new(frames.clone()).unwrap(), 0.5).unwrap().mota;
            prop_assert!(now < last);
            last = now;
        }
    }

    #[test]
    fn fit_bbox_contains_visible_projections(
        x in -3000.0..3000.0f64, y in -2000.0..2000.0f64, z in -500.0..8000.0f64,
        rx in -3.1..3.1f64, ry in -1.5..1.5f64, rz in -3.1..3.1f64,
    ) {
        let intr = Intrinsics { fx: 1100.0, fy: 1100.0, cx: 960.0, cy: 600.0, width: 1920, height: 1200, distortion: Default::default() };
        let model = EntityModel::with_default_box(EntityClass::Pallet, "Pallet_1");
        let rel = Pose::from_position_euler([x, y, z], EulerXyz::new(rx, ry, rz)).unwrap();
        let projected = project_model(&intr, &rel, &model);
        let bbox = fit_bbox(&projected, &intr);
        let inside: Vec<(f64, f64)> = projected
            .iter()
            .filter_map(Projection::pixel)
            .filter(|(u, v)| *u >= 0.0 && *v >= 0.0 && *u < 1920.0 && *v < 1200.0)
            .collect();
        if bbox.is_sentinel() {
            prop_assert!(inside.is_empty());
        } else {
            prop_assert!(bbox.x >= 0.0 && bbox.y >= 0.0 && bbox.w >= 1.0 && bbox.h >= 1.0);
            prop_assert!(bbox.right() <= 1920.0 && bbox.bottom() <= 1200.0);
            prop_assert!([bbox.x, bbox.y, bbox.w, bbox.h].iter().all(|c| c.fract() == 0.0));
            for (u, v) in inside {
                prop_assert!(u >= bbox.x && u < bbox.right() && v >= bbox.y && v < bbox.bottom());
            }
        }
    }
}

#[test]
fn translation_never_changes_box_size() {
    let intr = Intrinsics {
        fx: 1000.0,
        fy: 1000.0,
        cx: 960.0,
        cy: 600.0,
        width: 1920,
        height: 1200,
        distortion: Default::default(),
    };
    let model = EntityModel::with_default_box(EntityClass::MeshBox, "MeshBox_1");
    let at = |x: f64| {
        let rel = Pose::new(Rotation::identity(), Vector3::new(x, 0.0, 5000.0)).unwrap();
        fit_bbox(&project_model(&intr, &rel, &model), &intr)
    };
    let (a, b) = (at(0.0), at(100.0));
    assert!(b.x > a.x);
    assert!((a.w - b.w).abs() <= 1.0 && a.h == b.h);
}

#[test]
fn scenario_kind_names() {
    for kind in ScenarioKind::ALL {
        let json = serde_json::to_string(&kind).unwrap();
        assert_eq!(json, format!("\"{}\"", kind.as_str()));
        assert_eq!(serde_json::from_str::<ScenarioKind>(&json).unwrap(), kind);
    }
}
