use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion, Throughput};
use trackforge_bench::{block_3x3, first_tick, sync_inputs, tracking_pair};
use trackforge_core::metrics::{evaluate, EvalConfig};
use trackforge_core::sync::synchronize;
use trackforge_core::{annotate_frame, CameraRig, PoseFrame};

fn annotate(c: &mut Criterion) {
    let scenario = block_3x3(0.0);
    let obs = first_tick(&scenario);
    let rig = CameraRig::default_six();
    let mut group = c.benchmark_group("annotate");
    group.throughput(Throughput::Elements((obs.len() * rig.cameras.len()) as u64));
    group.bench_function("six_cameras_one_tick", |b| {
        b.iter(|| {
            for cam in &rig.cameras {
                black_box(annotate_frame(cam, black_box(&obs), "camera/images/0.jpg", PoseFrame::Camera));
            }
        })
    });
    group.finish();
}

fn sync(c: &mut Criterion) {
    let (images, poses) = sync_inputs(2.0);
    let mut group = c.benchmark_group("sync");
    group.throughput(Throughput::Elements(images.len() as u64));
    group.bench_function("block_3x3_2s", |b| b.iter(|| black_box(synchronize(&images, &poses, Some(0.005)))));
    group.finish();
}

fn metrics(c: &mut Criterion) {
    let (gt, pred) = tracking_pair(200, 30);
    let cfg = EvalConfig::default();
    c.bench_function("evaluate_200x30", |b| b.iter(|| black_box(evaluate(&gt, &pred, &cfg).unwrap())));
}

criterion_group!(benches, annotate, sync, metrics);
criterion_main!(benches);
