//! Trigger-locked capture across a camera network.
//!
//! Every cycle releases the trigger on all cameras at once. Each camera
//! captures one frame, locks, and is only released again once every camera
//! has finished retrieving its image. The slowest camera therefore sets the
//! cycle period. Time runs on a single integer-nanosecond logical clock.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{image_path, ImageEvent, SyncError};

const NANOS_PER_SECOND: f64 = 1e9;

/// Latency distribution in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Latency {
    Constant(f64),
    Uniform { min: f64, max: f64 },
}

impl Latency {
    fn validate(&self) -> Result<(), SyncError> {
        let ok = match *self {
            Latency::Constant(s) => s.is_finite() && s > 0.0,
            Latency::Uniform { min, max } => min.is_finite() && max.is_finite() && min > 0.0 && max >= min,
        };
        if ok {
            Ok(())
        } else {
            Err(SyncError::InvalidLatency(format!("{self:?}")))
        }
    }

    fn sample_nanos(&self, rng: &mut impl Rng) -> u64 {
        let seconds = match *self {
            Latency::Constant(s) => s,
            Latency::Uniform { min, max } if max > min => rng.random_range(min..max),
            Latency::Uniform { min, .. } => min,
        };
        ((seconds * NANOS_PER_SECOND).round() as u64).max(1)
    }

    pub fn max_seconds(&self) -> f64 {
        match *self {
            Latency::Constant(s) => s,
            Latency::Uniform { max, .. } => max,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraLatency {
    pub camera_id: u8,
    /// Trigger to end of exposure/readout.
    pub capture: Latency,
    /// Transfer of the captured image to the collection host.
    pub retrieval: Latency,
}

impl CameraLatency {
    pub fn constant(camera_id: u8, capture: f64, retrieval: f64) -> Self {
        Self { camera_id, capture: Latency::Constant(capture), retrieval: Latency::Constant(retrieval) }
    }
}

/// One camera's part in a capture cycle. Times in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraCycle {
    pub camera_id: u8,
    pub capture_latency: f64,
    pub retrieval_latency: f64,
    /// The camera is locked from the release until the cycle's unlock time.
    pub retrieved_at: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaptureCycle {
    pub cycle_index: u64,
    pub release_time: f64,
    /// All locks are released together at the latest retrieval.
    pub unlock_time: f64,
    pub cameras: Vec<CameraCycle>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaptureRun {
    /// One stream per camera in input order.
    pub streams: Vec<Vec<ImageEvent>>,
    pub cycles: Vec<CaptureCycle>,
}

/// Runs the trigger-locked protocol for `duration` seconds. A cycle is
/// recorded when its release happens strictly before `duration`.
pub fn simulate_capture(cameras: &[CameraLatency], duration: f64, seed: u64) -> Result<CaptureRun, SyncError> {
    if cameras.is_empty() {
        return Err(SyncError::NoCameras);
    }
    if !duration.is_finite() || duration < 0.0 {
        return Err(SyncError::InvalidDuration(duration));
    }
    let mut ids = std::collections::BTreeSet::new();
    for c in cameras {
        c.capture.validate()?;
        c.retrieval.validate()?;
        if !ids.insert(c.camera_id) {
            return Err(SyncError::DuplicateCamera(c.camera_id));
        }
    }

    let end = (duration * NANOS_PER_SECOND).round() as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut streams: Vec<Vec<ImageEvent>> = vec![Vec::new(); cameras.len()];
    let mut cycles = Vec::new();
    let mut release: u64 = 0;
    let mut index: u64 = 0;
    while release < end {
        let mut per_camera = Vec::with_capacity(cameras.len());
        let mut unlock = release;
        for (cam, stream) in cameras.iter().zip(streams.iter_mut()) {
            let capture = cam.capture.sample_nanos(&mut rng);
            let retrieval = cam.retrieval.sample_nanos(&mut rng);
            let retrieved = release + capture + retrieval;
            unlock = unlock.max(retrieved);
            stream.push(ImageEvent {
                camera_id: cam.camera_id,
                frame_index: index,
                timestamp: seconds(release),
                image_path: image_path(cam.camera_id, index),
            });
            per_camera.push(CameraCycle {
                camera_id: cam.camera_id,
                capture_latency: seconds(capture),
                retrieval_latency: seconds(retrieval),
                retrieved_at: seconds(retrieved),
            });
        }
        cycles.push(CaptureCycle {
            cycle_index: index,
            release_time: seconds(release),
            unlock_time: seconds(unlock),
            cameras: per_camera,
        });
        release = unlock;
        index += 1;
    }
    Ok(CaptureRun { streams, cycles })
}

fn seconds(ns: u64) -> f64 {
    ns as f64 / NANOS_PER_SECOND
}

/// Frames per second of the synchronized system, `(N − 1) / (t_last − t_first)`.
///
/// All streams must hold the same number of frames; a mismatch means the
/// lock protocol was violated.
pub fn achieved_fps(streams: &[Vec<ImageEvent>]) -> Result<f64, SyncError> {
    let first = streams.first().ok_or(SyncError::NoCameras)?;
    let n = first.len();
    if let Some(bad) = streams.iter().find(|s| s.len() != n) {
        return Err(SyncError::UnequalFrameCounts { expected: n, found: bad.len() });
    }
    if n < 2 {
        return Err(SyncError::TooFewFrames(n));
    }
    let fps =
        streams.iter().map(|s| (n - 1) as f64 / (s[n - 1].timestamp - s[0].timestamp)).fold(f64::INFINITY, f64::min);
    Ok(fps)
}

/// Checks the lock protocol on a cycle log: each cycle holds exactly one
/// capture per camera, unlock equals the slowest retrieval, and no release
/// happens before the previous cycle unlocked.
pub fn check_lock_safety(run: &CaptureRun) -> Result<(), String> {
    let ncams = run.streams.len();
    for (i, c) in run.cycles.iter().enumerate() {
        if c.cameras.len() != ncams {
            return Err(format!("cycle {i}: {} captures for {ncams} cameras", c.cameras.len()));
        }
        let slowest = c.cameras.iter().map(|k| k.retrieved_at).fold(c.release_time, f64::max);
        if slowest != c.unlock_time {
            return Err(format!("cycle {i}: unlock {} != slowest retrieval {slowest}", c.unlock_time));
        }
        if let Some(next) = run.cycles.get(i + 1) {
            if next.release_time < c.unlock_time {
                return Err(format!("cycle {} released before cycle {i} unlocked", i + 1));
            }
        }
    }
    for s in &run.streams {
        if s.len() != run.cycles.len() {
            return Err("stream length differs from cycle count".into());
        }
        if s.windows(2).any(|w| w[1].timestamp <= w[0].timestamp) {
            return Err("timestamps not strictly increasing".into());
        }
        if s.iter().enumerate().any(|(i, e)| e.frame_index != i as u64) {
            return Err("frame indices not dense from 0".into());
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn six(latency: f64) -> Vec<CameraLatency> {
        (1..=6).map(|id| CameraLatency::constant(id, latency / 2.0, latency / 2.0)).collect()
    }

    #[test]
    fn fifty_ms_cycles_give_twenty_fps() {
        let run = simulate_capture(&six(0.050), 10.0, 1).unwrap();
        assert!(run.streams.iter().all(|s| s.len() == 200));
        let last = run.streams[0].last().unwrap().timestamp;
        assert!((last - 9.95).abs() < 1e-12);
        assert!((achieved_fps(&run.streams).unwrap() - 20.0).abs() < 1e-9);
        check_lock_safety(&run).unwrap();
    }

    #[test]
    fn slowest_camera_sets_the_rate() {
        let mut cams: Vec<_> = (1..=5).map(|id| CameraLatency::constant(id, 0.005, 0.005)).collect();
        cams.push(CameraLatency::constant(6, 0.04, 0.06));
        let run = simulate_capture(&cams, 5.0, 3).unwrap();
        assert!((achieved_fps(&run.streams).unwrap() - 10.0).abs() < 1e-9);
        assert!(run.streams.iter().all(|s| s.len() == 50));
    }

    #[test]
    fn seeded_runs_are_identical() {
        let cams: Vec<_> = (1..=6)
            .map(|id| CameraLatency {
                camera_id: id,
                capture: Latency::Uniform { min: 0.01, max: 0.03 },
                retrieval: Latency::Uniform { min: 0.01, max: 0.025 },
            })
            .collect();
        let a = simulate_capture(&cams, 3.0, 42).unwrap();
        let b = simulate_capture(&cams, 3.0, 42).unwrap();
        assert_eq!(a, b);
        let c = simulate_capture(&cams, 3.0, 43).unwrap();
        assert_ne!(a.cycles, c.cycles);
        check_lock_safety(&a).unwrap();
    }

    #[test]
    fn invalid_latencies_rejected() {
        assert!(simulate_capture(&[CameraLatency::constant(1, 0.0, 0.01)], 1.0, 0).is_err());
        assert!(simulate_capture(&[CameraLatency::constant(1, 0.01, -0.01)], 1.0, 0).is_err());
        let bad = CameraLatency {
            camera_id: 1,
            capture: Latency::Uniform { min: 0.02, max: 0.01 },
            retrieval: Latency::Constant(0.01),
        };
        assert!(simulate_capture(&[bad], 1.0, 0).is_err());
        assert!(simulate_capture(&[], 1.0, 0).is_err());
    }

    #[test]
    fn fps_errors() {
        let ev = |t: f64, i: u64| ImageEvent { camera_id: 1, frame_index: i, timestamp: t, image_path: String::new() };
        assert_eq!(achieved_fps(&[vec![ev(0.0, 0), ev(1.0, 1)]]).unwrap(), 1.0);
        assert!(matches!(achieved_fps(&[vec![ev(0.0, 0)]]), Err(SyncError::TooFewFrames(1))));
        let unequal = [vec![ev(0.0, 0), ev(1.0, 1)], vec![ev(0.0, 0)]];
        assert!(matches!(achieved_fps(&unequal), Err(SyncError::UnequalFrameCounts { .. })));
    }
}
