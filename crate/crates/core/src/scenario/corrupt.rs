//! Seeded corruption of ground-truth tracks into synthetic tracker output.
//!
//! Per frame, in order: each box is dropped with `dropout_prob`; a
//! Poisson(`idswitch_rate`) number of surviving, previously seen objects get
//! a fresh id that they keep from then on; surviving boxes get Gaussian
//! jitter; a Poisson(`fp_rate`) number of spurious boxes are placed where
//! they overlap nothing. With zero jitter the ledger's tallies are exactly
//! what CLEAR matching reports.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use super::ScenarioError;
use crate::bbox::{iou, BBox};
use crate::metrics::FrameTally;
use crate::tracks::{Frame, TrackSequence, TrackedBox};

const CANVAS: (f64, f64) = (1920.0, 1200.0);
const FP_SIZE: (f64, f64) = (20.0, 160.0);
const FP_ATTEMPTS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct CorruptionSpec {
    pub dropout_prob: f64,
    /// Pixels, applied to x, y, w and h independently.
    pub jitter_sigma: f64,
    /// Expected id switches per frame.
    pub idswitch_rate: f64,
    /// Expected spurious boxes per frame.
    pub fp_rate: f64,
    pub seed: u64,
}

impl CorruptionSpec {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let ok = (0.0..=1.0).contains(&self.dropout_prob)
            && [self.jitter_sigma, self.idswitch_rate, self.fp_rate].iter().all(|v| v.is_finite() && *v >= 0.0);
        if ok {
            Ok(())
        } else {
            Err(ScenarioError::Invalid(format!("corruption parameters out of range: {self:?}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CorruptionLedger {
    pub ground_truth: u64,
    pub dropped: u64,
    pub id_switches: u64,
    pub false_positives: u64,
    /// `(frame, gt id, new predicted id)` for every injected switch.
    pub switches: Vec<(u64, u64, u64)>,
    /// Expected CLEAR tallies per ground-truth frame, exact when jitter is zero.
    pub tallies: Vec<FrameTally>,
}

impl CorruptionLedger {
    /// True when nothing was injected.
    pub fn is_empty(&self) -> bool {
        self.dropped == 0 && self.id_switches == 0 && self.false_positives == 0
    }

    /// `1 − (FN + FP + IDs) / GT`, or `None` without ground truth.
    pub fn expected_mota(&self) -> Option<f64> {
        (self.ground_truth > 0)
            .then(|| 1.0 - (self.dropped + self.false_positives + self.id_switches) as f64 / self.ground_truth as f64)
    }
}

fn poisson(rng: &mut ChaCha8Rng, rate: f64) -> usize {
    if rate <= 0.0 {
        return 0;
    }
    Poisson::new(rate).expect("positive rate").sample(rng) as usize
}

pub fn corrupt_tracks(
    gt: &TrackSequence,
    spec: &CorruptionSpec,
) -> Result<(TrackSequence, CorruptionLedger), ScenarioError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let jitter = (spec.jitter_sigma > 0.0).then(|| Normal::new(0.0, spec.jitter_sigma).expect("finite sigma"));
    let mut next_id = gt.ids().last().map_or(1, |m| m + 1);
    // gt id → predicted id currently reported for it.
    let mut label: BTreeMap<u64, u64> = BTreeMap::new();
    let mut seen: BTreeSet<u64> = BTreeSet::new();
    let mut ledger = CorruptionLedger::default();
    let mut frames = Vec::with_capacity(gt.frames().len());

    for frame in gt.frames() {
        let kept: Vec<&TrackedBox> =
            frame.boxes.iter().filter(|_| spec.dropout_prob == 0.0 || !rng.random_bool(spec.dropout_prob)).collect();
        let dropped = (frame.boxes.len() - kept.len()) as u64;

        let mut eligible: Vec<u64> = kept.iter().map(|b| b.id).filter(|id| seen.contains(id)).collect();
        let n_switch = poisson(&mut rng, spec.idswitch_rate).min(eligible.len());
        eligible.shuffle(&mut rng);
        eligible.truncate(n_switch);
        eligible.sort_unstable();
        for g in &eligible {
            label.insert(*g, next_id);
            ledger.switches.push((frame.index, *g, next_id));
            next_id += 1;
        }

        let mut out: Vec<TrackedBox> = Vec::with_capacity(kept.len());
        for b in &kept {
            seen.insert(b.id);
            let mut bbox = b.bbox;
            if let Some(n) = &jitter {
                bbox = BBox::new(
                    bbox.x + n.sample(&mut rng),
                    bbox.y + n.sample(&mut rng),
                    (bbox.w + n.sample(&mut rng)).max(0.0),
                    (bbox.h + n.sample(&mut rng)).max(0.0),
                );
            }
            out.push(TrackedBox::new(*label.entry(b.id).or_insert(b.id), bbox, b.confidence));
        }

        let n_fp = poisson(&mut rng, spec.fp_rate);
        let mut placed = 0u64;
        for _ in 0..n_fp {
            for _ in 0..FP_ATTEMPTS {
                let w = rng.random_range(FP_SIZE.0..FP_SIZE.1);
                let h = rng.random_range(FP_SIZE.0..FP_SIZE.1);
                let cand = BBox::new(rng.random_range(0.0..CANVAS.0 - w), rng.random_range(0.0..CANVAS.1 - h), w, h);
                let clear = frame.boxes.iter().chain(out.iter()).all(|b| iou(&b.bbox, &cand) == 0.0);
                if clear {
                    let conf = rng.random_range(0.05..0.95);
                    out.push(TrackedBox::new(next_id, cand, conf));
                    next_id += 1;
                    placed += 1;
                    break;
                }
            }
        }

        let n_gt = frame.boxes.len() as u64;
        ledger.ground_truth += n_gt;
        ledger.dropped += dropped;
        ledger.id_switches += eligible.len() as u64;
        ledger.false_positives += placed;
        ledger.tallies.push(FrameTally {
            frame: frame.index,
            true_positives: n_gt - dropped,
            false_positives: placed,
            false_negatives: dropped,
            id_switches: eligible.len() as u64,
            ground_truth: n_gt,
        });
        frames.push(Frame { index: frame.index, boxes: out });
    }
    let pred = TrackSequence::new(frames).map_err(|e| ScenarioError::Invalid(e.to_string()))?;
    Ok((pred, ledger))
}
