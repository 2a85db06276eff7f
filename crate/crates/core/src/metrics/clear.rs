//! CLEAR-MOT frame matching, ID switches and MOTA.
//!
//! Per frame: pairs matched in the immediately preceding frame are kept if
//! their IoU is still at least α; the remaining boxes are matched by a
//! maximum-total-IoU assignment restricted to pairs with IoU ≥ α. A ground
//! truth object whose matched prediction id differs from the one it was last
//! matched to (in any earlier frame) counts as an ID switch.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::assignment::max_weight_assignment;
use super::{check_threshold, MetricError};
use crate::bbox::iou;
use crate::tracks::{TrackSequence, TrackedBox};

/// Per-frame CLEAR counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FrameTally {
    pub frame: u64,
    pub true_positives: u64,
    pub false_positives: u64,
    pub false_negatives: u64,
    pub id_switches: u64,
    pub ground_truth: u64,
}

impl FrameTally {
    pub fn errors(&self) -> u64 {
        self.false_positives + self.false_negatives + self.id_switches
    }
}

/// One matched `(gt id, predicted id)` pair in a frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchedPair {
    pub gt_id: u64,
    pub pred_id: u64,
    pub iou: f64,
}

/// Matching history carried from frame to frame.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ClearState {
    /// gt id → pred id pairs matched in the previous frame.
    pub carryover: BTreeMap<u64, u64>,
    /// gt id → pred id of its most recent match.
    pub last_match: BTreeMap<u64, u64>,
}

impl ClearState {
    pub fn advance(&mut self, pairs: &[MatchedPair]) {
        self.carryover.clear();
        for p in pairs {
            self.carryover.insert(p.gt_id, p.pred_id);
            self.last_match.insert(p.gt_id, p.pred_id);
        }
    }
}

/// Matches one frame. `state` supplies the carryover pairs and each gt
/// object's last matched id; it is not modified.
pub fn match_frame(
    frame: u64,
    gt: &[TrackedBox],
    pred: &[TrackedBox],
    alpha: f64,
    state: &ClearState,
) -> (Vec<MatchedPair>, FrameTally) {
    let mut gt_used = vec![false; gt.len()];
    let mut pred_used = vec![false; pred.len()];
    let mut pairs = Vec::new();

    for (gi, g) in gt.iter().enumerate() {
        let Some(&pid) = state.carryover.get(&g.id) else { continue };
        if let Some(pi) = pred.iter().position(|p| p.id == pid) {
            let v = iou(&g.bbox, &pred[pi].bbox);
            if v >= alpha {
                gt_used[gi] = true;
                pred_used[pi] = true;
                pairs.push(MatchedPair { gt_id: g.id, pred_id: pid, iou: v });
            }
        }
    }

    let free_gt: Vec<usize> = (0..gt.len()).filter(|i| !gt_used[*i]).collect();
    let free_pred: Vec<usize> = (0..pred.len()).filter(|i| !pred_used[*i]).collect();
    let ious: Vec<Vec<f64>> = free_gt
        .iter()
        .map(|&gi| {
            free_pred
                .iter()
                .map(|&pi| {
                    let v = iou(&gt[gi].bbox, &pred[pi].bbox);
                    if v >= alpha {
                        v
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    for (r, c) in max_weight_assignment(&ious).into_iter().enumerate() {
        let Some(c) = c else { continue };
        if ious[r][c] > 0.0 {
            let (g, p) = (&gt[free_gt[r]], &pred[free_pred[c]]);
            pairs.push(MatchedPair { gt_id: g.id, pred_id: p.id, iou: ious[r][c] });
        }
    }

    let id_switches =
        pairs.iter().filter(|p| state.last_match.get(&p.gt_id).is_some_and(|last| *last != p.pred_id)).count() as u64;
    let tp = pairs.len() as u64;
    let tally = FrameTally {
        frame,
        true_positives: tp,
        false_positives: pred.len() as u64 - tp,
        false_negatives: gt.len() as u64 - tp,
        id_switches,
        ground_truth: gt.len() as u64,
    };
    (pairs, tally)
}

/// Per-frame tallies for a whole sequence, over the union of frames.
/// Carryover only bridges consecutive frame indices.
pub fn clear_tallies(gt: &TrackSequence, pred: &TrackSequence, alpha: f64) -> Result<Vec<FrameTally>, MetricError> {
    check_threshold(alpha)?;
    let mut state = ClearState::default();
    let mut previous: Option<u64> = None;
    let mut tallies = Vec::new();
    for f in TrackSequence::union_frames(gt, pred) {
        if previous.is_some_and(|p| p + 1 != f) {
            state.carryover.clear();
        }
        let (pairs, tally) = match_frame(f, gt.boxes_at(f), pred.boxes_at(f), alpha, &state);
        state.advance(&pairs);
        tallies.push(tally);
        previous = Some(f);
    }
    Ok(tallies)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotaResult {
    pub mota: f64,
    pub true_positives: u64,
    pub false_positives: u64,
    pub false_negatives: u64,
    pub id_switches: u64,
    pub ground_truth: u64,
    pub tallies: Vec<FrameTally>,
}

/// `1 − Σ(FP_t + FN_t + IDs_t) / Σ GT_t`.
pub fn mota(gt: &TrackSequence, pred: &TrackSequence, alpha: f64) -> Result<MotaResult, MetricError> {
    let tallies = clear_tallies(gt, pred, alpha)?;
    let sum = |f: fn(&FrameTally) -> u64| tallies.iter().map(f).sum::<u64>();
    let ground_truth = sum(|t| t.ground_truth);
    if ground_truth == 0 {
        return Err(MetricError::Undefined("MOTA needs at least one ground-truth box"));
    }
    let errors = sum(FrameTally::errors);
    Ok(MotaResult {
        mota: 1.0 - errors as f64 / ground_truth as f64,
        true_positives: sum(|t| t.true_positives),
        false_positives: sum(|t| t.false_positives),
        false_negatives: sum(|t| t.false_negatives),
        id_switches: sum(|t| t.id_switches),
        ground_truth,
        tallies,
    })
}
