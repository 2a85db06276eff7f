//! Identity F1: one global one-to-one assignment between ground-truth and
//! predicted identities, chosen to maximize the number of frames in which
//! the paired boxes overlap with IoU ≥ α.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::assignment::max_weight_assignment;
use super::{check_threshold, MetricError};
use crate::bbox::iou;
use crate::tracks::TrackSequence;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Idf1Result {
    pub idf1: f64,
    pub idtp: u64,
    pub idfp: u64,
    pub idfn: u64,
}

pub fn idf1_detail(gt: &TrackSequence, pred: &TrackSequence, alpha: f64) -> Result<Idf1Result, MetricError> {
    check_threshold(alpha)?;
    let n_gt = gt.num_boxes() as u64;
    let n_pred = pred.num_boxes() as u64;
    if n_gt + n_pred == 0 {
        return Err(MetricError::Undefined("IDF1 needs at least one ground-truth or predicted box"));
    }
    let gt_ids: Vec<u64> = gt.ids().into_iter().collect();
    let pred_ids: Vec<u64> = pred.ids().into_iter().collect();
    let gt_pos: BTreeMap<u64, usize> = gt_ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();
    let pred_pos: BTreeMap<u64, usize> = pred_ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();

    let mut overlap = vec![vec![0.0f64; pred_ids.len()]; gt_ids.len()];
    for f in TrackSequence::union_frames(gt, pred) {
        for g in gt.boxes_at(f) {
            for p in pred.boxes_at(f) {
                if iou(&g.bbox, &p.bbox) >= alpha {
                    overlap[gt_pos[&g.id]][pred_pos[&p.id]] += 1.0;
                }
            }
        }
    }
    let idtp: u64 = max_weight_assignment(&overlap)
        .into_iter()
        .enumerate()
        .filter_map(|(r, c)| c.map(|c| overlap[r][c] as u64))
        .sum();
    let (idfp, idfn) = (n_pred - idtp, n_gt - idtp);
    Ok(Idf1Result { idf1: 2.0 * idtp as f64 / (2 * idtp + idfp + idfn) as f64, idtp, idfp, idfn })
}

/// `2·IDTP / (2·IDTP + IDFP + IDFN)`.
pub fn idf1(gt: &TrackSequence, pred: &TrackSequence, alpha: f64) -> Result<f64, MetricError> {
    idf1_detail(gt, pred, alpha).map(|r| r.idf1)
}
