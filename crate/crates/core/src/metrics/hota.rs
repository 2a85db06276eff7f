//! Higher Order Tracking Accuracy.
//!
//! For a localization threshold α, detections are matched per frame by a
//! maximum-total-IoU assignment over pairs with IoU ≥ α. For every true
//! positive `c = (g, p)` the association score is
//! `A(c) = |TPA| / (|TPA| + |FNA| + |FPA|)`, where `|TPA|` counts the true
//! positives sharing both ids with `c`, `|FNA|` the remaining detections of
//! `g`, and `|FPA|` the remaining detections of `p`. Then
//! `HOTA_α = sqrt(Σ_c A(c) / (TP + FN + FP))`.
//!
//! Matching does not apply the global association-aware score refinement of
//! the original HOTA evaluation; ties in IoU are the only case where that
//! refinement changes the matching.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::assignment::max_weight_assignment;
use super::{check_threshold, MetricError};
use crate::bbox::iou;
use crate::tracks::TrackSequence;

/// Localization thresholds 0.05, 0.10, …, 0.95.
pub fn hota_thresholds() -> Vec<f64> {
    (1..=19).map(|k| k as f64 / 20.0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HotaAlpha {
    pub alpha: f64,
    pub hota: f64,
    /// Detection accuracy `TP / (TP + FN + FP)`.
    pub det_a: f64,
    /// Association accuracy `Σ A(c) / TP` (0 when there are no TPs).
    pub ass_a: f64,
    pub true_positives: u64,
    pub false_negatives: u64,
    pub false_positives: u64,
}

pub fn hota_alpha_detail(gt: &TrackSequence, pred: &TrackSequence, alpha: f64) -> Result<HotaAlpha, MetricError> {
    check_threshold(alpha)?;
    let mut pair_tp: HashMap<(u64, u64), u64> = HashMap::new();
    let mut gt_dets: HashMap<u64, u64> = HashMap::new();
    let mut pred_dets: HashMap<u64, u64> = HashMap::new();
    let mut tp = 0u64;
    for f in TrackSequence::union_frames(gt, pred) {
        let (g, p) = (gt.boxes_at(f), pred.boxes_at(f));
        for b in g {
            *gt_dets.entry(b.id).or_default() += 1;
        }
        for b in p {
            *pred_dets.entry(b.id).or_default() += 1;
        }
        let w: Vec<Vec<f64>> = g
            .iter()
            .map(|gb| {
                p.iter()
                    .map(|pb| {
                        let v = iou(&gb.bbox, &pb.bbox);
                        if v >= alpha {
                            v
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect();
        for (r, c) in max_weight_assignment(&w).into_iter().enumerate() {
            if let Some(c) = c.filter(|c| w[r][*c] > 0.0) {
                *pair_tp.entry((g[r].id, p[c].id)).or_default() += 1;
                tp += 1;
            }
        }
    }
    let n_gt: u64 = gt_dets.values().sum();
    let n_pred: u64 = pred_dets.values().sum();
    let (fn_, fp) = (n_gt - tp, n_pred - tp);
    let denom = tp + fn_ + fp;
    if denom == 0 {
        return Err(MetricError::Undefined("HOTA needs at least one ground-truth or predicted box"));
    }
    // Each of the |TPA| true positives of a pair shares the same A(c).
    let mut a_sum = 0.0;
    let mut keys: Vec<_> = pair_tp.keys().copied().collect();
    keys.sort_unstable();
    for key in keys {
        let n = pair_tp[&key] as f64;
        let union = (gt_dets[&key.0] + pred_dets[&key.1]) as f64 - n;
        a_sum += n * n / union;
    }
    Ok(HotaAlpha {
        alpha,
        hota: (a_sum / denom as f64).sqrt(),
        det_a: tp as f64 / denom as f64,
        ass_a: if tp == 0 { 0.0 } else { a_sum / tp as f64 },
        true_positives: tp,
        false_negatives: fn_,
        false_positives: fp,
    })
}

pub fn hota_alpha(gt: &TrackSequence, pred: &TrackSequence, alpha: f64) -> Result<f64, MetricError> {
    hota_alpha_detail(gt, pred, alpha).map(|h| h.hota)
}

/// Mean of `HOTA_α` over [`hota_thresholds`], with the per-α values.
pub fn hota_integrated_detail(gt: &TrackSequence, pred: &TrackSequence) -> Result<(f64, Vec<HotaAlpha>), MetricError> {
    let per = hota_thresholds().into_iter().map(|a| hota_alpha_detail(gt, pred, a)).collect::<Result<Vec<_>, _>>()?;
    let mean = per.iter().map(|h| h.hota).sum::<f64>() / per.len() as f64;
    Ok((mean, per))
}

pub fn hota_integrated(gt: &TrackSequence, pred: &TrackSequence) -> Result<f64, MetricError> {
    hota_integrated_detail(gt, pred).map(|(v, _)| v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bbox::BBox;
    use crate::tracks::{Frame, TrackedBox};

    fn tb(id: u64, x: f64) -> TrackedBox {
        TrackedBox::new(id, BBox::new(x, 0.0, 10.0, 10.0), 1.0)
    }

    fn seq(frames: Vec<Vec<TrackedBox>>) -> TrackSequence {
        TrackSequence::new(frames.into_iter().enumerate().map(|(i, boxes)| Frame { index: i as u64, boxes }).collect())
            .unwrap()
    }

    #[test]
    fn perfect_and_single_frame() {
        let gt = seq(vec![vec![tb(1, 0.0), tb(2, 30.0)], vec![tb(1, 1.0)]]);
        assert_eq!(hota_alpha(&gt, &gt, 0.5).unwrap(), 1.0);
        assert_eq!(hota_integrated(&gt, &gt).unwrap(), 1.0);
        let one = seq(vec![vec![tb(1, 0.0)]]);
        assert_eq!(hota_alpha(&one, &seq(vec![vec![tb(5, 0.0)]]), 0.5).unwrap(), 1.0);
    }

    #[test]
    fn id_flip_by_definition() {
        // One object over two frames, predicted as id 7 then id 8.
        // Each TP has TPA = 1, FNA = 1, FPA = 0 → A = 1/2. HOTA = sqrt((1/2 + 1/2) / 2).
        let gt = seq(vec![vec![tb(1, 0.0)], vec![tb(1, 0.0)]]);
        let pred = seq(vec![vec![tb(7, 0.0)], vec![tb(8, 0.0)]]);
        let h = hota_alpha_detail(&gt, &pred, 0.5).unwrap();
        assert!((h.hota - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(h.det_a, 1.0);
        assert_eq!(h.ass_a, 0.5);
    }

    #[test]
    fn constant_across_alpha() {
        // Exact boxes: every α gives the same matching, so the mean equals each value.
        let gt = seq(vec![vec![tb(1, 0.0)], vec![tb(1, 0.0)], vec![tb(1, 0.0)]]);
        let pred = seq(vec![vec![tb(7, 0.0)], vec![tb(7, 0.0)], vec![tb(8, 0.0), tb(9, 50.0)]]);
        let v = hota_alpha(&gt, &pred, 0.3).unwrap();
        assert!((hota_integrated(&gt, &pred).unwrap() - v).abs() < 1e-15);
    }

    #[test]
    fn thresholds_and_errors() {
        let t = hota_thresholds();
        assert_eq!(t.len(), 19);
        assert_eq!(t[0], 0.05);
        assert_eq!(t[18], 0.95);
        let e = TrackSequence::default();
        assert!(matches!(hota_alpha(&e, &e, 0.5), Err(MetricError::Undefined(_))));
        // Only false positives: defined and zero.
        assert_eq!(hota_alpha(&e, &seq(vec![vec![tb(1, 0.0)]]), 0.5).unwrap(), 0.0);
    }
}
