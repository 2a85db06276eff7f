//! COCO-style detection AP / AR for a single class, treating every frame as
//! one image.
//!
//! For each IoU threshold in 0.50:0.05:0.95, detections in a frame are taken
//! in descending confidence (at most [`MAX_DETECTIONS`]) and greedily matched
//! to the unmatched ground truth with the highest IoU at or above the
//! threshold. Across frames, detections are ranked by confidence (stable, so
//! equal confidences keep frame order) to build the precision-recall curve.
//! AP is the 101-point interpolated precision; AR is the final recall.

use serde::{Deserialize, Serialize};

use super::MetricError;
use crate::bbox::iou;
use crate::tracks::TrackSequence;

pub const MAX_DETECTIONS: usize = 100;

/// IoU thresholds 0.50, 0.55, …, 0.95.
pub fn ap_thresholds() -> Vec<f64> {
    (0..10).map(|k| (50 + 5 * k) as f64 / 100.0).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionMetrics {
    pub ap50: f64,
    pub ap75: f64,
    /// Mean AP over 0.50:0.05:0.95.
    pub ap: f64,
    /// Mean final recall over 0.50:0.05:0.95, up to 100 detections per frame.
    pub ar: f64,
    /// Best `2PR / (P + R)` along the IoU-0.50 precision-recall curve.
    pub f1: f64,
    pub ap_per_threshold: Vec<f64>,
    pub recall_per_threshold: Vec<f64>,
}

/// Ranked detections for one threshold: `(confidence, is_true_positive)`.
fn ranked_matches(gt: &TrackSequence, pred: &TrackSequence, threshold: f64) -> Vec<(f64, bool)> {
    let mut out = Vec::new();
    for f in TrackSequence::union_frames(gt, pred) {
        let g = gt.boxes_at(f);
        let mut dets: Vec<_> = pred.boxes_at(f).iter().collect();
        dets.sort_by(|a, b| b.confidence.total_cmp(&a.confidence));
        dets.truncate(MAX_DETECTIONS);
        let mut taken = vec![false; g.len()];
        for d in dets {
            let mut best = threshold;
            let mut hit = None;
            for (gi, gb) in g.iter().enumerate() {
                if taken[gi] {
                    continue;
                }
                let v = iou(&d.bbox, &gb.bbox);
                if v >= best {
                    best = v;
                    hit = Some(gi);
                }
            }
            if let Some(gi) = hit {
                taken[gi] = true;
            }
            out.push((d.confidence, hit.is_some()));
        }
    }
    out.sort_by(|a, b| b.0.total_cmp(&a.0));
    out
}

/// Cumulative (precision, recall) after each ranked detection.
fn pr_curve(ranked: &[(f64, bool)], n_gt: usize) -> Vec<(f64, f64)> {
    let mut tp = 0usize;
    ranked
        .iter()
        .enumerate()
        .map(|(i, (_, hit))| {
            tp += *hit as usize;
            (tp as f64 / (i + 1) as f64, tp as f64 / n_gt as f64)
        })
        .collect()
}

fn interpolated_ap(curve: &[(f64, f64)]) -> f64 {
    let mut precision: Vec<f64> = curve.iter().map(|c| c.0).collect();
    for i in (1..precision.len()).rev() {
        precision[i - 1] = precision[i - 1].max(precision[i]);
    }
    let recall: Vec<f64> = curve.iter().map(|c| c.1).collect();
    let total: f64 = (0..=100)
        .map(|k| {
            let r = k as f64 / 100.0;
            let idx = recall.partition_point(|v| *v < r);
            precision.get(idx).copied().unwrap_or(0.0)
        })
        .sum();
    total / 101.0
}

pub fn detection_ap_ar(gt: &TrackSequence, pred: &TrackSequence) -> Result<DetectionMetrics, MetricError> {
    let n_gt = gt.num_boxes();
    if n_gt == 0 {
        return Err(MetricError::Undefined("AP/AR need at least one ground-truth box"));
    }
    let mut ap_per_threshold = Vec::new();
    let mut recall_per_threshold = Vec::new();
    let mut f1 = 0.0;
    for (k, t) in ap_thresholds().into_iter().enumerate() {
        let curve = pr_curve(&ranked_matches(gt, pred, t), n_gt);
        ap_per_threshold.push(interpolated_ap(&curve));
        recall_per_threshold.push(curve.last().map_or(0.0, |c| c.1));
        if k == 0 {
            f1 = curve.iter().filter(|(p, r)| p + r > 0.0).map(|(p, r)| 2.0 * p * r / (p + r)).fold(0.0, f64::max);
        }
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    Ok(DetectionMetrics {
        ap50: ap_per_threshold[0],
        ap75: ap_per_threshold[5],
        ap: mean(&ap_per_threshold),
        ar: mean(&recall_per_threshold),
        f1,
        ap_per_threshold,
        recall_per_threshold,
    })
}
