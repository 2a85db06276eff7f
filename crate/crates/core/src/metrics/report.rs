//! Bundled evaluation of a predicted sequence against ground truth.

use serde::{Deserialize, Serialize};

use super::clear::{mota, FrameTally};
use super::detection::{detection_ap_ar, DetectionMetrics};
use super::hota::{hota_integrated_detail, HotaAlpha};
use super::identity::{idf1_detail, Idf1Result};
use super::{check_threshold, MetricError};
use crate::tracks::TrackSequence;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalConfig {
    /// IoU threshold for CLEAR matching and IDF1.
    pub iou_threshold: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self { iou_threshold: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub iou_threshold: f64,
    pub mota: f64,
    pub idf1: f64,
    pub hota: f64,
    pub id_switches: u64,
    pub true_positives: u64,
    pub false_positives: u64,
    pub false_negatives: u64,
    pub ground_truth: u64,
    pub identity: Idf1Result,
    pub hota_per_alpha: Vec<HotaAlpha>,
    pub detection: DetectionMetrics,
    pub tallies: Vec<FrameTally>,
}

pub fn evaluate(gt: &TrackSequence, pred: &TrackSequence, config: &EvalConfig) -> Result<MetricReport, MetricError> {
    let alpha = config.iou_threshold;
    check_threshold(alpha)?;
    let clear = mota(gt, pred, alpha)?;
    let identity = idf1_detail(gt, pred, alpha)?;
    let (hota, hota_per_alpha) = hota_integrated_detail(gt, pred)?;
    let detection = detection_ap_ar(gt, pred)?;
    Ok(MetricReport {
        iou_threshold: alpha,
        mota: clear.mota,
        idf1: identity.idf1,
        hota,
        id_switches: clear.id_switches,
        true_positives: clear.true_positives,
        false_positives: clear.false_positives,
        false_negatives: clear.false_negatives,
        ground_truth: clear.ground_truth,
        identity,
        hota_per_alpha,
        detection,
        tallies: clear.tallies,
    })
}

/// Fixed-width text table with one row per named report.
pub fn format_table(rows: &[(&str, &MetricReport)]) -> String {
    let width = rows.iter().map(|(n, _)| n.len()).max().unwrap_or(0).max(6);
    let mut out = format!("{:<width$}  {:>7}  {:>7}  {:>7}  {:>5}\n", "Method", "MOTA", "IDF1", "HOTA", "IDs");
    for (name, r) in rows {
        out.push_str(&format!(
            "{:<width$}  {:>7.3}  {:>7.3}  {:>7.3}  {:>5}\n",
            name, r.mota, r.idf1, r.hota, r.id_switches
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bbox::BBox;
    use crate::tracks::{Frame, TrackedBox};

    #[test]
    fn perfect_report_and_table() {
        let frames = (0..3)
            .map(|i| Frame { index: i, boxes: vec![TrackedBox::new(1, BBox::new(i as f64, 0.0, 10.0, 10.0), 1.0)] })
            .collect();
        let gt = TrackSequence::new(frames).unwrap();
        let r = evaluate(&gt, &gt, &EvalConfig::default()).unwrap();
        assert_eq!((r.mota, r.idf1, r.hota, r.id_switches), (1.0, 1.0, 1.0, 0));
        assert_eq!(r.hota_per_alpha.len(), 19);
        let table = format_table(&[("oracle", &r)]);
        assert!(table.lines().nth(1).unwrap().starts_with("oracle"));
        assert!(table.contains("1.000"));
        let json = serde_json::to_string(&r).unwrap();
        let back: MetricReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn rejects_bad_threshold() {
        let cfg = EvalConfig { iou_threshold: 1.5 };
        let e = TrackSequence::default();
        assert!(matches!(evaluate(&e, &e, &cfg), Err(MetricError::InvalidThreshold(_))));
    }
}
