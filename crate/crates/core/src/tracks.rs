//! Per-frame sets of identified boxes: ground truth or tracker output.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::bbox::BBox;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrackError {
    #[error("frame {frame}: duplicate id {id}")]
    DuplicateId { frame: u64, id: u64 },
    #[error("frame {frame}, id {id}: box must be finite with non-negative size")]
    InvalidBox { frame: u64, id: u64 },
    #[error("frame {frame}, id {id}: confidence {confidence} outside [0, 1]")]
    InvalidConfidence { frame: u64, id: u64, confidence: f64 },
    #[error("frames must be strictly increasing (frame {frame} after {previous})")]
    FrameOrder { frame: u64, previous: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackedBox {
    pub id: u64,
    pub bbox: BBox,
    pub confidence: f64,
}

impl TrackedBox {
    pub fn new(id: u64, bbox: BBox, confidence: f64) -> Self {
        Self { id, bbox, confidence }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub index: u64,
    pub boxes: Vec<TrackedBox>,
}

/// Frames in increasing index order. Empty frames are dropped on
/// construction, so two sequences with the same boxes compare equal no
/// matter which empty frames they were built with.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrackSequence {
    frames: Vec<Frame>,
}

impl TrackSequence {
    pub fn new(frames: Vec<Frame>) -> Result<Self, TrackError> {
        let mut previous: Option<u64> = None;
        let mut out = Vec::with_capacity(frames.len());
        for f in frames {
            if let Some(p) = previous {
                if f.index <= p {
                    return Err(TrackError::FrameOrder { frame: f.index, previous: p });
                }
            }
            previous = Some(f.index);
            let mut ids = BTreeSet::new();
            for b in &f.boxes {
                if !ids.insert(b.id) {
                    return Err(TrackError::DuplicateId { frame: f.index, id: b.id });
                }
                if !b.bbox.is_finite() || b.bbox.w < 0.0 || b.bbox.h < 0.0 {
                    return Err(TrackError::InvalidBox { frame: f.index, id: b.id });
                }
                if !(0.0..=1.0).contains(&b.confidence) {
                    return Err(TrackError::InvalidConfidence { frame: f.index, id: b.id, confidence: b.confidence });
                }
            }
            if !f.boxes.is_empty() {
                out.push(f);
            }
        }
        Ok(Self { frames: out })
    }

    /// Builds a sequence from `(frame, box)` pairs in any order; boxes within a
    /// frame keep their relative input order.
    pub fn from_boxes(boxes: impl IntoIterator<Item = (u64, TrackedBox)>) -> Result<Self, TrackError> {
        let mut by_frame: std::collections::BTreeMap<u64, Vec<TrackedBox>> = Default::default();
        for (f, b) in boxes {
            by_frame.entry(f).or_default().push(b);
        }
        Self::new(by_frame.into_iter().map(|(index, boxes)| Frame { index, boxes }).collect())
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn frame(&self, index: u64) -> Option<&Frame> {
        self.frames.binary_search_by_key(&index, |f| f.index).ok().map(|i| &self.frames[i])
    }

    pub fn boxes_at(&self, index: u64) -> &[TrackedBox] {
        self.frame(index).map_or(&[], |f| &f.boxes)
    }

    pub fn num_boxes(&self) -> usize {
        self.frames.iter().map(|f| f.boxes.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn ids(&self) -> BTreeSet<u64> {
        self.frames.iter().flat_map(|f| f.boxes.iter().map(|b| b.id)).collect()
    }

    /// Union of frame indices present in either sequence, ascending.
    pub fn union_frames(a: &TrackSequence, b: &TrackSequence) -> Vec<u64> {
        let set: BTreeSet<u64> = a.frames.iter().chain(&b.frames).map(|f| f.index).collect();
        set.into_iter().collect()
    }

    /// Applies `f` to every box, keeping the frame structure.
    pub fn map_boxes(&self, mut f: impl FnMut(u64, &TrackedBox) -> TrackedBox) -> Result<Self, TrackError> {
        Self::new(
            self.frames
                .iter()
                .map(|fr| Frame { index: fr.index, boxes: fr.boxes.iter().map(|b| f(fr.index, b)).collect() })
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(id: u64) -> TrackedBox {
        TrackedBox::new(id, BBox::new(0.0, 0.0, 10.0, 10.0), 1.0)
    }

    #[test]
    fn rejects_duplicates_and_disorder() {
        assert!(TrackSequence::new(vec![Frame { index: 0, boxes: vec![b(1), b(1)] }]).is_err());
        let frames = vec![Frame { index: 2, boxes: vec![b(1)] }, Frame { index: 1, boxes: vec![b(1)] }];
        assert!(TrackSequence::new(frames).is_err());
        let bad = TrackedBox::new(1, BBox::new(0.0, 0.0, -1.0, 1.0), 1.0);
        assert!(TrackSequence::new(vec![Frame { index: 0, boxes: vec![bad] }]).is_err());
        let bad = TrackedBox::new(1, BBox::new(0.0, 0.0, 1.0, 1.0), 1.5);
        assert!(TrackSequence::new(vec![Frame { index: 0, boxes: vec![bad] }]).is_err());
    }

    #[test]
    fn empty_frames_are_dropped() {
        let s =
            TrackSequence::new(vec![Frame { index: 0, boxes: vec![] }, Frame { index: 3, boxes: vec![b(7)] }]).unwrap();
        assert_eq!(s.frames().len(), 1);
        assert_eq!(s.boxes_at(3).len(), 1);
        assert!(s.boxes_at(0).is_empty());
    }
}
