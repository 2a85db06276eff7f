//! MOT-Challenge text interchange.
//!
//! One box per line: `frame,id,bb_left,bb_top,bb_width,bb_height,conf,x,y,z`.
//! Ground truth exported from annotations has `conf = 1` and `x,y,z = -1`.
//! The frame number is the image's frame index taken from its file name.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{AnnotationFile, ParseError};
use crate::bbox::BBox;
use crate::numfmt::{fmt_float, parse_float};
use crate::sync::frame_from_image_path;
use crate::tracks::{Frame, TrackSequence, TrackedBox};
use crate::SCHEMA_VERSION;

/// Stable mapping from entity names to MOT integer ids.
///
/// New names are appended in sorted order after the current maximum id, so
/// a persisted map keeps every previously issued id unchanged.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IdMap {
    pub schema: String,
    pub ids: BTreeMap<String, u64>,
}

impl IdMap {
    pub fn new() -> Self {
        Self { schema: SCHEMA_VERSION.to_string(), ids: BTreeMap::new() }
    }

    pub fn get(&self, name: &str) -> Option<u64> {
        self.ids.get(name).copied()
    }

    pub fn name_of(&self, id: u64) -> Option<&str> {
        self.ids.iter().find(|(_, v)| **v == id).map(|(k, _)| k.as_str())
    }

    pub fn extend<'a>(&mut self, names: impl IntoIterator<Item = &'a str>) {
        let fresh: BTreeSet<&str> = names.into_iter().filter(|n| !self.ids.contains_key(*n)).collect();
        let first = self.ids.values().max().copied().unwrap_or(0) + 1;
        for (id, n) in (first..).zip(fresh) {
            self.ids.insert(n.to_string(), id);
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("id map serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self, ParseError> {
        let m: IdMap = serde_json::from_str(text).map_err(|e| ParseError::new(e.line(), e.to_string()))?;
        if m.schema != SCHEMA_VERSION {
            return Err(ParseError::new(1, format!("unknown schema version {:?}", m.schema)));
        }
        let distinct: BTreeSet<u64> = m.ids.values().copied().collect();
        if distinct.len() != m.ids.len() {
            return Err(ParseError::new(1, "id map assigns one id to several names"));
        }
        Ok(m)
    }
}

/// Visible rows as a ground-truth track sequence (`conf = 1`). Unknown
/// entity names are added to `ids`.
pub fn annotations_to_tracks(file: &AnnotationFile, ids: &mut IdMap) -> Result<TrackSequence, ParseError> {
    ids.extend(file.rows.iter().filter(|r| r.visible).map(|r| r.entity_name.as_str()));
    let mut boxes = Vec::new();
    for (i, r) in file.rows.iter().enumerate().filter(|(_, r)| r.visible) {
        let frame = frame_from_image_path(&r.image_path)
            .ok_or_else(|| ParseError::new(i + 1, format!("no frame number in image path {:?}", r.image_path)))?;
        let id = ids.get(&r.entity_name).expect("name was just added");
        boxes.push((frame, TrackedBox::new(id, r.bbox, 1.0)));
    }
    TrackSequence::from_boxes(boxes).map_err(|e| ParseError::new(0, e.to_string()))
}

/// Writes a sequence as MOT-Challenge text, frames ascending, boxes in
/// stored order.
pub fn export_mot(tracks: &TrackSequence) -> String {
    let mut out = String::new();
    for f in tracks.frames() {
        for b in &f.boxes {
            let BBox { x, y, w, h } = b.bbox;
            out.push_str(&format!(
                "{},{},{},{},{},{},{},-1,-1,-1\n",
                f.index,
                b.id,
                fmt_float(x),
                fmt_float(y),
                fmt_float(w),
                fmt_float(h),
                fmt_float(b.confidence)
            ));
        }
    }
    out
}

/// Parses MOT-Challenge text. Needs at least the six box columns; the
/// confidence defaults to 1 when absent. Frames must be non-decreasing.
pub fn import_tracker_results(text: &str) -> Result<TrackSequence, ParseError> {
    let mut frames: Vec<Frame> = Vec::new();
    let mut ids_in_frame: BTreeSet<u64> = BTreeSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.trim();
        if l.is_empty() {
            continue;
        }
        let cols: Vec<&str> = l.split(',').map(str::trim).collect();
        if !(6..=10).contains(&cols.len()) {
            return Err(ParseError::new(line, format!("expected 6 to 10 columns, found {}", cols.len())));
        }
        let int = |s: &str, name: &str| -> Result<u64, ParseError> {
            s.parse::<u64>().map_err(|_| ParseError::new(line, format!("{name}: not a non-negative integer: {s:?}")))
        };
        let float = |s: &str, name: &str| -> Result<f64, ParseError> {
            parse_float(s)
                .filter(|v| v.is_finite())
                .ok_or_else(|| ParseError::new(line, format!("{name}: not a finite number: {s:?}")))
        };
        let frame = int(cols[0], "frame")?;
        let id = int(cols[1], "id")?;
        let bbox = BBox::new(
            float(cols[2], "bb_left")?,
            float(cols[3], "bb_top")?,
            float(cols[4], "bb_width")?,
            float(cols[5], "bb_height")?,
        );
        if bbox.w < 0.0 || bbox.h < 0.0 {
            return Err(ParseError::new(line, "negative box width or height"));
        }
        let confidence = match cols.get(6) {
            Some(c) => float(c, "conf")?,
            None => 1.0,
        };
        if !(0.0..=1.0).contains(&confidence) {
            return Err(ParseError::new(line, format!("conf {confidence} outside [0, 1]")));
        }
        match frames.last_mut() {
            Some(last) if last.index == frame => {}
            Some(last) if last.index > frame => {
                return Err(ParseError::new(line, format!("frame {frame} after frame {}", last.index)));
            }
            _ => {
                frames.push(Frame { index: frame, boxes: Vec::new() });
                ids_in_frame.clear();
            }
        }
        if !ids_in_frame.insert(id) {
            return Err(ParseError::new(line, format!("id {id} repeated in frame {frame}")));
        }
        frames.last_mut().expect("frame pushed above").boxes.push(TrackedBox::new(id, bbox, confidence));
    }
    TrackSequence::new(frames).map_err(|e| ParseError::new(0, e.to_string()))
}
