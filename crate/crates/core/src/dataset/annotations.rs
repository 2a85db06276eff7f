//! Per-camera annotation files.
//!
//! JSONL: the first line is the header object, then one row object per line:
//!
//! ```text
//! {"schema":"tomie/1","camera_id":6,"rig":"rig.json","frame":"camera"}
//! {"image_path":"camera_6/images/3.jpg","entity_name":"Pallet_9","position":[-10672.35,1815.89,85.49],"orientation":[0.0037,0.0019,-1.5481],"delta_time":-0.00088,"bbox":[-1,-1,-1,-1],"visible":0}
//! ```
//!
//! CSV: a `# ` line holding the same header JSON, a column line, then rows in
//! the column order image path, entity, position, orientation, delta time,
//! bounding box, visible flag.
//!
//! `delta_time` is `t_pose − t_image` in seconds. `frame` says whether
//! position/orientation are relative to the camera or in the world frame.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::ParseError;
use crate::annotate::{AnnotationRow, PoseFrame};
use crate::bbox::BBox;
use crate::geometry::EulerXyz;
use crate::numfmt::fmt_float;
use crate::sync::io::{csv_records, field_f64, field_int, jsonl_lines};
use crate::SCHEMA_VERSION;

const CSV_COLUMNS: [&str; 14] = [
    "image_path",
    "entity_name",
    "position_x",
    "position_y",
    "position_z",
    "orientation_x",
    "orientation_y",
    "orientation_z",
    "delta_time",
    "bbox_x",
    "bbox_y",
    "bbox_w",
    "bbox_h",
    "visible",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnotationHeader {
    pub schema: String,
    pub camera_id: u8,
    /// Path or name of the rig file the annotations were produced with.
    pub rig: String,
    pub frame: PoseFrame,
}

impl AnnotationHeader {
    pub fn new(camera_id: u8, rig: impl Into<String>, frame: PoseFrame) -> Self {
        Self { schema: SCHEMA_VERSION.to_string(), camera_id, rig: rig.into(), frame }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationFile {
    pub header: AnnotationHeader,
    /// Grouped by image, images in capture order.
    pub rows: Vec<AnnotationRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnnotationFormat {
    Jsonl,
    Csv,
}

impl AnnotationFormat {
    pub fn from_path(path: &std::path::Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => AnnotationFormat::Csv,
            _ => AnnotationFormat::Jsonl,
        }
    }

    pub fn extension(&self) -> &'static str {
        match self {
            AnnotationFormat::Jsonl => "jsonl",
            AnnotationFormat::Csv => "csv",
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RowRecord {
    image_path: String,
    entity_name: String,
    position: [f64; 3],
    orientation: [f64; 3],
    delta_time: f64,
    bbox: BBox,
    visible: u8,
}

pub fn write_annotations(file: &AnnotationFile, format: AnnotationFormat) -> String {
    let header = serde_json::to_string(&file.header).expect("header serializes");
    match format {
        AnnotationFormat::Jsonl => {
            let mut out = header;
            out.push('\n');
            for r in &file.rows {
                let rec = RowRecord {
                    image_path: r.image_path.clone(),
                    entity_name: r.entity_name.clone(),
                    position: r.position,
                    orientation: r.orientation.to_array(),
                    delta_time: r.delta_time,
                    bbox: r.bbox,
                    visible: r.visible as u8,
                };
                out.push_str(&serde_json::to_string(&rec).expect("row serializes"));
                out.push('\n');
            }
            out
        }
        AnnotationFormat::Csv => {
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
            w.write_record(CSV_COLUMNS).expect("in-memory write");
            for r in &file.rows {
                let mut rec = vec![r.image_path.clone(), r.entity_name.clone()];
                rec.extend(r.position.iter().chain(&r.orientation.to_array()).map(|v| fmt_float(*v)));
                rec.push(fmt_float(r.delta_time));
                rec.extend(r.bbox.to_array().iter().map(|v| fmt_float(*v)));
                rec.push((r.visible as u8).to_string());
                w.write_record(&rec).expect("in-memory write");
            }
            let body = String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8");
            format!("# {header}\n{body}")
        }
    }
}

fn parse_header(text: &str, line: usize) -> Result<AnnotationHeader, ParseError> {
    let h: AnnotationHeader =
        serde_json::from_str(text).map_err(|e| ParseError::new(line, format!("bad header: {e}")))?;
    if h.schema != SCHEMA_VERSION {
        return Err(ParseError::new(line, format!("unknown schema version {:?}", h.schema)));
    }
    Ok(h)
}

fn validate_row(row: &AnnotationRow, line: usize) -> Result<(), ParseError> {
    let finite = row.position.iter().all(|v| v.is_finite())
        && row.orientation.is_finite()
        && row.delta_time.is_finite()
        && row.bbox.is_finite();
    if !finite {
        return Err(ParseError::new(line, "non-finite value"));
    }
    if row.visible {
        if row.bbox.w < 1.0 || row.bbox.h < 1.0 {
            return Err(ParseError::new(line, "visible row needs a box of at least 1×1 px"));
        }
    } else if !row.bbox.is_sentinel() {
        return Err(ParseError::new(line, "invisible row must carry the (-1,-1,-1,-1) box"));
    }
    Ok(())
}

fn visible_flag(v: u8, line: usize) -> Result<bool, ParseError> {
    match v {
        0 => Ok(false),
        1 => Ok(true),
        other => Err(ParseError::new(line, format!("visible must be 0 or 1, got {other}"))),
    }
}

/// Parses and validates an annotation file. Errors name the offending line.
pub fn read_annotations(text: &str, format: AnnotationFormat) -> Result<AnnotationFile, ParseError> {
    let (header, rows) = match format {
        AnnotationFormat::Jsonl => {
            let mut lines = jsonl_lines(text);
            let (hl, htext) = lines.next().ok_or_else(|| ParseError::new(1, "missing header line"))?;
            let header = parse_header(htext, hl)?;
            let rows = lines
                .map(|(line, l)| {
                    let rec: RowRecord = serde_json::from_str(l).map_err(|e| ParseError::new(line, e.to_string()))?;
                    let row = AnnotationRow {
                        image_path: rec.image_path,
                        entity_name: rec.entity_name,
                        position: rec.position,
                        orientation: EulerXyz::from_array(rec.orientation),
                        delta_time: rec.delta_time,
                        bbox: rec.bbox,
                        visible: visible_flag(rec.visible, line)?,
                    };
                    Ok((line, row))
                })
                .collect::<Result<Vec<_>, ParseError>>()?;
            (header, rows)
        }
        AnnotationFormat::Csv => {
            let (first, rest) = text.split_once('\n').unwrap_or((text, ""));
            let htext = first.strip_prefix("# ").ok_or_else(|| ParseError::new(1, "missing '# {header}' line"))?;
            let header = parse_header(htext, 1)?;
            let rows = csv_records(rest, &CSV_COLUMNS)
                .map_err(|e| ParseError::new(e.line + 1, e.message))?
                .into_iter()
                .map(|(l, r)| {
                    let line = l + 1;
                    let f = |i: usize| field_f64(&r, i, line, CSV_COLUMNS[i]);
                    let row = AnnotationRow {
                        image_path: r[0].to_string(),
                        entity_name: r[1].to_string(),
                        position: [f(2)?, f(3)?, f(4)?],
                        orientation: EulerXyz::new(f(5)?, f(6)?, f(7)?),
                        delta_time: f(8)?,
                        bbox: BBox::new(f(9)?, f(10)?, f(11)?, f(12)?),
                        visible: visible_flag(field_int(&r, 13, line, "visible")?, line)?,
                    };
                    Ok((line, row))
                })
                .collect::<Result<Vec<_>, ParseError>>()?;
            (header, rows)
        }
    };

    let mut seen_images: HashSet<&str> = HashSet::new();
    let mut current: Option<&str> = None;
    let mut seen_in_image: HashSet<&str> = HashSet::new();
    for (line, row) in &rows {
        validate_row(row, *line)?;
        if current != Some(row.image_path.as_str()) {
            if !seen_images.insert(row.image_path.as_str()) {
                return Err(ParseError::new(*line, format!("rows for {:?} are not contiguous", row.image_path)));
            }
            current = Some(row.image_path.as_str());
            seen_in_image.clear();
        }
        if !seen_in_image.insert(row.entity_name.as_str()) {
            return Err(ParseError::new(*line, format!("entity {:?} appears twice in one image", row.entity_name)));
        }
    }
    Ok(AnnotationFile { header, rows: rows.into_iter().map(|(_, r)| r).collect() })
}
