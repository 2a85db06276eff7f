//! Pose-stream, image-log and matched-pair files.
//!
//! Pose streams are CSV (`timestamp,entity_name,x,y,z,rx,ry,rz,valid`) or
//! JSONL. Image logs are CSV (`camera_id,frame_index,timestamp,path`).
//! Matched pairs are JSONL, one [`MatchedPose`] per line.

use std::str::FromStr;

use serde_json::{json, Value};

use super::{ImageEvent, MatchedPose, PoseSample};
use crate::dataset::ParseError;
use crate::geometry::EulerXyz;
use crate::numfmt::{fmt_float, parse_float};

const POSE_HEADER: [&str; 9] = ["timestamp", "entity_name", "x", "y", "z", "rx", "ry", "rz", "valid"];
const IMAGE_HEADER: [&str; 4] = ["camera_id", "frame_index", "timestamp", "path"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamFormat {
    Csv,
    Jsonl,
}

impl StreamFormat {
    /// `.jsonl`/`.json` selects JSONL, anything else CSV.
    pub fn from_path(path: &std::path::Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl") | Some("json") => StreamFormat::Jsonl,
            _ => StreamFormat::Csv,
        }
    }
}

impl FromStr for StreamFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(StreamFormat::Csv),
            "json" | "jsonl" => Ok(StreamFormat::Jsonl),
            other => Err(format!("unsupported stream format {other:?}")),
        }
    }
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8 output")
}

pub(crate) fn csv_records(text: &str, header: &[&str]) -> Result<Vec<(usize, csv::StringRecord)>, ParseError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let got = rdr.headers().map_err(|e| ParseError::new(1, e.to_string()))?.clone();
    if got.iter().map(str::trim).ne(header.iter().copied()) {
        return Err(ParseError::new(1, format!("expected header {}", header.join(","))));
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| ParseError::new(e.position().map_or(0, |p| p.line() as usize), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() != header.len() {
            return Err(ParseError::new(line, format!("expected {} fields, found {}", header.len(), rec.len())));
        }
        out.push((line, rec));
    }
    Ok(out)
}

pub(crate) fn field_f64(rec: &csv::StringRecord, i: usize, line: usize, name: &str) -> Result<f64, ParseError> {
    parse_float(&rec[i]).ok_or_else(|| ParseError::new(line, format!("{name}: not a number: {:?}", &rec[i])))
}

pub(crate) fn field_int<T: FromStr>(
    rec: &csv::StringRecord,
    i: usize,
    line: usize,
    name: &str,
) -> Result<T, ParseError> {
    rec[i].trim().parse().map_err(|_| ParseError::new(line, format!("{name}: not an integer: {:?}", &rec[i])))
}

pub fn write_pose_stream(samples: &[PoseSample], format: StreamFormat) -> String {
    match format {
        StreamFormat::Csv => {
            let mut w = csv_writer();
            w.write_record(POSE_HEADER).expect("in-memory write");
            for s in samples {
                let mut rec = vec![fmt_float(s.timestamp), s.entity_name.clone()];
                rec.extend(s.position.iter().map(|v| fmt_float(*v)));
                rec.extend(s.orientation.to_array().iter().map(|v| fmt_float(*v)));
                rec.push(if s.valid { "1" } else { "0" }.to_string());
                w.write_record(&rec).expect("in-memory write");
            }
            finish(w)
        }
        StreamFormat::Jsonl => {
            let mut out = String::new();
            for s in samples {
                let v = json!({
                    "timestamp": json_float(s.timestamp),
                    "entity_name": s.entity_name,
                    "position": s.position.map(json_float),
                    "orientation": s.orientation.to_array().map(json_float),
                    "valid": s.valid,
                });
                out.push_str(&v.to_string());
                out.push('\n');
            }
            out
        }
    }
}

pub fn read_pose_stream(text: &str, format: StreamFormat) -> Result<Vec<PoseSample>, ParseError> {
    match format {
        StreamFormat::Csv => csv_records(text, &POSE_HEADER)?
            .into_iter()
            .map(|(line, r)| {
                let f = |i: usize, n: &str| field_f64(&r, i, line, n);
                let valid = match r[8].trim() {
                    "1" | "true" => true,
                    "0" | "false" => false,
                    other => return Err(ParseError::new(line, format!("valid: expected 0 or 1, got {other:?}"))),
                };
                Ok(PoseSample {
                    timestamp: f(0, "timestamp")?,
                    entity_name: r[1].to_string(),
                    position: [f(2, "x")?, f(3, "y")?, f(4, "z")?],
                    orientation: EulerXyz::new(f(5, "rx")?, f(6, "ry")?, f(7, "rz")?),
                    valid,
                })
            })
            .collect(),
        StreamFormat::Jsonl => jsonl_lines(text)
            .map(|(line, l)| {
                let v: Value = serde_json::from_str(l).map_err(|e| ParseError::new(line, e.to_string()))?;
                let err = |m: &str| ParseError::new(line, m.to_string());
                let triple = |key: &str| -> Result<[f64; 3], ParseError> {
                    let a = v.get(key).and_then(Value::as_array).ok_or_else(|| err(&format!("missing {key}")))?;
                    if a.len() != 3 {
                        return Err(err(&format!("{key} must have 3 entries")));
                    }
                    Ok([from_json_float(&a[0], line)?, from_json_float(&a[1], line)?, from_json_float(&a[2], line)?])
                };
                Ok(PoseSample {
                    timestamp: from_json_float(v.get("timestamp").ok_or_else(|| err("missing timestamp"))?, line)?,
                    entity_name: v
                        .get("entity_name")
                        .and_then(Value::as_str)
                        .ok_or_else(|| err("missing entity_name"))?
                        .to_string(),
                    position: triple("position")?,
                    orientation: EulerXyz::from_array(triple("orientation")?),
                    valid: v.get("valid").and_then(Value::as_bool).ok_or_else(|| err("missing valid"))?,
                })
            })
            .collect(),
    }
}

// JSON has no NaN/Inf; those are written as strings.
fn json_float(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::String(fmt_float(v))
    }
}

fn from_json_float(v: &Value, line: usize) -> Result<f64, ParseError> {
    match v {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => parse_float(s).filter(|f| !f.is_finite()),
        _ => None,
    }
    .ok_or_else(|| ParseError::new(line, format!("not a number: {v}")))
}

pub(crate) fn jsonl_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| !l.trim().is_empty())
}

pub fn write_image_log(events: &[ImageEvent]) -> String {
    let mut w = csv_writer();
    w.write_record(IMAGE_HEADER).expect("in-memory write");
    for e in events {
        w.write_record([
            e.camera_id.to_string(),
            e.frame_index.to_string(),
            fmt_float(e.timestamp),
            e.image_path.clone(),
        ])
        .expect("in-memory write");
    }
    finish(w)
}

pub fn read_image_log(text: &str) -> Result<Vec<ImageEvent>, ParseError> {
    csv_records(text, &IMAGE_HEADER)?
        .into_iter()
        .map(|(line, r)| {
            Ok(ImageEvent {
                camera_id: field_int(&r, 0, line, "camera_id")?,
                frame_index: field_int(&r, 1, line, "frame_index")?,
                timestamp: field_f64(&r, 2, line, "timestamp")?,
                image_path: r[3].to_string(),
            })
        })
        .collect()
}

pub fn write_matched(pairs: &[MatchedPose]) -> String {
    let mut out = String::new();
    for p in pairs {
        out.push_str(&serde_json::to_string(p).expect("matched pair serializes"));
        out.push('\n');
    }
    out
}

pub fn read_matched(text: &str) -> Result<Vec<MatchedPose>, ParseError> {
    jsonl_lines(text)
        .map(|(line, l)| serde_json::from_str(l).map_err(|e| ParseError::new(line, e.to_string())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sync::{image_path, synchronize};

    fn samples() -> Vec<PoseSample> {
        vec![
            PoseSample {
                timestamp: 0.005,
                entity_name: "Pallet_9".into(),
                position: [-10672.35, 1815.89, 85.49],
                orientation: EulerXyz::new(0.0037, 0.0019, -1.5481),
                valid: true,
            },
            PoseSample {
                timestamp: 0.01,
                entity_name: "Forklift_2".into(),
                position: [f64::NAN, 1.0, f64::INFINITY],
                orientation: EulerXyz::ZERO,
                valid: false,
            },
            PoseSample {
                timestamp: 1e-9,
                entity_name: "Barrel, odd".into(),
                position: [0.1 + 0.2, -0.0, 1e300],
                orientation: EulerXyz::new(1.0 / 3.0, 0.0, -2.0),
                valid: true,
            },
        ]
    }

    fn same(a: &[PoseSample], b: &[PoseSample]) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert_eq!(x.entity_name, y.entity_name);
            assert_eq!(x.valid, y.valid);
            let xs = [
                x.timestamp,
                x.position[0],
                x.position[1],
                x.position[2],
                x.orientation.x,
                x.orientation.y,
                x.orientation.z,
            ];
            let ys = [
                y.timestamp,
                y.position[0],
                y.position[1],
                y.position[2],
                y.orientation.x,
                y.orientation.y,
                y.orientation.z,
            ];
            for (p, q) in xs.iter().zip(ys) {
                assert!(p.to_bits() == q.to_bits() || (p.is_nan() && q.is_nan()));
            }
        }
    }

    #[test]
    fn pose_stream_round_trips_in_both_formats() {
        for fmt in [StreamFormat::Csv, StreamFormat::Jsonl] {
            let text = write_pose_stream(&samples(), fmt);
            let back = read_pose_stream(&text, fmt).unwrap();
            same(&samples(), &back);
            assert_eq!(write_pose_stream(&back, fmt), text);
        }
    }

    #[test]
    fn pose_csv_errors_carry_line_numbers() {
        let text = "timestamp,entity_name,x,y,z,rx,ry,rz,valid\n0,a,1,2,3,0,0,0,1\n0,a,1,zz,3,0,0,0,1\n";
        let e = read_pose_stream(text, StreamFormat::Csv).unwrap_err();
        assert_eq!(e.line, 3);
        let text = "timestamp,entity_name,x,y,z,rx,ry,rz,valid\n0,a,1,2,3,0,0,0,2\n";
        assert_eq!(read_pose_stream(text, StreamFormat::Csv).unwrap_err().line, 2);
        assert!(read_pose_stream("bogus\n", StreamFormat::Csv).is_err());
    }

    #[test]
    fn image_log_and_matched_round_trip() {
        let events: Vec<_> = (0..5)
            .map(|i| ImageEvent {
                camera_id: 3,
                frame_index: i,
                timestamp: i as f64 * 0.05,
                image_path: image_path(3, i),
            })
            .collect();
        let text = write_image_log(&events);
        assert!(text.starts_with("camera_id,frame_index,timestamp,path\n3,0,0,camera_3/images/0.jpg\n"));
        assert_eq!(read_image_log(&text).unwrap(), events);

        let pairs = synchronize(&events, &samples(), None);
        let text = write_matched(&pairs);
        assert_eq!(read_matched(&text).unwrap(), pairs);
    }
}
