//! Reader for the landmark extractor's per-frame CSV.
//!
//! Header: `frame,ts,` followed by eight columns per eye with prefixes
//! `leye_` and `reye_`: `iris_x,iris_y,inner_x,outer_x,top_y,bottom_y,valid`.
//! Columns are located by name. `ts` may be empty; numeric eye cells may be
//! empty only when that eye's `valid` is 0.

use std::fs::File;
use std::path::Path;

use gazeforge_core::{EyeLandmarks, LandmarkRecord};

use crate::error::{Error, Result, Stage};

const EYE_FIELDS: [&str; 6] = ["iris_x", "iris_y", "inner_x", "outer_x", "top_y", "bottom_y"];

pub const HEADER: [&str; 16] = [
    "frame",
    "ts",
    "leye_iris_x",
    "leye_iris_y",
    "leye_inner_x",
    "leye_outer_x",
    "leye_top_y",
    "leye_bottom_y",
    "leye_valid",
    "reye_iris_x",
    "reye_iris_y",
    "reye_inner_x",
    "reye_outer_x",
    "reye_top_y",
    "reye_bottom_y",
    "reye_valid",
];

struct Columns {
    frame: usize,
    ts: usize,
    eyes: [([usize; 6], usize); 2],
}

fn locate(headers: &csv::StringRecord) -> std::result::Result<Columns, String> {
    let find =
        |name: &str| headers.iter().position(|h| h.trim() == name).ok_or_else(|| format!("missing column `{name}`"));
    let eye = |prefix: &str| -> std::result::Result<([usize; 6], usize), String> {
        let mut idx = [0; 6];
        for (slot, field) in idx.iter_mut().zip(EYE_FIELDS) {
            *slot = find(&format!("{prefix}_{field}"))?;
        }
        Ok((idx, find(&format!("{prefix}_valid"))?))
    };
    Ok(Columns { frame: find("frame")?, ts: find("ts")?, eyes: [eye("leye")?, eye("reye")?] })
}

fn parse_eye(row: &csv::StringRecord, cols: &([usize; 6], usize)) -> std::result::Result<Option<EyeLandmarks>, String> {
    let valid = match row.get(cols.1).map(str::trim) {
        Some("1") => true,
        Some("0") => false,
        other => return Err(format!("valid flag must be 0 or 1, got {:?}", other.unwrap_or(""))),
    };
    let mut v = [0.0; 6];
    for (slot, (&col, field)) in v.iter_mut().zip(cols.0.iter().zip(EYE_FIELDS)) {
        let cell = row.get(col).unwrap_or("").trim();
        if cell.is_empty() {
            if valid {
                return Err(format!("empty `{field}` on an eye marked valid"));
            }
            continue;
        }
        *slot = cell.parse().map_err(|_| format!("`{field}` is not a number: {cell:?}"))?;
    }
    if !valid {
        return Ok(None);
    }
    Ok(Some(EyeLandmarks {
        iris_x: v[0],
        iris_y: v[1],
        inner_corner_x: v[2],
        outer_corner_x: v[3],
        eyelid_top_y: v[4],
        eyelid_bottom_y: v[5],
    }))
}

/// Parses landmark rows from any reader. `origin` is only used in errors.
pub fn read_landmarks_from<R: std::io::Read>(reader: R, origin: &Path) -> Result<Vec<LandmarkRecord>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(false).from_reader(reader);
    let headers =
        rdr.headers().map_err(|e| Error::input(Stage::Extraction, origin, format!("unreadable header: {e}")))?.clone();
    let cols = locate(&headers).map_err(|m| Error::input(Stage::Extraction, origin, m))?;
    let mut records: Vec<LandmarkRecord> = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let line = i + 2;
        let fail = |m: String| Error::input(Stage::Extraction, origin, format!("line {line}: {m}"));
        let row = row.map_err(|e| fail(e.to_string()))?;
        let frame_cell = row.get(cols.frame).unwrap_or("").trim();
        let frame_index: u64 = frame_cell.parse().map_err(|_| fail(format!("bad frame index {frame_cell:?}")))?;
        if let Some(prev) = records.last() {
            if frame_index <= prev.frame_index {
                return Err(fail(format!("frame {frame_index} does not increase after {}", prev.frame_index)));
            }
        }
        let ts_cell = row.get(cols.ts).unwrap_or("").trim();
        let timestamp_s = if ts_cell.is_empty() {
            None
        } else {
            Some(ts_cell.parse::<f64>().map_err(|_| fail(format!("bad timestamp {ts_cell:?}")))?)
        };
        let left = parse_eye(&row, &cols.eyes[0]).map_err(|m| fail(format!("left eye: {m}")))?;
        let right = parse_eye(&row, &cols.eyes[1]).map_err(|m| fail(format!("right eye: {m}")))?;
        records.push(LandmarkRecord { frame_index, timestamp_s, left, right });
    }
    if records.is_empty() {
        return Err(Error::input(Stage::Extraction, origin, "no landmark rows"));
    }
    Ok(records)
}

pub fn read_landmarks(path: &Path) -> Result<Vec<LandmarkRecord>> {
    let file = File::open(path).map_err(|e| Error::io(Stage::Extraction, path, e))?;
    read_landmarks_from(file, path)
}

/// Serializes records in the canonical column order. Invalid eyes are written
/// with empty numeric cells.
pub fn write_landmarks<W: std::io::Write>(writer: W, records: &[LandmarkRecord]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(HEADER)?;
    for r in records {
        let mut row = vec![r.frame_index.to_string(), r.timestamp_s.map(|t| format!("{t:.6}")).unwrap_or_default()];
        for eye in [r.left, r.right] {
            match eye {
                Some(e) => {
                    for v in [e.iris_x, e.iris_y, e.inner_corner_x, e.outer_corner_x, e.eyelid_top_y, e.eyelid_bottom_y]
                    {
                        row.push(format!("{v:.4}"));
                    }
                    row.push("1".into());
                }
                None => {
                    row.extend(std::iter::repeat_n(String::new(), 6));
                    row.push("0".into());
                }
            }
        }
        w.write_record(&row)?;
    }
    w.flush()
}
