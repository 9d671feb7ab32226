//! `frame,x,y` trajectory files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use gazeforge_core::{Point, Space, Trajectory};

use crate::error::{Error, Result, Stage};

/// Decimal places written for coordinates.
pub const EXPORT_DECIMALS: usize = 3;

/// The value a coordinate reads back as after a write/read round trip.
pub fn quantize(v: f64) -> f64 {
    format!("{v:.EXPORT_DECIMALS$}").parse().expect("formatted float parses")
}

pub fn quantize_points(points: &[Point]) -> Vec<Point> {
    points.iter().map(|p| Point::new(quantize(p.x), quantize(p.y))).collect()
}

pub fn write_trajectory<W: Write>(mut w: W, points: &[Point]) -> std::io::Result<()> {
    writeln!(w, "frame,x,y")?;
    for (i, p) in points.iter().enumerate() {
        writeln!(w, "{i},{:.EXPORT_DECIMALS$},{:.EXPORT_DECIMALS$}", p.x, p.y)?;
    }
    w.flush()
}

pub fn write_trajectory_file(path: &Path, points: &[Point], stage: Stage) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(stage, path, e))?;
    write_trajectory(BufWriter::new(file), points).map_err(|e| Error::io(stage, path, e))
}

/// Reads a `frame,x,y` file. Frames must be `0, 1, 2, ...`.
pub fn read_trajectory_from<R: std::io::Read>(
    reader: R,
    origin: &Path,
    fps: f64,
    space: Space,
    stage: Stage,
) -> Result<Trajectory> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers().map_err(|e| Error::input(stage, origin, format!("unreadable header: {e}")))?;
    if headers.iter().map(str::trim).collect::<Vec<_>>() != ["frame", "x", "y"] {
        return Err(Error::input(
            stage,
            origin,
            format!("expected header `frame,x,y`, got `{}`", headers.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    let mut samples = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let line = i + 2;
        let fail = |m: String| Error::input(stage, origin, format!("line {line}: {m}"));
        let row = row.map_err(|e| fail(e.to_string()))?;
        let field = |k: usize| row.get(k).unwrap_or("").trim();
        let frame: usize = field(0).parse().map_err(|_| fail(format!("bad frame {:?}", field(0))))?;
        if frame != i {
            return Err(fail(format!("expected frame {i}, got {frame}")));
        }
        let x: f64 = field(1).parse().map_err(|_| fail(format!("bad x {:?}", field(1))))?;
        let y: f64 = field(2).parse().map_err(|_| fail(format!("bad y {:?}", field(2))))?;
        if !x.is_finite() || !y.is_finite() {
            return Err(fail("non-finite coordinate".into()));
        }
        samples.push(Point::new(x, y));
    }
    if samples.is_empty() {
        return Err(Error::input(stage, origin, "trajectory has no rows"));
    }
    let id = origin.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    Ok(Trajectory::new(samples, fps, space, id))
}

pub fn read_trajectory_file(path: &Path, fps: f64, space: Space, stage: Stage) -> Result<Trajectory> {
    let file = File::open(path).map_err(|e| Error::io(stage, path, e))?;
    read_trajectory_from(file, path, fps, space, stage)
}
