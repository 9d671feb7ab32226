//! Iris normalization, blink filtering and the normalized-to-canvas map.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Axis, Error, Result};
use crate::model::{
    Canvas, EyeLandmarks, IrisSeries, LandmarkRecord, NormalizedSample, PipelineConfig, Point, Space, Trajectory,
};
use crate::stats;

/// Iris position of one eye as fractions of its aperture. A zero-width or
/// zero-height aperture (or non-finite input) yields an invalid sample.
pub fn normalize_eye(eye: &EyeLandmarks, frame_index: u64) -> NormalizedSample {
    let width = eye.outer_corner_x - eye.inner_corner_x;
    let height = eye.eyelid_bottom_y - eye.eyelid_top_y;
    if width == 0.0 || height == 0.0 {
        return NormalizedSample::invalid(frame_index);
    }
    let n_x = (eye.iris_x - eye.inner_corner_x) / width;
    let n_y = (eye.iris_y - eye.eyelid_top_y) / height;
    if !n_x.is_finite() || !n_y.is_finite() {
        return NormalizedSample::invalid(frame_index);
    }
    NormalizedSample { frame_index, n_x, n_y, valid: true }
}

/// Normalizes both eyes of a record, returning `(left, right)`.
pub fn normalize_iris(record: &LandmarkRecord) -> (NormalizedSample, NormalizedSample) {
    let norm = |eye: Option<EyeLandmarks>| match eye {
        Some(eye) => normalize_eye(&eye, record.frame_index),
        None => NormalizedSample::invalid(record.frame_index),
    };
    (norm(record.left), norm(record.right))
}

/// Mean of the valid eyes; falls back to the single valid eye.
pub fn average_eyes(left: NormalizedSample, right: NormalizedSample) -> NormalizedSample {
    let frame_index = left.frame_index;
    match (left.valid, right.valid) {
        (true, true) => NormalizedSample {
            frame_index,
            n_x: (left.n_x + right.n_x) / 2.0,
            n_y: (left.n_y + right.n_y) / 2.0,
            valid: true,
        },
        (true, false) => left,
        (false, true) => NormalizedSample { frame_index, ..right },
        (false, false) => NormalizedSample::invalid(frame_index),
    }
}

/// Frame rate implied by the records' timestamps, if at least two carry one.
pub fn estimate_fps(records: &[LandmarkRecord]) -> Option<f64> {
    let mut stamped = records.iter().filter_map(|r| r.timestamp_s.map(|t| (r.frame_index, t)));
    let (f0, t0) = stamped.next()?;
    let (f1, t1) = stamped.next_back()?;
    let span = t1 - t0;
    if f1 <= f0 || !(span > 0.0) {
        return None;
    }
    Some((f1 - f0) as f64 / span)
}

/// Builds the per-frame averaged iris series for one source. Gaps in the
/// frame index become invalid samples so the series stays uniformly spaced.
pub fn extract_series(records: &[LandmarkRecord], fps: f64, source_id: &str) -> Result<IrisSeries> {
    let first = records.first().ok_or(Error::EmptyInput("landmark records"))?;
    let mut samples = Vec::with_capacity(records.len());
    let mut previous: Option<u64> = None;
    for record in records {
        if let Some(prev) = previous {
            if record.frame_index <= prev {
                return Err(Error::NonIncreasingFrame { previous: prev, found: record.frame_index });
            }
            for missing in prev + 1..record.frame_index {
                samples.push(NormalizedSample::invalid(missing - first.frame_index));
            }
        }
        let (left, right) = normalize_iris(record);
        let mut avg = average_eyes(left, right);
        avg.frame_index = record.frame_index - first.frame_index;
        samples.push(avg);
        previous = Some(record.frame_index);
    }
    Ok(IrisSeries { samples, fps, source_id: source_id.into() })
}

/// Inclusive `[low, high]` fence for one axis.
fn iqr_fence(values: &[f64], multiplier: f64) -> (f64, f64) {
    let sorted = stats::sorted(values);
    let q1 = stats::quantile_sorted(&sorted, 0.25);
    let q3 = stats::quantile_sorted(&sorted, 0.75);
    let iqr = q3 - q1;
    (q1 - multiplier * iqr, q3 + multiplier * iqr)
}

/// `true` for samples that survive blink filtering: valid, inside the unit
/// square, and inside the IQR fence on both axes. Fences are computed once
/// from the valid samples.
pub fn blink_mask(series: &IrisSeries, multiplier: f64) -> Vec<bool> {
    let valid: Vec<&NormalizedSample> = series.samples.iter().filter(|s| s.valid).collect();
    if valid.is_empty() {
        return alloc::vec![false; series.samples.len()];
    }
    let xs: Vec<f64> = valid.iter().map(|s| s.n_x).collect();
    let ys: Vec<f64> = valid.iter().map(|s| s.n_y).collect();
    let (x_lo, x_hi) = iqr_fence(&xs, multiplier);
    let (y_lo, y_hi) = iqr_fence(&ys, multiplier);
    series
        .samples
        .iter()
        .map(|s| {
            s.valid
                && (0.0..=1.0).contains(&s.n_x)
                && (0.0..=1.0).contains(&s.n_y)
                && (x_lo..=x_hi).contains(&s.n_x)
                && (y_lo..=y_hi).contains(&s.n_y)
        })
        .collect()
}

/// Replaces invalid and outlier samples by the last preceding kept sample.
/// A rejected prefix is back-filled from the first kept sample.
pub fn filter_blinks(series: &IrisSeries, multiplier: f64) -> Result<Trajectory> {
    if series.samples.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    let keep = blink_mask(series, multiplier);
    let first_kept = keep.iter().position(|&k| k).ok_or(Error::NoValidAnchor)?;
    let mut last = series.samples[first_kept].point();
    let samples = series
        .samples
        .iter()
        .zip(&keep)
        .map(|(s, &k)| {
            if k {
                last = s.point();
            }
            last
        })
        .collect();
    Ok(Trajectory::new(samples, series.fps, Space::Normalized, series.source_id.clone()))
}

/// Affine map from normalized iris space to canvas pixels:
/// `c = scale * (n - 0.5) + offset` per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationModel {
    pub scale_x: f64,
    pub scale_y: f64,
    pub offset_x: f64,
    pub offset_y: f64,
}

impl CalibrationModel {
    pub fn new(scale_x: f64, scale_y: f64, offset_x: f64, offset_y: f64) -> Result<Self> {
        for (name, value) in [("scale_x", scale_x), ("scale_y", scale_y)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidParameter { name, value });
            }
        }
        for (name, value) in [("offset_x", offset_x), ("offset_y", offset_y)] {
            if !value.is_finite() {
                return Err(Error::InvalidParameter { name, value });
            }
        }
        Ok(Self { scale_x, scale_y, offset_x, offset_y })
    }

    /// Unclamped canvas position.
    pub fn map(&self, n: Point) -> Point {
        Point::new(self.scale_x * (n.x - 0.5) + self.offset_x, self.scale_y * (n.y - 0.5) + self.offset_y)
    }
}

/// Fits scales so the configured percentile range of each axis spans the
/// configured fraction of the canvas, and offsets so the range midpoint lands
/// on the canvas center.
pub fn fit_auto_calibration(traj: &Trajectory, config: &PipelineConfig) -> Result<CalibrationModel> {
    traj.require(Space::Normalized)?;
    fit_auto_calibration_points(&traj.samples, config)
}

/// [`fit_auto_calibration`] over the pooled samples of several trajectories.
pub fn fit_auto_calibration_pooled(trajs: &[Trajectory], config: &PipelineConfig) -> Result<CalibrationModel> {
    let mut pooled = Vec::new();
    for t in trajs {
        t.require(Space::Normalized)?;
        pooled.extend_from_slice(&t.samples);
    }
    if pooled.is_empty() {
        return Err(Error::EmptyInput("calibration trajectories"));
    }
    fit_auto_calibration_points(&pooled, config)
}

fn fit_auto_calibration_points(points: &[Point], config: &PipelineConfig) -> Result<CalibrationModel> {
    let canvas = config.canvas();
    let (lo, hi) = config.auto_scale_percentiles;
    let fit_axis = |values: Vec<f64>, extent: f64, axis: Axis| -> Result<(f64, f64)> {
        let sorted = stats::sorted(&values);
        let p_lo = stats::quantile_sorted(&sorted, lo / 100.0);
        let p_hi = stats::quantile_sorted(&sorted, hi / 100.0);
        let range = p_hi - p_lo;
        if !(range > 0.0) {
            return Err(Error::DegenerateAxis(axis));
        }
        let scale = config.auto_scale_canvas_fraction * extent / range;
        let mid = (p_lo + p_hi) / 2.0;
        Ok((scale, extent / 2.0 - scale * (mid - 0.5)))
    };
    let (scale_x, offset_x) = fit_axis(points.iter().map(|p| p.x).collect(), canvas.width, Axis::X)?;
    let (scale_y, offset_y) = fit_axis(points.iter().map(|p| p.y).collect(), canvas.height, Axis::Y)?;
    CalibrationModel::new(scale_x, scale_y, offset_x, offset_y)
}

/// Maps a normalized trajectory to canvas pixels without clamping.
pub fn apply_calibration_unclamped(traj: &Trajectory, model: &CalibrationModel) -> Result<Trajectory> {
    traj.require(Space::Normalized)?;
    let samples = traj.samples.iter().map(|&p| model.map(p)).collect();
    Ok(Trajectory { space: Space::Canvas, ..traj.with_samples(samples) })
}

/// Maps a normalized trajectory to canvas pixels, clamped to the canvas.
pub fn apply_calibration(traj: &Trajectory, model: &CalibrationModel, canvas: Canvas) -> Result<Trajectory> {
    let mut out = apply_calibration_unclamped(traj, model)?;
    for p in &mut out.samples {
        *p = canvas.clamp(*p);
    }
    Ok(out)
}
