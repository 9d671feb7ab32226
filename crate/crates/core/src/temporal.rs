//! Resampling, path-length restoration, EdgeGauss smoothing and per-class
//! concatenation.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{mean_point, scale_about, ClassLabel, GlobalMeanMode, PipelineConfig, Point, Space, Trajectory};

pub const MIN_SOURCE_FPS: f64 = 1.0;
pub const MAX_SOURCE_FPS: f64 = 120.0;

/// Guards `floor` against products like `1.9999999999999998`.
const FRAME_COUNT_EPS: f64 = 1e-9;

/// Number of output frames when resampling `n` frames from `source_fps` to
/// `target_fps`: `floor(duration * target_fps) + 1`.
pub fn resampled_len(n: usize, source_fps: f64, target_fps: f64) -> usize {
    let frames = n.saturating_sub(1) as f64 * target_fps / source_fps;
    libm::floor(frames + FRAME_COUNT_EPS) as usize + 1
}

/// Linear-interpolation resampling. Output frame `k` sits at source time
/// `k / target_fps`.
pub fn resample(traj: &Trajectory, target_fps: f64) -> Result<Trajectory> {
    if !(MIN_SOURCE_FPS..=MAX_SOURCE_FPS).contains(&traj.fps) {
        return Err(Error::SourceFpsOutOfRange(traj.fps));
    }
    if !(target_fps > 0.0 && target_fps.is_finite()) {
        return Err(Error::InvalidParameter { name: "target_fps", value: target_fps });
    }
    let n = traj.samples.len();
    if n < 2 {
        return Err(Error::TooFewSamples { needed: 2, found: n });
    }
    let step = traj.fps / target_fps;
    let samples = (0..resampled_len(n, traj.fps, target_fps))
        .map(|k| {
            let u = k as f64 * step;
            let i = (libm::floor(u) as usize).min(n - 2);
            let frac = (u - i as f64).clamp(0.0, 1.0);
            let (a, b) = (traj.samples[i], traj.samples[i + 1]);
            Point::new(a.x + frac * (b.x - a.x), a.y + frac * (b.y - a.y))
        })
        .collect();
    Ok(Trajectory { fps: target_fps, ..traj.with_samples(samples) })
}

/// Scales `resampled` about its centroid so its path length equals that of
/// `original`. Returns the corrected trajectory and the factor used.
pub fn speed_correct(resampled: &Trajectory, original: &Trajectory) -> Result<(Trajectory, f64)> {
    resampled.require(original.space)?;
    original.require(resampled.space)?;
    let l_orig = original.path_length();
    let l_resamp = resampled.path_length();
    if l_orig == 0.0 {
        return Ok((resampled.clone(), 1.0));
    }
    if l_resamp == 0.0 {
        return Err(Error::DegenerateResampledPath);
    }
    let alpha = l_orig / l_resamp;
    let centroid = resampled.mean().ok_or(Error::EmptyTrajectory)?;
    Ok((resampled.with_samples(scale_about(&resampled.samples, centroid, alpha)), alpha))
}

/// Truncated Gaussian kernel of radius `ceil(3 sigma)`, unnormalized.
fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = libm::ceil(3.0 * sigma) as usize;
    let denom = 2.0 * sigma * sigma;
    (0..=2 * radius)
        .map(|i| {
            let d = i as f64 - radius as f64;
            libm::exp(-d * d / denom)
        })
        .collect()
}

/// Per-axis Gaussian smoothing. Near the ends the kernel is renormalized
/// over the samples that exist.
pub fn gaussian_smooth(points: &[Point], sigma: f64) -> Vec<Point> {
    let kernel = gaussian_kernel(sigma);
    let radius = kernel.len() / 2;
    let n = points.len();
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(radius);
            let hi = (i + radius).min(n - 1);
            let (mut sx, mut sy, mut sw) = (0.0, 0.0, 0.0);
            for j in lo..=hi {
                let w = kernel[j + radius - i];
                sx += w * points[j].x;
                sy += w * points[j].y;
                sw += w;
            }
            Point::new(sx / sw, sy / sw)
        })
        .collect()
}

/// Frames inside a raw saccade run, widened by one frame on each side. A
/// transition `i` (frame `i` to `i + 1`) belongs to a run when its
/// displacement exceeds `threshold`.
pub fn saccade_frames(points: &[Point], threshold: f64) -> Vec<bool> {
    let n = points.len();
    let mut mask = alloc::vec![false; n];
    for i in 0..n.saturating_sub(1) {
        if points[i].distance(points[i + 1]) > threshold {
            let lo = i.saturating_sub(1);
            let hi = (i + 2).min(n - 1);
            mask[lo..=hi].iter_mut().for_each(|m| *m = true);
        }
    }
    mask
}

/// Gaussian smoothing with raw values restored inside saccade windows.
pub fn edgegauss_smooth(traj: &Trajectory, sigma_frames: f64, restore_threshold_px: f64) -> Result<Trajectory> {
    if !(sigma_frames > 0.0 && sigma_frames.is_finite()) {
        return Err(Error::InvalidParameter { name: "sigma_frames", value: sigma_frames });
    }
    if traj.samples.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    let mut smoothed = gaussian_smooth(&traj.samples, sigma_frames);
    let restore = saccade_frames(&traj.samples, restore_threshold_px);
    for ((s, raw), keep_raw) in smoothed.iter_mut().zip(&traj.samples).zip(restore) {
        if keep_raw {
            *s = *raw;
        }
    }
    Ok(traj.with_samples(smoothed))
}

/// Translates `traj` so its mean lands on `global_mean`.
pub fn normalize_subject(traj: &Trajectory, global_mean: Point) -> Result<Trajectory> {
    let mean = traj.mean().ok_or(Error::EmptyTrajectory)?;
    let (dx, dy) = (global_mean.x - mean.x, global_mean.y - mean.y);
    Ok(traj.with_samples(traj.samples.iter().map(|p| Point::new(p.x + dx, p.y + dy)).collect()))
}

/// Provenance of one source inside a concatenated class trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub source_id: String,
    pub start_frame: usize,
    pub length: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcatenatedClassTrajectory {
    pub trajectory: Trajectory,
    pub segments: Vec<Segment>,
    pub label: ClassLabel,
    pub global_mean: Point,
}

impl ConcatenatedClassTrajectory {
    pub fn total_frames(&self) -> usize {
        self.trajectory.samples.len()
    }

    /// Samples of each source segment, in order.
    pub fn segment_samples(&self) -> impl Iterator<Item = (&Segment, &[Point])> {
        self.segments.iter().map(|s| (s, &self.trajectory.samples[s.start_frame..s.start_frame + s.length]))
    }

    /// Index of the segment containing `frame`.
    pub fn segment_of(&self, frame: usize) -> usize {
        self.segments.partition_point(|s| s.start_frame + s.length <= frame)
    }
}

/// Centers every source on the class-wide mean and appends them in order.
pub fn concatenate_class(
    trajs: &[Trajectory],
    label: ClassLabel,
    config: &PipelineConfig,
) -> Result<ConcatenatedClassTrajectory> {
    if trajs.is_empty() {
        return Err(Error::EmptyInput("class trajectories"));
    }
    for t in trajs {
        t.require(Space::Canvas)?;
        if (t.fps - config.target_fps).abs() > 1e-9 {
            return Err(Error::InvalidParameter { name: "fps", value: t.fps });
        }
    }
    let global_mean = match config.global_mean {
        GlobalMeanMode::CanvasCenter => config.canvas().center(),
        GlobalMeanMode::Empirical => {
            let all: Vec<Point> = trajs.iter().flat_map(|t| t.samples.iter().copied()).collect();
            mean_point(&all).ok_or(Error::EmptyTrajectory)?
        }
    };
    let total: usize = trajs.iter().map(Trajectory::len).sum();
    let mut samples = Vec::with_capacity(total);
    let mut segments = Vec::with_capacity(trajs.len());
    for t in trajs {
        let centered = normalize_subject(t, global_mean)?;
        segments.push(Segment { source_id: t.source_id.clone(), start_frame: samples.len(), length: t.len() });
        samples.extend(centered.samples);
    }
    Ok(ConcatenatedClassTrajectory {
        trajectory: Trajectory::new(samples, config.target_fps, Space::Canvas, label.name()),
        segments,
        label,
        global_mean,
    })
}
