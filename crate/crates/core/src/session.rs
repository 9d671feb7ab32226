//! Per-class speed scaling, circular slicing into fixed-length sessions and
//! replay schedules.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{scale_about, Canvas, ClassLabel, Point, Trajectory};
use crate::temporal::ConcatenatedClassTrajectory;

/// Slicing parameters of one session.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SessionSpec {
    pub label: ClassLabel,
    pub index: usize,
    pub stride: usize,
    pub frames: usize,
}

impl SessionSpec {
    /// Start offset into the concatenated array.
    pub fn start(&self) -> usize {
        self.index * self.stride
    }

    /// Concatenated-array indices `(start + j) mod total` for `j` in `0..frames`.
    pub fn indices(&self, total: usize) -> impl Iterator<Item = usize> {
        let start = self.start() % total;
        (0..self.frames).map(move |j| (start + j) % total)
    }

    pub fn wraps(&self, total: usize) -> bool {
        self.start() + self.frames > total
    }
}

/// `floor(total / sessions)`.
pub fn stride(total: usize, sessions: usize) -> usize {
    total / sessions
}

pub fn session_id(label: ClassLabel, index: usize) -> String {
    format!("{}_{:03}", label.name(), index)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionProvenance {
    /// Source ids touched, in first-touch order.
    pub sources: Vec<String>,
    pub start_frame: usize,
    pub wraps: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Session {
    pub id: String,
    pub label: ClassLabel,
    pub trajectory: Trajectory,
    pub provenance: SessionProvenance,
}

/// Scales the concatenated trajectory about its mean by `alpha`.
pub fn apply_class_speed_scale(
    concat: &ConcatenatedClassTrajectory,
    alpha: f64,
) -> Result<ConcatenatedClassTrajectory> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter { name: "alpha_class", value: alpha });
    }
    let traj = &concat.trajectory;
    let center = traj.mean().ok_or(Error::EmptyTrajectory)?;
    Ok(ConcatenatedClassTrajectory {
        trajectory: traj.with_samples(scale_about(&traj.samples, center, alpha)),
        ..concat.clone()
    })
}

/// Clamps every sample of the concatenated trajectory to the canvas.
pub fn clamp_to_canvas(concat: &ConcatenatedClassTrajectory, canvas: Canvas) -> ConcatenatedClassTrajectory {
    let samples = concat.trajectory.samples.iter().map(|&p| canvas.clamp(p)).collect();
    ConcatenatedClassTrajectory { trajectory: concat.trajectory.with_samples(samples), ..concat.clone() }
}

/// Cuts `sessions` sessions of `frames` frames each with stride
/// `floor(T / sessions)` and circular indexing. When `T < sessions` the
/// stride is zero and every session is identical.
pub fn slice_sessions(concat: &ConcatenatedClassTrajectory, sessions: usize, frames: usize) -> Result<Vec<Session>> {
    let total = concat.total_frames();
    if total == 0 {
        return Err(Error::EmptyTrajectory);
    }
    if sessions == 0 {
        return Err(Error::InvalidParameter { name: "session_count", value: 0.0 });
    }
    if frames == 0 {
        return Err(Error::InvalidParameter { name: "session_frames", value: 0.0 });
    }
    let stride = stride(total, sessions);
    let samples = &concat.trajectory.samples;
    let out = (0..sessions)
        .map(|index| {
            let spec = SessionSpec { label: concat.label, index, stride, frames };
            let mut sources: Vec<String> = Vec::new();
            let mut last_segment = usize::MAX;
            let points: Vec<Point> = spec
                .indices(total)
                .map(|idx| {
                    let seg = concat.segment_of(idx);
                    if seg != last_segment {
                        last_segment = seg;
                        if let Some(s) = concat.segments.get(seg) {
                            if !sources.contains(&s.source_id) {
                                sources.push(s.source_id.clone());
                            }
                        }
                    }
                    samples[idx]
                })
                .collect();
            let id = session_id(concat.label, index);
            Session {
                trajectory: Trajectory::new(points, concat.trajectory.fps, concat.trajectory.space, id.clone()),
                id,
                label: concat.label,
                provenance: SessionProvenance { sources, start_frame: spec.start() % total, wraps: spec.wraps(total) },
            }
        })
        .collect();
    Ok(out)
}

/// Session-frames requested divided by available frames.
pub fn reuse_ratio(total: usize, sessions: usize, frames: usize) -> f64 {
    (sessions as f64 * frames as f64) / total as f64
}

/// One cursor move followed by a wait.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplayEvent {
    pub frame: usize,
    pub x: i64,
    pub y: i64,
    pub delay_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplaySchedule {
    pub viewport: (u32, u32),
    pub fps: f64,
    pub events: Vec<ReplayEvent>,
}

/// Device-pixel cursor coordinate.
pub fn device_pixel(v: f64) -> i64 {
    libm::round(v) as i64
}

/// One event per frame, coordinates rounded to device pixels, each followed
/// by a `1000 / fps` ms wait.
pub fn emit_replay_schedule(session: &Session, fps: f64, viewport: Canvas) -> Result<ReplaySchedule> {
    if !(fps > 0.0 && fps.is_finite()) {
        return Err(Error::InvalidParameter { name: "fps", value: fps });
    }
    let delay_ms = 1000.0 / fps;
    let events = session
        .trajectory
        .samples
        .iter()
        .enumerate()
        .map(|(frame, p)| ReplayEvent { frame, x: device_pixel(p.x), y: device_pixel(p.y), delay_ms })
        .collect();
    Ok(ReplaySchedule { viewport: (viewport.width as u32, viewport.height as u32), fps, events })
}
