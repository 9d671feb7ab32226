//! Shared data types: landmark records, trajectories, class labels and the
//! pipeline configuration.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::calibration::CalibrationModel;
use crate::error::{Error, Result};

/// A 2D sample. Units depend on the owning trajectory's [`Space`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        libm::hypot(other.x - self.x, other.y - self.y)
    }
}

/// Coordinate space of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    /// Iris position as a fraction of the eye aperture.
    Normalized,
    /// Simulator canvas pixels.
    Canvas,
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Space::Normalized => f.write_str("normalized"),
            Space::Canvas => f.write_str("canvas"),
        }
    }
}

/// Raw landmark coordinates of one eye, in source-video pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EyeLandmarks {
    pub iris_x: f64,
    pub iris_y: f64,
    pub inner_corner_x: f64,
    pub outer_corner_x: f64,
    pub eyelid_top_y: f64,
    pub eyelid_bottom_y: f64,
}

/// One frame of extractor output. An eye is `None` when the extractor marked
/// it invalid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LandmarkRecord {
    pub frame_index: u64,
    pub timestamp_s: Option<f64>,
    pub left: Option<EyeLandmarks>,
    pub right: Option<EyeLandmarks>,
}

impl LandmarkRecord {
    /// Recorded timestamp, or `frame_index / fps` when the extractor omitted it.
    pub fn timestamp_or_derived(&self, fps: f64) -> f64 {
        self.timestamp_s.unwrap_or(self.frame_index as f64 / fps)
    }
}

/// Normalized iris position for one frame. Values outside `[0, 1]` are kept
/// as-is until blink filtering.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizedSample {
    pub frame_index: u64,
    pub n_x: f64,
    pub n_y: f64,
    pub valid: bool,
}

impl NormalizedSample {
    pub fn invalid(frame_index: u64) -> Self {
        Self { frame_index, n_x: f64::NAN, n_y: f64::NAN, valid: false }
    }

    pub fn point(&self) -> Point {
        Point::new(self.n_x, self.n_y)
    }
}

/// Per-frame normalized iris samples of one source, possibly containing
/// invalid frames. Produced by extraction and consumed by blink filtering.
#[derive(Debug, Clone, PartialEq)]
pub struct IrisSeries {
    pub samples: Vec<NormalizedSample>,
    pub fps: f64,
    pub source_id: String,
}

impl From<&Trajectory> for IrisSeries {
    fn from(traj: &Trajectory) -> Self {
        Self {
            samples: traj
                .samples
                .iter()
                .enumerate()
                .map(|(i, p)| NormalizedSample { frame_index: i as u64, n_x: p.x, n_y: p.y, valid: true })
                .collect(),
            fps: traj.fps,
            source_id: traj.source_id.clone(),
        }
    }
}

/// Ordered 2D samples at a fixed frame rate, tagged with their space.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Point>,
    pub fps: f64,
    pub space: Space,
    pub source_id: String,
}

impl Trajectory {
    pub fn new(samples: Vec<Point>, fps: f64, space: Space, source_id: impl Into<String>) -> Self {
        Self { samples, fps, space, source_id: source_id.into() }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Same metadata, new samples.
    pub fn with_samples(&self, samples: Vec<Point>) -> Self {
        Self { samples, fps: self.fps, space: self.space, source_id: self.source_id.clone() }
    }

    /// Checks the space tag and non-emptiness at a stage boundary.
    pub fn require(&self, space: Space) -> Result<()> {
        if self.space != space {
            return Err(Error::SpaceMismatch { expected: space, found: self.space });
        }
        if self.samples.is_empty() {
            return Err(Error::EmptyTrajectory);
        }
        Ok(())
    }

    /// Arithmetic mean of all samples. `None` when empty.
    pub fn mean(&self) -> Option<Point> {
        mean_point(&self.samples)
    }

    /// Sum of Euclidean distances between consecutive samples.
    pub fn path_length(&self) -> f64 {
        path_length(&self.samples)
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len().saturating_sub(1) as f64 / self.fps
    }
}

pub fn mean_point(points: &[Point]) -> Option<Point> {
    if points.is_empty() {
        return None;
    }
    let n = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
    Some(Point::new(sx / n, sy / n))
}

pub fn path_length(points: &[Point]) -> f64 {
    points.windows(2).map(|w| w[0].distance(w[1])).sum()
}

/// Scales every point about `center` by `factor`.
pub fn scale_about(points: &[Point], center: Point, factor: f64) -> Vec<Point> {
    if factor == 1.0 {
        return points.to_vec();
    }
    points
        .iter()
        .map(|p| Point::new(center.x + factor * (p.x - center.x), center.y + factor * (p.y - center.y)))
        .collect()
}

/// Binary class label; the integer encoding is fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassLabel {
    Conversation = 0,
    Reading = 1,
}

impl ClassLabel {
    pub const ALL: [ClassLabel; 2] = [ClassLabel::Reading, ClassLabel::Conversation];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn name(self) -> &'static str {
        match self {
            ClassLabel::Reading => "reading",
            ClassLabel::Conversation => "conversation",
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(ClassLabel::Conversation),
            1 => Some(ClassLabel::Reading),
            _ => None,
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Simulator canvas extent in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Canvas {
    pub width: f64,
    pub height: f64,
}

impl Canvas {
    pub const SIMULATOR: Canvas = Canvas { width: 1280.0, height: 720.0 };

    pub fn center(&self) -> Point {
        Point::new(self.width / 2.0, self.height / 2.0)
    }

    pub fn clamp(&self, p: Point) -> Point {
        Point::new(p.x.clamp(0.0, self.width), p.y.clamp(0.0, self.height))
    }

    pub fn contains(&self, p: Point) -> bool {
        (0.0..=self.width).contains(&p.x) && (0.0..=self.height).contains(&p.y)
    }
}

/// Where per-subject centering moves each source's mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GlobalMeanMode {
    /// Mean of every sample across all sources of the class.
    #[default]
    Empirical,
    CanvasCenter,
}

/// Which samples the auto-calibration percentiles are computed over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CalibrationScope {
    /// One model fit on every source of every class.
    #[default]
    Pooled,
    PerSource,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub canvas_width_px: f64,
    pub canvas_height_px: f64,
    pub target_fps: f64,
    /// Sessions per class.
    pub session_count: usize,
    pub session_frames: usize,
    pub ivt_fixation_threshold_px_per_frame: f64,
    pub ivt_saccade_threshold_px_per_frame: f64,
    pub speed_scale_reading: f64,
    pub speed_scale_conversation: f64,
    pub auto_scale_percentiles: (f64, f64),
    pub auto_scale_canvas_fraction: f64,
    pub blink_iqr_multiplier: f64,
    pub edgegauss_enabled: bool,
    pub edgegauss_sigma_frames: f64,
    pub edgegauss_restore_threshold_px: f64,
    pub global_mean: GlobalMeanMode,
    pub calibration_scope: CalibrationScope,
    /// Fixed calibration; disables auto-scaling when set.
    pub manual_calibration: Option<CalibrationModel>,
    /// Used for sources whose records carry no timestamps.
    pub default_source_fps: f64,
    pub random_seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            canvas_width_px: 1280.0,
            canvas_height_px: 720.0,
            target_fps: 25.0,
            session_count: 72,
            session_frames: 7500,
            ivt_fixation_threshold_px_per_frame: 5.0,
            ivt_saccade_threshold_px_per_frame: 15.0,
            speed_scale_reading: 1.05,
            speed_scale_conversation: 1.0,
            auto_scale_percentiles: (5.0, 95.0),
            auto_scale_canvas_fraction: 0.8,
            blink_iqr_multiplier: 3.0,
            edgegauss_enabled: false,
            edgegauss_sigma_frames: 4.0,
            edgegauss_restore_threshold_px: 15.0,
            global_mean: GlobalMeanMode::Empirical,
            calibration_scope: CalibrationScope::Pooled,
            manual_calibration: None,
            default_source_fps: 30.0,
            random_seed: 0,
        }
    }
}

impl PipelineConfig {
    pub fn canvas(&self) -> Canvas {
        Canvas { width: self.canvas_width_px, height: self.canvas_height_px }
    }

    pub fn speed_scale(&self, label: ClassLabel) -> f64 {
        match label {
            ClassLabel::Reading => self.speed_scale_reading,
            ClassLabel::Conversation => self.speed_scale_conversation,
        }
    }
}

/// One violated configuration invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigViolation {
    pub field: &'static str,
    pub value: String,
    pub reason: &'static str,
}

impl fmt::Display for ConfigViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}: {}", self.field, self.value, self.reason)
    }
}

/// Returns the config unchanged when every invariant holds, otherwise every
/// violation found.
pub fn validate_config(config: PipelineConfig) -> core::result::Result<PipelineConfig, Vec<ConfigViolation>> {
    let mut violations = Vec::new();
    let mut positive = |field: &'static str, value: f64| {
        if !(value > 0.0) || value.is_nan() {
            violations.push(ConfigViolation { field, value: format!("{value}"), reason: "must be strictly positive" });
        }
    };
    positive("canvas_width_px", config.canvas_width_px);
    positive("canvas_height_px", config.canvas_height_px);
    positive("target_fps", config.target_fps);
    positive("ivt_fixation_threshold_px_per_frame", config.ivt_fixation_threshold_px_per_frame);
    positive("ivt_saccade_threshold_px_per_frame", config.ivt_saccade_threshold_px_per_frame);
    positive("speed_scale_reading", config.speed_scale_reading);
    positive("speed_scale_conversation", config.speed_scale_conversation);
    positive("auto_scale_canvas_fraction", config.auto_scale_canvas_fraction);
    positive("blink_iqr_multiplier", config.blink_iqr_multiplier);
    positive("edgegauss_sigma_frames", config.edgegauss_sigma_frames);
    positive("edgegauss_restore_threshold_px", config.edgegauss_restore_threshold_px);

    let finite = [
        ("canvas_width_px", config.canvas_width_px),
        ("canvas_height_px", config.canvas_height_px),
        ("target_fps", config.target_fps),
        ("speed_scale_reading", config.speed_scale_reading),
        ("speed_scale_conversation", config.speed_scale_conversation),
        ("blink_iqr_multiplier", config.blink_iqr_multiplier),
        ("edgegauss_sigma_frames", config.edgegauss_sigma_frames),
    ];
    for (field, value) in finite {
        if value.is_infinite() {
            violations.push(ConfigViolation { field, value: format!("{value}"), reason: "must be finite" });
        }
    }

    if config.ivt_fixation_threshold_px_per_frame >= config.ivt_saccade_threshold_px_per_frame {
        violations.push(ConfigViolation {
            field: "ivt_fixation_threshold_px_per_frame",
            value: format!(
                "{} (saccade threshold {})",
                config.ivt_fixation_threshold_px_per_frame, config.ivt_saccade_threshold_px_per_frame
            ),
            reason: "must be below the saccade threshold",
        });
    }
    if config.session_count == 0 {
        violations.push(ConfigViolation {
            field: "session_count",
            value: String::from("0"),
            reason: "must be at least 1",
        });
    }
    if config.session_frames == 0 {
        violations.push(ConfigViolation {
            field: "session_frames",
            value: String::from("0"),
            reason: "must be at least 1",
        });
    }
    if config.session_count.checked_mul(config.session_frames).is_none() {
        violations.push(ConfigViolation {
            field: "session_count",
            value: format!("{} x {}", config.session_count, config.session_frames),
            reason: "session_count * session_frames overflows",
        });
    }
    let (lo, hi) = config.auto_scale_percentiles;
    if !(lo > 0.0 && hi < 100.0) {
        violations.push(ConfigViolation {
            field: "auto_scale_percentiles",
            value: format!("({lo}, {hi})"),
            reason: "percentiles must lie within (0, 100)",
        });
    }
    if !(lo < hi) {
        violations.push(ConfigViolation {
            field: "auto_scale_percentiles",
            value: format!("({lo}, {hi})"),
            reason: "percentile ordering: lower must be below upper",
        });
    }
    if config.auto_scale_canvas_fraction > 1.0 {
        violations.push(ConfigViolation {
            field: "auto_scale_canvas_fraction",
            value: format!("{}", config.auto_scale_canvas_fraction),
            reason: "must not exceed 1",
        });
    }
    if !(1.0..=120.0).contains(&config.default_source_fps) {
        violations.push(ConfigViolation {
            field: "default_source_fps",
            value: format!("{}", config.default_source_fps),
            reason: "must lie within [1, 120]",
        });
    }
    if let Some(model) = config.manual_calibration {
        if !(model.scale_x > 0.0 && model.scale_y > 0.0) {
            violations.push(ConfigViolation {
                field: "manual_calibration",
                value: format!("scale ({}, {})", model.scale_x, model.scale_y),
                reason: "scales must be strictly positive",
            });
        }
    }

    if violations.is_empty() {
        Ok(config)
    } else {
        Err(violations)
    }
}
