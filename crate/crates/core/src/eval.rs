//! Distributional and matched fidelity metrics.
//!
//! Speeds are frame-to-frame Euclidean displacements. Velocity-threshold
//! (I-VT) labeling works on transitions: a run of `k` transitions below the
//! fixation threshold is a fixation of duration `k`; a run above the saccade
//! threshold is a saccade whose amplitude is the summed displacement.
//! Transitions between the two thresholds belong to neither.

use alloc::vec::Vec;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Axis, Error, Result};
use crate::model::{Canvas, ClassLabel, PipelineConfig, Point, Space, Trajectory};
use crate::stats;

/// Per-transition speeds of a trajectory (length `n - 1`).
pub fn compute_speeds(traj: &Trajectory) -> Result<Vec<f64>> {
    if traj.samples.len() < 2 {
        return Err(Error::TooFewSamples { needed: 2, found: traj.samples.len() });
    }
    Ok(speeds(&traj.samples))
}

pub fn speeds(points: &[Point]) -> Vec<f64> {
    points.windows(2).map(|w| w[0].distance(w[1])).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fixation {
    pub start_frame: usize,
    /// Duration in transitions.
    pub length_frames: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Saccade {
    pub start_frame: usize,
    pub length_frames: usize,
    pub amplitude_px: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IvtEvents {
    pub fixations: Vec<Fixation>,
    pub saccades: Vec<Saccade>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Band {
    Fixation,
    Between,
    Saccade,
}

fn check_thresholds(fixation: f64, saccade: f64) -> Result<()> {
    if !(fixation > 0.0) {
        return Err(Error::InvalidParameter { name: "fixation_threshold", value: fixation });
    }
    if !(saccade > fixation) {
        return Err(Error::InvalidParameter { name: "saccade_threshold", value: saccade });
    }
    Ok(())
}

/// I-VT over precomputed per-transition speeds.
pub fn detect_ivt_speeds(speeds: &[f64], fixation_threshold: f64, saccade_threshold: f64) -> Result<IvtEvents> {
    check_thresholds(fixation_threshold, saccade_threshold)?;
    let band = |s: f64| {
        if s < fixation_threshold {
            Band::Fixation
        } else if s > saccade_threshold {
            Band::Saccade
        } else {
            Band::Between
        }
    };
    let mut events = IvtEvents::default();
    let mut i = 0;
    while i < speeds.len() {
        let b = band(speeds[i]);
        let start = i;
        while i < speeds.len() && band(speeds[i]) == b {
            i += 1;
        }
        match b {
            Band::Fixation => events.fixations.push(Fixation { start_frame: start, length_frames: i - start }),
            Band::Saccade => events.saccades.push(Saccade {
                start_frame: start,
                length_frames: i - start,
                amplitude_px: speeds[start..i].iter().sum(),
            }),
            Band::Between => {}
        }
    }
    Ok(events)
}

pub fn detect_ivt(traj: &Trajectory, fixation_threshold: f64, saccade_threshold: f64) -> Result<IvtEvents> {
    detect_ivt_speeds(&compute_speeds(traj)?, fixation_threshold, saccade_threshold)
}

/// Two-sample Kolmogorov-Smirnov result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub d_statistic: f64,
    pub n: usize,
    pub m: usize,
    /// Asymptotic p-value; informational only.
    pub p_value: Option<f64>,
}

/// `sup_x |ECDF_a(x) - ECDF_b(x)|`, by merging the sorted samples. Ties
/// across samples are consumed together.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput("KS sample"));
    }
    if let Some(nan) = a.iter().chain(b).find(|v| v.is_nan()) {
        return Err(Error::InvalidParameter { name: "sample value", value: *nan });
    }
    let (a, b) = (stats::sorted(a), stats::sorted(b));
    let (n, m) = (a.len(), b.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let x = if a[i] <= b[j] { a[i] } else { b[j] };
        while i < n && a[i] <= x {
            i += 1;
        }
        while j < m && b[j] <= x {
            j += 1;
        }
        let diff = (i as f64 / n as f64 - j as f64 / m as f64).abs();
        d = d.max(diff);
    }
    Ok(d)
}

/// Survival function of the Kolmogorov distribution.
fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let a2 = -2.0 * lambda * lambda;
    let mut sign = 2.0;
    let mut sum = 0.0;
    let mut prev_term = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = sign * libm::exp(a2 * kf * kf);
        sum += term;
        if term.abs() <= 1e-3 * prev_term || term.abs() <= 1e-8 * sum {
            return sum.clamp(0.0, 1.0);
        }
        sign = -sign;
        prev_term = term.abs();
    }
    1.0
}

/// Asymptotic two-sample p-value for statistic `d`.
pub fn ks_p_value(d: f64, n: usize, m: usize) -> f64 {
    let en = libm::sqrt((n as f64 * m as f64) / (n + m) as f64);
    kolmogorov_q((en + 0.12 + 0.11 / en) * d)
}

pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    let d = ks_statistic(a, b)?;
    Ok(KsResult { d_statistic: d, n: a.len(), m: b.len(), p_value: Some(ks_p_value(d, a.len(), b.len())) })
}

/// `k` quantile pairs at probabilities `i / (k + 1)`, `i = 1..=k`.
pub fn qq_pairs(a: &[f64], b: &[f64], k: usize) -> Result<Vec<(f64, f64)>> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput("Q-Q sample"));
    }
    if k == 0 {
        return Err(Error::InvalidParameter { name: "qq_points", value: 0.0 });
    }
    let (sa, sb) = (stats::sorted(a), stats::sorted(b));
    Ok((1..=k)
        .map(|i| {
            let p = i as f64 / (k + 1) as f64;
            (stats::quantile_sorted(&sa, p), stats::quantile_sorted(&sb, p))
        })
        .collect())
}

/// Frame-locked comparison of real and simulator iris trajectories.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchedFidelityReport {
    pub mean_error: f64,
    pub median_error: f64,
    pub p95_error: f64,
    /// `None` when either series is constant.
    pub correlation_x: Option<f64>,
    pub correlation_y: Option<f64>,
    pub amplitude_ratio_x: f64,
    pub amplitude_ratio_y: f64,
    pub std_ratio_x: f64,
    pub std_ratio_y: f64,
    pub samples: usize,
}

/// Trimmed movement extent: p95 - p5 of the mean-centered signal.
pub fn amplitude(values: &[f64]) -> Option<f64> {
    let m = stats::mean(values)?;
    let centered: Vec<f64> = values.iter().map(|v| v - m).collect();
    let sorted = stats::sorted(&centered);
    Some(stats::quantile_sorted(&sorted, 0.95) - stats::quantile_sorted(&sorted, 0.05))
}

pub fn matched_fidelity(real: &Trajectory, sim: &Trajectory) -> Result<MatchedFidelityReport> {
    real.require(Space::Normalized)?;
    sim.require(Space::Normalized)?;
    if real.len() != sim.len() {
        return Err(Error::LengthMismatch { real: real.len(), sim: sim.len() });
    }
    let errors: Vec<f64> = real.samples.iter().zip(&sim.samples).map(|(r, s)| r.distance(*s)).collect();
    let sorted_err = stats::sorted(&errors);

    let axis = |traj: &Trajectory, axis: Axis| -> Vec<f64> {
        traj.samples.iter().map(|p| if axis == Axis::X { p.x } else { p.y }).collect()
    };
    let (rx, ry, sx, sy) = (axis(real, Axis::X), axis(real, Axis::Y), axis(sim, Axis::X), axis(sim, Axis::Y));

    let ratio = |r: &[f64], s: &[f64], ax: Axis| -> Result<(f64, f64)> {
        let real_amp = amplitude(r).ok_or(Error::EmptyTrajectory)?;
        if !(real_amp > 0.0) {
            return Err(Error::ZeroAmplitude(ax));
        }
        let sim_amp = amplitude(s).ok_or(Error::EmptyTrajectory)?;
        let real_std = stats::std_dev(r).ok_or(Error::EmptyTrajectory)?;
        let sim_std = stats::std_dev(s).ok_or(Error::EmptyTrajectory)?;
        Ok((sim_amp / real_amp, sim_std / real_std))
    };
    let (amplitude_ratio_x, std_ratio_x) = ratio(&rx, &sx, Axis::X)?;
    let (amplitude_ratio_y, std_ratio_y) = ratio(&ry, &sy, Axis::Y)?;

    Ok(MatchedFidelityReport {
        mean_error: stats::mean(&errors).ok_or(Error::EmptyTrajectory)?,
        median_error: stats::quantile_sorted(&sorted_err, 0.5),
        p95_error: stats::quantile_sorted(&sorted_err, 0.95),
        correlation_x: stats::pearson(&rx, &sx),
        correlation_y: stats::pearson(&ry, &sy),
        amplitude_ratio_x,
        amplitude_ratio_y,
        std_ratio_x,
        std_ratio_y,
        samples: real.len(),
    })
}

/// Stand-in for the external simulator: maps canvas cursor positions to
/// normalized iris positions with per-axis gain and seeded Gaussian noise,
/// `iris = 0.5 + gain * (cursor - center) / extent + noise`. Not clamped.
pub fn simulate_gain_oracle(
    cursor: &Trajectory,
    gain: (f64, f64),
    noise_std: f64,
    seed: u64,
    canvas: Canvas,
) -> Result<Trajectory> {
    cursor.require(Space::Canvas)?;
    for (name, value) in [("gain_x", gain.0), ("gain_y", gain.1)] {
        if !(value >= 0.0 && value.is_finite()) {
            return Err(Error::InvalidParameter { name, value });
        }
    }
    let noise =
        Normal::new(0.0, noise_std).map_err(|_| Error::InvalidParameter { name: "noise_std", value: noise_std })?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let center = canvas.center();
    let samples = cursor
        .samples
        .iter()
        .map(|c| {
            let mut p = Point::new(
                0.5 + gain.0 * (c.x - center.x) / canvas.width,
                0.5 + gain.1 * (c.y - center.y) / canvas.height,
            );
            if noise_std > 0.0 {
                p.x += noise.sample(&mut rng);
                p.y += noise.sample(&mut rng);
            }
            p
        })
        .collect();
    Ok(Trajectory::new(samples, cursor.fps, Space::Normalized, cursor.source_id.clone()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Speed,
    FixationDuration,
    SaccadeAmplitude,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Speed, Metric::FixationDuration, Metric::SaccadeAmplitude];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Speed => "speed",
            Metric::FixationDuration => "fixation_duration",
            Metric::SaccadeAmplitude => "saccade_amplitude",
        }
    }
}

/// Pooled metric samples over a set of trajectories. Speeds and events are
/// computed within each trajectory, never across trajectory boundaries.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetricPools {
    pub speed: Vec<f64>,
    pub fixation_duration: Vec<f64>,
    pub saccade_amplitude: Vec<f64>,
}

impl MetricPools {
    pub fn collect<'a>(
        trajs: impl IntoIterator<Item = &'a [Point]>,
        fixation_threshold: f64,
        saccade_threshold: f64,
    ) -> Result<Self> {
        check_thresholds(fixation_threshold, saccade_threshold)?;
        let mut pools = MetricPools::default();
        for points in trajs {
            let s = speeds(points);
            let events = detect_ivt_speeds(&s, fixation_threshold, saccade_threshold)?;
            pools.fixation_duration.extend(events.fixations.iter().map(|f| f.length_frames as f64));
            pools.saccade_amplitude.extend(events.saccades.iter().map(|s| s.amplitude_px));
            pools.speed.extend(s);
        }
        Ok(pools)
    }

    pub fn get(&self, metric: Metric) -> &[f64] {
        match metric {
            Metric::Speed => &self.speed,
            Metric::FixationDuration => &self.fixation_duration,
            Metric::SaccadeAmplitude => &self.saccade_amplitude,
        }
    }
}

/// Source-vs-generated comparison for one metric. `ks` is `None` (and `qq`
/// empty) when either pool is empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricComparison {
    pub metric: Metric,
    pub n_source: usize,
    pub n_generated: usize,
    pub ks: Option<KsResult>,
    pub qq: Vec<(f64, f64)>,
}

impl MetricComparison {
    pub fn is_defined(&self) -> bool {
        self.ks.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassEvaluation {
    pub label: ClassLabel,
    pub metrics: Vec<MetricComparison>,
}

/// Pools all source and all generated trajectories of a class and compares
/// speed, fixation duration and saccade amplitude distributions.
pub fn evaluate_class(
    label: ClassLabel,
    sources: &[Trajectory],
    generated: &[Trajectory],
    config: &PipelineConfig,
    qq_points: usize,
) -> Result<ClassEvaluation> {
    if sources.is_empty() {
        return Err(Error::EmptyInput("source trajectories"));
    }
    if generated.is_empty() {
        return Err(Error::EmptyInput("generated trajectories"));
    }
    let (fix, sac) = (config.ivt_fixation_threshold_px_per_frame, config.ivt_saccade_threshold_px_per_frame);
    let src = MetricPools::collect(sources.iter().map(|t| t.samples.as_slice()), fix, sac)?;
    let gen = MetricPools::collect(generated.iter().map(|t| t.samples.as_slice()), fix, sac)?;
    let metrics = Metric::ALL
        .iter()
        .map(|&metric| {
            let (a, b) = (src.get(metric), gen.get(metric));
            let (ks, qq) = if a.is_empty() || b.is_empty() {
                (None, Vec::new())
            } else {
                (Some(ks_two_sample(a, b)?), qq_pairs(a, b, qq_points)?)
            };
            Ok(MetricComparison { metric, n_source: a.len(), n_generated: b.len(), ks, qq })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ClassEvaluation { label, metrics })
}
