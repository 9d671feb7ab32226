//! Command implementations. Each returns a typed result and leaves process
//! exit handling to `main`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use gazeforge_core::calibration::{self, CalibrationModel};
use gazeforge_core::eval::{self, ClassEvaluation, MatchedFidelityReport};
use gazeforge_core::session::{self, Session};
use gazeforge_core::temporal::{self, ConcatenatedClassTrajectory};
use gazeforge_core::{CalibrationScope, Canvas, ClassLabel, PipelineConfig, Space, Trajectory};
use serde::{Deserialize, Serialize};
use tracing::{info, warn};

use crate::dataset::{
    self, CalibrationRecord, ClassMetadata, DatasetManifest, DatasetMetadata, SourceMetadata, WrittenFile,
};
use crate::error::{Error, Result, Stage};
use crate::landmarks;
use crate::schedule;
use crate::trajectory_csv;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const RUN_MANIFEST_FILE: &str = "run_manifest.json";
pub const DEFAULT_QQ_POINTS: usize = 99;

/// Speed-correction factors outside this band get a warning.
const TYPICAL_ALPHA: (f64, f64) = (1.16, 1.45);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

/// Wall-clock time per stage, accumulated across classes and sources.
#[derive(Debug, Clone, Default)]
pub struct StageClock {
    timings: Vec<StageTiming>,
}

impl StageClock {
    pub fn time<T>(&mut self, stage: Stage, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let out = f();
        let seconds = start.elapsed().as_secs_f64();
        let name = stage.to_string();
        match self.timings.iter_mut().find(|t| t.stage == name) {
            Some(t) => t.seconds += seconds,
            None => self.timings.push(StageTiming { stage: name, seconds }),
        }
        out
    }

    pub fn into_timings(self) -> Vec<StageTiming> {
        self.timings
    }
}

#[derive(Debug, Clone)]
pub struct SourceFile {
    pub label: ClassLabel,
    pub path: PathBuf,
    pub source_id: String,
}

/// Lists `<dir>/<class>/*.csv` in name order. Every class needs at least one file.
pub fn discover_sources(dir: &Path) -> Result<Vec<SourceFile>> {
    if !dir.is_dir() {
        return Err(Error::input(Stage::Extraction, dir, "sources directory not found"));
    }
    let mut out = Vec::new();
    for label in [ClassLabel::Reading, ClassLabel::Conversation] {
        let class_dir = dir.join(label.name());
        let mut files: Vec<PathBuf> = match fs::read_dir(&class_dir) {
            Ok(entries) => entries
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file() && p.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")))
                .collect(),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
            Err(e) => return Err(Error::io(Stage::Extraction, &class_dir, e)),
        };
        if files.is_empty() {
            return Err(Error::input(
                Stage::Extraction,
                &class_dir,
                format!("no {} sources: expected at least one landmark CSV", label.name()),
            ));
        }
        files.sort();
        out.extend(files.into_iter().map(|path| SourceFile {
            label,
            source_id: path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
            path,
        }));
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct ProcessedSource {
    pub file: SourceFile,
    pub source_fps: f64,
    pub input_frames: usize,
    pub blink_replaced: usize,
    pub alpha: f64,
    /// Canvas space at the target rate, before subject normalization.
    pub trajectory: Trajectory,
}

#[derive(Debug, Clone)]
pub struct ProcessedClass {
    pub label: ClassLabel,
    pub sources: Vec<ProcessedSource>,
    pub concat: ConcatenatedClassTrajectory,
}

impl ProcessedClass {
    /// Per-source reference trajectories for evaluation: the concatenated
    /// class clamped to the canvas, at export precision.
    pub fn reference_trajectories(&self, canvas: Canvas) -> Vec<Trajectory> {
        let clamped = session::clamp_to_canvas(&self.concat, canvas);
        clamped
            .segment_samples()
            .map(|(seg, pts)| {
                Trajectory::new(
                    trajectory_csv::quantize_points(pts),
                    clamped.trajectory.fps,
                    Space::Canvas,
                    seg.source_id.clone(),
                )
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct ProcessedSources {
    /// Reading first, then conversation.
    pub classes: Vec<ProcessedClass>,
    pub calibration: Vec<CalibrationRecord>,
}

impl ProcessedSources {
    pub fn class(&self, label: ClassLabel) -> &ProcessedClass {
        self.classes.iter().find(|c| c.label == label).expect("both classes are processed")
    }
}

/// Extraction, blink filtering and calibration, resampling with speed
/// correction, and subject normalization for every source.
pub fn process_sources(
    config: &PipelineConfig,
    sources_dir: &Path,
    clock: &mut StageClock,
) -> Result<ProcessedSources> {
    let files = discover_sources(sources_dir)?;

    let mut extracted = Vec::with_capacity(files.len());
    for file in files {
        let item = clock.time(Stage::Extraction, || {
            let records = landmarks::read_landmarks(&file.path)?;
            let fps = calibration::estimate_fps(&records).unwrap_or(config.default_source_fps);
            let series = calibration::extract_series(&records, fps, &file.source_id)
                .map_err(|e| Error::pipeline(Stage::Extraction, &file.path, e))?;
            Ok((series, fps))
        })?;
        extracted.push((file, item.0, item.1));
    }

    let (filtered, calibration) = clock.time(Stage::Calibration, || {
        let mut filtered = Vec::with_capacity(extracted.len());
        for (file, series, fps) in &extracted {
            let replaced = calibration::blink_mask(series, config.blink_iqr_multiplier).iter().filter(|k| !**k).count();
            let traj = calibration::filter_blinks(series, config.blink_iqr_multiplier)
                .map_err(|e| Error::pipeline(Stage::Calibration, &file.path, e))?;
            info!(source = %file.source_id, class = file.label.name(), fps = *fps, frames = series.samples.len(), replaced, "extracted and blink-filtered");
            filtered.push((traj, replaced));
        }
        let files: Vec<SourceFile> = extracted.iter().map(|(f, ..)| f.clone()).collect();
        let trajs: Vec<Trajectory> = filtered.iter().map(|(t, _)| t.clone()).collect();
        let models = fit_calibration(config, &files, &trajs)?;
        Ok((filtered, models))
    })?;

    let canvas = config.canvas();
    let mut per_class: BTreeMap<ClassLabel, Vec<ProcessedSource>> = BTreeMap::new();
    for (i, ((file, series, fps), (norm, replaced))) in extracted.into_iter().zip(filtered).enumerate() {
        let model = match config.calibration_scope {
            CalibrationScope::PerSource if config.manual_calibration.is_none() => &calibration[i].model,
            _ => &calibration[0].model,
        };
        let calibrated = clock.time(Stage::Calibration, || {
            calibration::apply_calibration(&norm, model, canvas)
                .map_err(|e| Error::pipeline(Stage::Calibration, &file.path, e))
        })?;
        let (traj, alpha) = clock.time(Stage::Resampling, || {
            let fail = |e| Error::pipeline(Stage::Resampling, &file.path, e);
            let resampled = temporal::resample(&calibrated, config.target_fps).map_err(fail)?;
            let (mut corrected, alpha) = temporal::speed_correct(&resampled, &calibrated).map_err(fail)?;
            if config.edgegauss_enabled {
                corrected = temporal::edgegauss_smooth(
                    &corrected,
                    config.edgegauss_sigma_frames,
                    config.edgegauss_restore_threshold_px,
                )
                .map_err(fail)?;
            }
            Ok((corrected, alpha))
        })?;
        info!(source = %file.source_id, class = file.label.name(), alpha, frames = traj.len(), "resampled {fps} -> {} fps", config.target_fps);
        if !(TYPICAL_ALPHA.0..=TYPICAL_ALPHA.1).contains(&alpha) {
            warn!(source = %file.source_id, alpha, "speed-correction factor outside typical range [{}, {}]", TYPICAL_ALPHA.0, TYPICAL_ALPHA.1);
        }
        per_class.entry(file.label).or_default().push(ProcessedSource {
            source_fps: fps,
            input_frames: series.samples.len(),
            blink_replaced: replaced,
            alpha,
            trajectory: traj,
            file,
        });
    }

    let mut classes = Vec::new();
    for label in [ClassLabel::Reading, ClassLabel::Conversation] {
        let sources = per_class.remove(&label).unwrap_or_default();
        let concat = clock.time(Stage::Normalization, || {
            let trajs: Vec<Trajectory> = sources.iter().map(|s| s.trajectory.clone()).collect();
            temporal::concatenate_class(&trajs, label, config)
                .map_err(|e| Error::pipeline(Stage::Normalization, sources_dir.join(label.name()), e))
        })?;
        info!(
            class = label.name(),
            sources = sources.len(),
            total_frames = concat.total_frames(),
            "normalized to mean ({:.3}, {:.3})",
            concat.global_mean.x,
            concat.global_mean.y
        );
        classes.push(ProcessedClass { label, sources, concat });
    }
    Ok(ProcessedSources { classes, calibration })
}

fn fit_calibration(
    config: &PipelineConfig,
    files: &[SourceFile],
    filtered: &[Trajectory],
) -> Result<Vec<CalibrationRecord>> {
    if let Some(model) = config.manual_calibration {
        return Ok(vec![CalibrationRecord { fitted_on: "manual".into(), model }]);
    }
    let fit = |t: &[Trajectory], origin: &Path| -> Result<CalibrationModel> {
        calibration::fit_auto_calibration_pooled(t, config).map_err(|e| Error::pipeline(Stage::Calibration, origin, e))
    };
    match config.calibration_scope {
        CalibrationScope::Pooled => {
            let origin = files.first().and_then(|f| f.path.parent()).and_then(Path::parent).unwrap_or(Path::new("."));
            let model = fit(filtered, origin)?;
            Ok(vec![CalibrationRecord { fitted_on: "pooled".into(), model }])
        }
        CalibrationScope::PerSource => files
            .iter()
            .zip(filtered)
            .map(|(f, t)| {
                Ok(CalibrationRecord { fitted_on: f.source_id.clone(), model: fit(std::slice::from_ref(t), &f.path)? })
            })
            .collect(),
    }
}

/// Sessions for one class plus the values recorded in metadata.
#[derive(Debug, Clone)]
pub struct GeneratedClass {
    pub label: ClassLabel,
    pub speed_scale: f64,
    pub sessions: Vec<Session>,
}

pub fn generate_sessions(config: &PipelineConfig, class: &ProcessedClass) -> Result<GeneratedClass> {
    let alpha = config.speed_scale(class.label);
    let origin = PathBuf::from(class.label.name());
    let fail = |e| Error::pipeline(Stage::Slicing, &origin, e);
    let scaled = session::apply_class_speed_scale(&class.concat, alpha).map_err(fail)?;
    let clamped = session::clamp_to_canvas(&scaled, config.canvas());
    let sessions = session::slice_sessions(&clamped, config.session_count, config.session_frames).map_err(fail)?;
    let wraps = sessions.iter().filter(|s| s.provenance.wraps).count();
    info!(
        class = class.label.name(),
        speed_scale = alpha,
        sessions = sessions.len(),
        stride = session::stride(clamped.total_frames(), config.session_count),
        wraparound = wraps,
        "sliced"
    );
    Ok(GeneratedClass { label: class.label, speed_scale: alpha, sessions })
}

pub fn build_metadata(
    config: &PipelineConfig,
    processed: &ProcessedSources,
    generated: &[GeneratedClass],
) -> DatasetMetadata {
    let mut classes = BTreeMap::new();
    for g in generated {
        let class = processed.class(g.label);
        let total = class.concat.total_frames();
        let sources = class
            .sources
            .iter()
            .zip(&class.concat.segments)
            .map(|(s, seg)| SourceMetadata {
                source_id: s.file.source_id.clone(),
                file: s.file.path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
                source_fps: s.source_fps,
                input_frames: s.input_frames,
                blink_replaced: s.blink_replaced,
                speed_correction_alpha: s.alpha,
                segment: seg.clone(),
            })
            .collect();
        classes.insert(
            g.label.name().to_string(),
            ClassMetadata {
                label: g.label.code(),
                speed_scale: g.speed_scale,
                sessions: g.sessions.len(),
                session_frames: config.session_frames,
                total_frames: total,
                stride: session::stride(total, config.session_count),
                reuse_ratio: session::reuse_ratio(total, config.session_count, config.session_frames),
                wraparound_sessions: g.sessions.iter().filter(|s| s.provenance.wraps).count(),
                global_mean: class.concat.global_mean,
                sources,
            },
        );
    }
    DatasetMetadata {
        schema_version: dataset::SCHEMA_VERSION,
        tool_version: TOOL_VERSION.into(),
        export_decimals: trajectory_csv::EXPORT_DECIMALS,
        config: config.clone(),
        calibration: processed.calibration.clone(),
        classes,
        sessions: generated.iter().flat_map(|g| g.sessions.iter().map(dataset::session_metadata)).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub seed: u64,
    pub config: PipelineConfig,
    pub stage_timings: Vec<StageTiming>,
    /// Speed-correction factor per `<class>/<source_id>`.
    pub speed_correction_alpha: BTreeMap<String, f64>,
    pub outputs: Vec<WrittenFile>,
}

/// Runs every stage and writes the dataset, replay schedules and
/// `run_manifest.json` under `out_dir`.
pub fn cmd_generate(config: &PipelineConfig, sources_dir: &Path, out_dir: &Path) -> Result<RunManifest> {
    let mut clock = StageClock::default();
    let processed = process_sources(config, sources_dir, &mut clock)?;
    let generated = clock.time(Stage::Slicing, || {
        processed.classes.iter().map(|c| generate_sessions(config, c)).collect::<Result<Vec<_>>>()
    })?;
    let metadata = build_metadata(config, &processed, &generated);
    let mut manifest: DatasetManifest = clock.time(Stage::Export, || {
        let [reading, conversation] = [ClassLabel::Reading, ClassLabel::Conversation]
            .map(|l| generated.iter().find(|g| g.label == l).map(|g| g.sessions.as_slice()).unwrap_or(&[]));
        dataset::export_dataset(reading, conversation, &metadata, out_dir)
    })?;
    clock.time(Stage::Schedule, || {
        for s in generated.iter().flat_map(|g| &g.sessions) {
            let sched = session::emit_replay_schedule(s, config.target_fps, config.canvas())
                .map_err(|e| Error::pipeline(Stage::Schedule, dataset::session_dir(out_dir, &s.id), e))?;
            let path = dataset::session_dir(out_dir, &s.id).join(dataset::SCHEDULE_FILE);
            fs::write(&path, schedule::schedule_to_string(&sched)).map_err(|e| Error::io(Stage::Schedule, &path, e))?;
            manifest.files.push(WrittenFile {
                path: format!("{}/{}/{}", dataset::SESSIONS_DIR, s.id, dataset::SCHEDULE_FILE),
                rows: sched.events.len(),
            });
        }
        Ok(())
    })?;

    let speed_correction_alpha = processed
        .classes
        .iter()
        .flat_map(|c| c.sources.iter().map(move |s| (format!("{}/{}", c.label.name(), s.file.source_id), s.alpha)))
        .collect();
    let run = RunManifest {
        tool_version: TOOL_VERSION.into(),
        seed: config.random_seed,
        config: config.clone(),
        stage_timings: clock.into_timings(),
        speed_correction_alpha,
        outputs: manifest.files,
    };
    dataset::write_json(&out_dir.join(RUN_MANIFEST_FILE), &run, Stage::Export)?;
    info!(out = %out_dir.display(), files = run.outputs.len(), "dataset written");
    Ok(run)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricBlock {
    /// `"ok"`, or `"undefined"` when either pool is empty.
    pub status: String,
    pub d: Option<f64>,
    pub n: usize,
    pub m: usize,
    pub p_value: Option<f64>,
    pub qq: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub pooling: String,
    pub qq_points: usize,
    /// Class name -> metric name -> comparison.
    pub classes: BTreeMap<String, BTreeMap<String, MetricBlock>>,
}

impl EvalReport {
    pub fn from_evaluations(evals: &[ClassEvaluation], qq_points: usize) -> Self {
        let classes = evals
            .iter()
            .map(|ev| {
                let metrics = ev
                    .metrics
                    .iter()
                    .map(|m| {
                        let block = MetricBlock {
                            status: if m.is_defined() { "ok" } else { "undefined" }.into(),
                            d: m.ks.map(|k| k.d_statistic),
                            n: m.n_source,
                            m: m.n_generated,
                            p_value: m.ks.and_then(|k| k.p_value),
                            qq: m.qq.iter().map(|&(a, b)| [a, b]).collect(),
                        };
                        (m.metric.name().to_string(), block)
                    })
                    .collect();
                (ev.label.name().to_string(), metrics)
            })
            .collect();
        EvalReport {
            schema_version: dataset::SCHEMA_VERSION,
            tool_version: TOOL_VERSION.into(),
            pooling: "all frames of a class pooled; speeds and events computed per trajectory".into(),
            qq_points,
            classes,
        }
    }
}

/// Compares a generated dataset with the sources it was built from. Writes
/// the report to `out_path` and one `q_source,q_generated` CSV per panel
/// beside it.
pub fn cmd_eval(dataset_dir: &Path, sources_dir: &Path, out_path: &Path) -> Result<EvalReport> {
    let loaded = dataset::read_dataset(dataset_dir)?;
    let config = &loaded.metadata.config;
    let mut clock = StageClock::default();
    let processed = process_sources(config, sources_dir, &mut clock)?;
    for class in &processed.classes {
        let recorded = loaded.metadata.classes.get(class.label.name()).map(|c| c.sources.len()).unwrap_or(0);
        if recorded != class.sources.len() {
            warn!(
                class = class.label.name(),
                recorded,
                found = class.sources.len(),
                "source count differs from dataset metadata"
            );
        }
    }
    let evals = [ClassLabel::Reading, ClassLabel::Conversation]
        .iter()
        .map(|&label| {
            let reference = processed.class(label).reference_trajectories(config.canvas());
            let generated = loaded.class_sessions(label);
            if generated.is_empty() {
                return Err(Error::input(
                    Stage::Evaluation,
                    dataset_dir.join(dataset::LABELS_FILE),
                    format!("no {} sessions", label.name()),
                ));
            }
            eval::evaluate_class(label, &reference, &generated, config, DEFAULT_QQ_POINTS)
                .map_err(|e| Error::pipeline(Stage::Evaluation, dataset_dir, e))
        })
        .collect::<Result<Vec<_>>>()?;
    let report = EvalReport::from_evaluations(&evals, DEFAULT_QQ_POINTS);

    if let Some(parent) = out_path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(Stage::Evaluation, parent, e))?;
    }
    dataset::write_json(out_path, &report, Stage::Evaluation)?;
    let stem = out_path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "report".into());
    for (class, metrics) in &report.classes {
        for (metric, block) in metrics {
            if let Some(d) = block.d {
                info!(class = %class, metric = %metric, d, n = block.n, m = block.m, "ks");
            }
            let path = out_path.with_file_name(format!("{stem}_qq_{class}_{metric}.csv"));
            let mut text = String::from("q_source,q_generated\n");
            for [a, b] in &block.qq {
                text.push_str(&format!("{a},{b}\n"));
            }
            fs::write(&path, text).map_err(|e| Error::io(Stage::Evaluation, &path, e))?;
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisPair {
    pub x: Option<f64>,
    pub y: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchedReport {
    pub mean_iris_error: f64,
    pub median_iris_error: f64,
    pub p95_iris_error: f64,
    pub correlation: AxisPair,
    pub amplitude_ratio: AxisPair,
    pub std_ratio: AxisPair,
    /// Cursor range in pixels (max - min) per axis, when a cursor file is given.
    pub cursor_range_px: Option<AxisPair>,
    pub frames: usize,
    pub amplitude_definition: String,
}

impl MatchedReport {
    pub fn new(r: &MatchedFidelityReport, cursor: Option<&Trajectory>) -> Self {
        let range = |v: &mut dyn Iterator<Item = f64>| {
            let (lo, hi) = v.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
            (hi >= lo).then_some(hi - lo)
        };
        MatchedReport {
            mean_iris_error: r.mean_error,
            median_iris_error: r.median_error,
            p95_iris_error: r.p95_error,
            correlation: AxisPair { x: r.correlation_x, y: r.correlation_y },
            amplitude_ratio: AxisPair { x: Some(r.amplitude_ratio_x), y: Some(r.amplitude_ratio_y) },
            std_ratio: AxisPair { x: Some(r.std_ratio_x), y: Some(r.std_ratio_y) },
            cursor_range_px: cursor.map(|c| AxisPair {
                x: range(&mut c.samples.iter().map(|p| p.x)),
                y: range(&mut c.samples.iter().map(|p| p.y)),
            }),
            frames: r.samples,
            amplitude_definition: "p95 - p5 of the mean-centered signal, sim / real".into(),
        }
    }
}

fn read_normalized(path: &Path) -> Result<Trajectory> {
    let t = trajectory_csv::read_trajectory_file(path, 1.0, Space::Normalized, Stage::Matched)?;
    if let Some(i) = t.samples.iter().position(|p| !(0.0..=1.0).contains(&p.x) || !(0.0..=1.0).contains(&p.y)) {
        return Err(Error::input(
            Stage::Matched,
            path,
            format!("line {}: coordinate outside normalized [0, 1] space", i + 2),
        ));
    }
    Ok(t)
}

/// Frame-locked comparison of two normalized iris trajectories.
pub fn cmd_matched(real: &Path, sim: &Path, cursor: Option<&Path>, out_path: &Path) -> Result<MatchedReport> {
    let (r, s) = (read_normalized(real)?, read_normalized(sim)?);
    if r.len() != s.len() {
        return Err(Error::input(
            Stage::Matched,
            sim,
            format!("length mismatch: real has {} frames, sim has {}", r.len(), s.len()),
        ));
    }
    let cursor =
        cursor.map(|p| trajectory_csv::read_trajectory_file(p, 1.0, Space::Canvas, Stage::Matched)).transpose()?;
    let fidelity = eval::matched_fidelity(&r, &s).map_err(|e| Error::pipeline(Stage::Matched, real, e))?;
    let report = MatchedReport::new(&fidelity, cursor.as_ref());
    dataset::write_json(out_path, &report, Stage::Matched)?;
    info!(mean_error = report.mean_iris_error, frames = report.frames, "matched comparison written");
    Ok(report)
}

/// Converts one `frame,x,y` session CSV into a `.moves` schedule.
pub fn cmd_emit_schedule(session_csv: &Path, fps: f64, viewport: Canvas, out_path: &Path) -> Result<usize> {
    let traj = trajectory_csv::read_trajectory_file(session_csv, fps, Space::Canvas, Stage::Schedule)?;
    if let Some(i) = traj.samples.iter().position(|p| !viewport.contains(*p)) {
        return Err(Error::input(
            Stage::Schedule,
            session_csv,
            format!("line {}: coordinate outside viewport {}x{}", i + 2, viewport.width, viewport.height),
        ));
    }
    let session = Session {
        id: traj.source_id.clone(),
        label: ClassLabel::Reading,
        provenance: session::SessionProvenance { sources: vec![], start_frame: 0, wraps: false },
        trajectory: traj,
    };
    let sched = session::emit_replay_schedule(&session, fps, viewport)
        .map_err(|e| Error::pipeline(Stage::Schedule, session_csv, e))?;
    fs::write(out_path, schedule::schedule_to_string(&sched)).map_err(|e| Error::io(Stage::Schedule, out_path, e))?;
    Ok(sched.events.len())
}
