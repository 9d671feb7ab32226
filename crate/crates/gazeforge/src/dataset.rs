//! Dataset tree layout and its metadata.
//!
//! ```text
//! <out>/labels.csv                       session_id,label
//! <out>/metadata.json
//! <out>/sessions/<session_id>/trajectory.csv
//! <out>/sessions/<session_id>/replay.moves   (written by `generate`)
//! ```

use std::collections::{BTreeMap, HashSet};
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use gazeforge_core::calibration::CalibrationModel;
use gazeforge_core::session::Session;
use gazeforge_core::temporal::Segment;
use gazeforge_core::{ClassLabel, PipelineConfig, Point, Space, Trajectory};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Stage};
use crate::trajectory_csv::{self, EXPORT_DECIMALS};

pub const SCHEMA_VERSION: u32 = 1;
pub const LABELS_FILE: &str = "labels.csv";
pub const METADATA_FILE: &str = "metadata.json";
pub const SESSIONS_DIR: &str = "sessions";
pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const SCHEDULE_FILE: &str = "replay.moves";

pub fn session_dir(root: &Path, session_id: &str) -> PathBuf {
    root.join(SESSIONS_DIR).join(session_id)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationRecord {
    /// Source id, or `"pooled"` / `"manual"`.
    pub fitted_on: String,
    pub model: CalibrationModel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceMetadata {
    pub source_id: String,
    pub file: String,
    pub source_fps: f64,
    pub input_frames: usize,
    /// Frames replaced by blink filtering (invalid or outlier).
    pub blink_replaced: usize,
    /// Path-length restoration factor from speed correction.
    pub speed_correction_alpha: f64,
    pub segment: Segment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassMetadata {
    pub label: u8,
    pub speed_scale: f64,
    pub sessions: usize,
    pub session_frames: usize,
    pub total_frames: usize,
    pub stride: usize,
    /// Session frames requested divided by `total_frames`.
    pub reuse_ratio: f64,
    pub wraparound_sessions: usize,
    pub global_mean: Point,
    pub sources: Vec<SourceMetadata>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionMetadata {
    pub session_id: String,
    pub label: u8,
    pub start_frame: usize,
    pub wraps: bool,
    pub sources: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetMetadata {
    pub schema_version: u32,
    pub tool_version: String,
    pub export_decimals: usize,
    pub config: PipelineConfig,
    pub calibration: Vec<CalibrationRecord>,
    /// Keyed by class name.
    pub classes: BTreeMap<String, ClassMetadata>,
    pub sessions: Vec<SessionMetadata>,
}

impl DatasetMetadata {
    /// Parses and checks structural consistency.
    pub fn from_json(text: &str, origin: &Path) -> Result<Self> {
        let meta: DatasetMetadata = serde_json::from_str(text)
            .map_err(|e| Error::input(Stage::Evaluation, origin, format!("metadata does not match schema: {e}")))?;
        if meta.schema_version != SCHEMA_VERSION {
            return Err(Error::input(
                Stage::Evaluation,
                origin,
                format!("unsupported schema_version {} (expected {SCHEMA_VERSION})", meta.schema_version),
            ));
        }
        for (name, class) in &meta.classes {
            let known = ClassLabel::from_code(class.label).map(ClassLabel::name);
            if known != Some(name.as_str()) {
                return Err(Error::input(
                    Stage::Evaluation,
                    origin,
                    format!("class `{name}` has label {}", class.label),
                ));
            }
        }
        Ok(meta)
    }
}

pub fn session_metadata(s: &Session) -> SessionMetadata {
    SessionMetadata {
        session_id: s.id.clone(),
        label: s.label.code(),
        start_frame: s.provenance.start_frame,
        wraps: s.provenance.wraps,
        sources: s.provenance.sources.clone(),
    }
}

/// One written file and its data-row count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WrittenFile {
    /// Relative to the dataset root, `/`-separated.
    pub path: String,
    pub rows: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub files: Vec<WrittenFile>,
}

fn relative(root: &Path, path: &Path) -> String {
    path.strip_prefix(root)
        .unwrap_or(path)
        .components()
        .map(|c| c.as_os_str().to_string_lossy())
        .collect::<Vec<_>>()
        .join("/")
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(Stage::Export, path, e))
}

/// Writes session trajectories, `labels.csv` and `metadata.json`.
pub fn export_dataset(
    reading: &[Session],
    conversation: &[Session],
    metadata: &DatasetMetadata,
    out_dir: &Path,
) -> Result<DatasetManifest> {
    if reading.is_empty() {
        return Err(Error::input(Stage::Export, out_dir, "no reading sessions to export"));
    }
    if conversation.is_empty() {
        return Err(Error::input(Stage::Export, out_dir, "no conversation sessions to export"));
    }
    let mut seen = HashSet::new();
    for s in reading.iter().chain(conversation) {
        if !seen.insert(s.id.as_str()) {
            return Err(Error::input(Stage::Export, out_dir, format!("session id collision: {}", s.id)));
        }
    }
    create_dir(out_dir)?;
    let mut manifest = DatasetManifest::default();
    for s in reading.iter().chain(conversation) {
        let dir = session_dir(out_dir, &s.id);
        create_dir(&dir)?;
        let path = dir.join(TRAJECTORY_FILE);
        trajectory_csv::write_trajectory_file(&path, &s.trajectory.samples, Stage::Export)?;
        manifest.files.push(WrittenFile { path: relative(out_dir, &path), rows: s.trajectory.len() });
    }

    let labels_path = out_dir.join(LABELS_FILE);
    let write_labels = || -> std::io::Result<()> {
        let mut w = BufWriter::new(File::create(&labels_path)?);
        writeln!(w, "session_id,label")?;
        for s in reading.iter().chain(conversation) {
            writeln!(w, "{},{}", s.id, s.label.code())?;
        }
        w.flush()
    };
    write_labels().map_err(|e| Error::io(Stage::Export, &labels_path, e))?;
    manifest.files.push(WrittenFile { path: LABELS_FILE.into(), rows: reading.len() + conversation.len() });

    let meta_path = out_dir.join(METADATA_FILE);
    write_json(&meta_path, metadata, Stage::Export)?;
    manifest.files.push(WrittenFile { path: METADATA_FILE.into(), rows: 1 });
    Ok(manifest)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T, stage: Stage) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable value");
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(stage, path, e))
}

pub fn read_labels(path: &Path) -> Result<Vec<(String, ClassLabel)>> {
    let file = File::open(path).map_err(|e| Error::io(Stage::Evaluation, path, e))?;
    let mut rdr = csv::Reader::from_reader(file);
    let headers = rdr.headers().map_err(|e| Error::input(Stage::Evaluation, path, e.to_string()))?;
    if headers.iter().collect::<Vec<_>>() != ["session_id", "label"] {
        return Err(Error::input(Stage::Evaluation, path, "expected header `session_id,label`"));
    }
    let mut out = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let fail = |m: String| Error::input(Stage::Evaluation, path, format!("line {}: {m}", i + 2));
        let row = row.map_err(|e| fail(e.to_string()))?;
        let code: u8 = row[1].trim().parse().map_err(|_| fail(format!("bad label {:?}", &row[1])))?;
        let label = ClassLabel::from_code(code).ok_or_else(|| fail(format!("label must be 0 or 1, got {code}")))?;
        out.push((row[0].trim().to_string(), label));
    }
    Ok(out)
}

/// A dataset read back from disk.
#[derive(Debug, Clone)]
pub struct LoadedDataset {
    pub metadata: DatasetMetadata,
    pub sessions: Vec<(ClassLabel, Trajectory)>,
}

impl LoadedDataset {
    pub fn class_sessions(&self, label: ClassLabel) -> Vec<Trajectory> {
        self.sessions.iter().filter(|(l, _)| *l == label).map(|(_, t)| t.clone()).collect()
    }
}

pub fn read_dataset(root: &Path) -> Result<LoadedDataset> {
    let meta_path = root.join(METADATA_FILE);
    let text = fs::read_to_string(&meta_path).map_err(|e| Error::io(Stage::Evaluation, &meta_path, e))?;
    let metadata = DatasetMetadata::from_json(&text, &meta_path)?;
    if metadata.export_decimals != EXPORT_DECIMALS {
        return Err(Error::input(
            Stage::Evaluation,
            &meta_path,
            format!("unsupported export_decimals {}", metadata.export_decimals),
        ));
    }
    let labels = read_labels(&root.join(LABELS_FILE))?;
    let fps = metadata.config.target_fps;
    let sessions = labels
        .into_iter()
        .map(|(id, label)| {
            let path = session_dir(root, &id).join(TRAJECTORY_FILE);
            let mut t = trajectory_csv::read_trajectory_file(&path, fps, Space::Canvas, Stage::Evaluation)?;
            t.source_id = id;
            Ok((label, t))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LoadedDataset { metadata, sessions })
}
