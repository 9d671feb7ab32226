//! Pipeline configuration loading. Precedence: flag > `GAZEFORGE_SEED` (seed
//! only) > config file > built-in default.

use std::path::Path;

use gazeforge_core::{validate_config, PipelineConfig};

use crate::error::{Error, Result, Stage};

pub const SEED_ENV: &str = "GAZEFORGE_SEED";

/// Values given on the command line; `None` leaves the file/default value.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub session_count: Option<usize>,
    pub session_frames: Option<usize>,
    pub target_fps: Option<f64>,
    pub speed_scale_reading: Option<f64>,
    pub speed_scale_conversation: Option<f64>,
    pub edgegauss: Option<bool>,
    pub seed: Option<u64>,
}

pub fn parse_config(text: &str, origin: &Path) -> Result<PipelineConfig> {
    serde_json::from_str(text).map_err(|e| Error::input(Stage::Config, origin, format!("invalid config JSON: {e}")))
}

/// Loads, overrides and validates. `env_seed` is the raw `GAZEFORGE_SEED` value.
pub fn resolve_config(path: Option<&Path>, overrides: &Overrides, env_seed: Option<&str>) -> Result<PipelineConfig> {
    let origin = path.unwrap_or(Path::new("<defaults>"));
    let mut config = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::io(Stage::Config, p, e))?;
            parse_config(&text, p)?
        }
        None => PipelineConfig::default(),
    };
    if let Some(raw) = env_seed {
        config.random_seed = raw.trim().parse().map_err(|_| {
            Error::input(Stage::Config, origin, format!("{SEED_ENV}={raw:?} is not an unsigned integer"))
        })?;
    }
    let o = overrides;
    if let Some(v) = o.session_count {
        config.session_count = v;
    }
    if let Some(v) = o.session_frames {
        config.session_frames = v;
    }
    if let Some(v) = o.target_fps {
        config.target_fps = v;
    }
    if let Some(v) = o.speed_scale_reading {
        config.speed_scale_reading = v;
    }
    if let Some(v) = o.speed_scale_conversation {
        config.speed_scale_conversation = v;
    }
    if let Some(v) = o.edgegauss {
        config.edgegauss_enabled = v;
    }
    if let Some(v) = o.seed {
        config.random_seed = v;
    }
    validate_config(config).map_err(|violations| Error::Config { path: origin.to_path_buf(), violations })
}
