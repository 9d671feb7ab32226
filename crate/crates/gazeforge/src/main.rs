use std::io::IsTerminal;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gazeforge::config::{self, Overrides, SEED_ENV};
use gazeforge::pipeline;
use gazeforge_core::Canvas;
use tracing_subscriber::EnvFilter;

#[derive(Parser)]
#[command(name = "gazeforge", version, about = "Synthetic gaze-trajectory dataset generation and evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a labeled session dataset from landmark CSVs.
    Generate {
        /// JSON config; omitted fields take defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Directory holding `reading/*.csv` and `conversation/*.csv`.
        #[arg(long)]
        sources: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        sessions: Option<usize>,
        #[arg(long)]
        frames: Option<usize>,
        #[arg(long)]
        target_fps: Option<f64>,
        #[arg(long)]
        speed_scale_reading: Option<f64>,
        #[arg(long)]
        speed_scale_conversation: Option<f64>,
        /// Enable edge-preserving smoothing after resampling.
        #[arg(long)]
        edgegauss: bool,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Compare generated sessions with their sources (KS + Q-Q).
    Eval {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        sources: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Frame-locked comparison of real and simulator iris trajectories.
    Matched {
        #[arg(long)]
        real: PathBuf,
        #[arg(long)]
        sim: PathBuf,
        /// Optional canvas cursor trajectory, for the cursor-range rows.
        #[arg(long)]
        cursor: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Convert a session CSV into a `.moves` replay schedule.
    EmitSchedule {
        #[arg(long)]
        session: PathBuf,
        #[arg(long, default_value_t = 25.0)]
        fps: f64,
        #[arg(long)]
        out: PathBuf,
        /// Viewport as WIDTHxHEIGHT.
        #[arg(long, default_value = "1280x720", value_parser = parse_viewport)]
        viewport: Canvas,
    },
}

fn parse_viewport(s: &str) -> Result<Canvas, String> {
    let (w, h) = s.split_once(['x', 'X']).ok_or("expected WIDTHxHEIGHT")?;
    let w: u32 = w.trim().parse().map_err(|_| format!("bad width {w:?}"))?;
    let h: u32 = h.trim().parse().map_err(|_| format!("bad height {h:?}"))?;
    if w == 0 || h == 0 {
        return Err("viewport must be non-empty".into());
    }
    Ok(Canvas { width: f64::from(w), height: f64::from(h) })
}

fn run(cli: Cli) -> gazeforge::Result<()> {
    match cli.command {
        Command::Generate {
            config,
            sources,
            out,
            sessions,
            frames,
            target_fps,
            speed_scale_reading,
            speed_scale_conversation,
            edgegauss,
            seed,
        } => {
            let overrides = Overrides {
                session_count: sessions,
                session_frames: frames,
                target_fps,
                speed_scale_reading,
                speed_scale_conversation,
                edgegauss: edgegauss.then_some(true),
                seed,
            };
            let env_seed = std::env::var(SEED_ENV).ok();
            let cfg = config::resolve_config(config.as_deref(), &overrides, env_seed.as_deref())?;
            pipeline::cmd_generate(&cfg, &sources, &out)?;
        }
        Command::Eval { dataset, sources, out } => {
            pipeline::cmd_eval(&dataset, &sources, &out)?;
        }
        Command::Matched { real, sim, cursor, out } => {
            pipeline::cmd_matched(&real, &sim, cursor.as_deref(), &out)?;
        }
        Command::EmitSchedule { session, fps, out, viewport } => {
            pipeline::cmd_emit_schedule(&session, fps, viewport, &out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_env("GAZEFORGE_LOG").unwrap_or_else(|_| EnvFilter::new("info")))
        .with_writer(std::io::stderr)
        .with_ansi(std::io::stderr().is_terminal())
        .with_target(false)
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
