//! Synthetic landmark fixtures.
//!
//! Reading sources sweep left to right in small steps with a return sweep
//! per line. Conversation sources hold fixations near the center with
//! occasional larger shifts. Both carry seeded fixational jitter and a few
//! blink frames (eyes marked invalid, or an eyelid-collapse spike).

#![allow(dead_code)]

use std::fs::{self, File};
use std::path::Path;
use std::process::{Command, Output};

use gazeforge::landmarks::write_landmarks;
use gazeforge_core::{ClassLabel, EyeLandmarks, LandmarkRecord};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

pub const SOURCE_FPS: f64 = 30.0;

fn eye(inner: f64, n: (f64, f64)) -> EyeLandmarks {
    EyeLandmarks {
        iris_x: inner + 40.0 * n.0,
        iris_y: 50.0 + 20.0 * n.1,
        inner_corner_x: inner,
        outer_corner_x: inner + 40.0,
        eyelid_top_y: 50.0,
        eyelid_bottom_y: 70.0,
    }
}

/// Normalized gaze targets (without jitter) for one source.
pub fn gaze_path(label: ClassLabel, frames: usize, rng: &mut ChaCha8Rng) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(frames);
    match label {
        ClassLabel::Reading => {
            let mut line = 0usize;
            while out.len() < frames {
                let y = 0.35 + 0.04 * (line % 8) as f64;
                let mut x = 0.3;
                while x < 0.7 && out.len() < frames {
                    let dwell = rng.random_range(6..12);
                    out.extend(std::iter::repeat_n((x, y), dwell));
                    x += rng.random_range(0.025..0.045);
                }
                line += 1;
            }
        }
        ClassLabel::Conversation => {
            let around = Normal::new(0.5, 0.05).unwrap();
            while out.len() < frames {
                let target = (around.sample(rng), around.sample(rng));
                let dwell = rng.random_range(15..60);
                out.extend(std::iter::repeat_n(target, dwell));
            }
        }
    }
    out.truncate(frames);
    out
}

pub fn landmark_records(label: ClassLabel, frames: usize, seed: u64) -> Vec<LandmarkRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let path = gaze_path(label, frames, &mut rng);
    let jitter = Normal::new(0.0, 0.0012).unwrap();
    path.into_iter()
        .enumerate()
        .map(|(i, (x, y))| {
            let n = (x + jitter.sample(&mut rng), y + jitter.sample(&mut rng));
            let mut rec = LandmarkRecord {
                frame_index: i as u64,
                timestamp_s: Some(i as f64 / SOURCE_FPS),
                left: Some(eye(100.0, n)),
                right: Some(eye(200.0, n)),
            };
            if i % 397 == 200 {
                rec.left = None;
                rec.right = None;
            } else if i % 613 == 300 {
                for e in [rec.left.as_mut().unwrap(), rec.right.as_mut().unwrap()] {
                    e.iris_y = 49.0;
                    e.eyelid_bottom_y = 51.0;
                }
            }
            rec
        })
        .collect()
}

/// Writes `<dir>/reading/reading_src_<i>.csv` and the conversation analogue.
pub fn write_sources(dir: &Path, per_class: usize, frames: usize, seed: u64) {
    for (c, label) in [ClassLabel::Reading, ClassLabel::Conversation].into_iter().enumerate() {
        let class_dir = dir.join(label.name());
        fs::create_dir_all(&class_dir).unwrap();
        for i in 0..per_class {
            let recs = landmark_records(label, frames, seed.wrapping_mul(1000) + (c * 100 + i) as u64);
            let file = File::create(class_dir.join(format!("{}_src_{i}.csv", label.name()))).unwrap();
            write_landmarks(file, &recs).unwrap();
        }
    }
}

pub fn gazeforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gazeforge"))
        .args(args)
        .env("GAZEFORGE_LOG", "warn")
        .env_remove("GAZEFORGE_SEED")
        .output()
        .expect("binary runs")
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Every regular file under `root`, relative path -> bytes, sorted.
pub fn tree_bytes(root: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(root).unwrap().to_string_lossy().replace('\\', "/");
                out.push((rel, fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

/// Brute-force two-sample KS: evaluate both ECDFs at every pooled point.
pub fn ks_brute_force(a: &[f64], b: &[f64]) -> f64 {
    let ecdf = |s: &[f64], t: f64| s.iter().filter(|&&v| v <= t).count() as f64 / s.len() as f64;
    a.iter().chain(b).map(|&t| (ecdf(a, t) - ecdf(b, t)).abs()).fold(0.0, f64::max)
}
