//! Line-oriented `.moves` replay schedules.
//!
//! ```text
//! viewport 1280 720
//! fps 25
//! move 0 640 360
//! move 1 642 359
//! ```
//!
//! Each `move` is followed by a wait of `1000 / fps` ms. Coordinates are
//! integer device pixels within `[0, width] x [0, height]`.

use std::fmt;
use std::io::Write;

use gazeforge_core::session::{ReplayEvent, ReplaySchedule};

pub fn write_schedule<W: Write>(mut w: W, schedule: &ReplaySchedule) -> std::io::Result<()> {
    writeln!(w, "viewport {} {}", schedule.viewport.0, schedule.viewport.1)?;
    writeln!(w, "fps {}", schedule.fps)?;
    for e in &schedule.events {
        writeln!(w, "move {} {} {}", e.frame, e.x, e.y)?;
    }
    w.flush()
}

pub fn schedule_to_string(schedule: &ReplaySchedule) -> String {
    let mut buf = Vec::new();
    write_schedule(&mut buf, schedule).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduleError {
    pub line: usize,
    pub reason: String,
}

impl fmt::Display for ScheduleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.reason)
    }
}

/// Parses and validates a schedule, collecting every violation.
pub fn parse_schedule(text: &str) -> Result<ReplaySchedule, Vec<ScheduleError>> {
    let mut errors = Vec::new();
    let mut err = |line: usize, reason: String| errors.push(ScheduleError { line, reason });
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());

    let mut viewport = None;
    match lines.next() {
        Some((n, l)) => match l.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["viewport", w, h] => match (w.parse::<u32>(), h.parse::<u32>()) {
                (Ok(w), Ok(h)) if w > 0 && h > 0 => viewport = Some((w, h)),
                _ => err(n, format!("bad viewport {l:?}")),
            },
            _ => err(n, "viewport line absent".into()),
        },
        None => err(1, "viewport line absent".into()),
    }
    let mut fps = None;
    match lines.next() {
        Some((n, l)) => match l.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["fps", v] => match v.parse::<f64>() {
                Ok(v) if v > 0.0 && v.is_finite() => fps = Some(v),
                _ => err(n, format!("bad fps {v:?}")),
            },
            _ => err(n, "fps line absent".into()),
        },
        None => err(2, "fps line absent".into()),
    }

    let (w, h) = viewport.unwrap_or((u32::MAX, u32::MAX));
    let delay_ms = fps.map(|f| 1000.0 / f).unwrap_or(0.0);
    let mut events = Vec::new();
    for (n, l) in lines {
        let parts: Vec<&str> = l.split_whitespace().collect();
        let ["move", frame, x, y] = parts.as_slice() else {
            err(n, format!("expected `move <frame> <x> <y>`, got {l:?}"));
            continue;
        };
        let (Ok(frame), Ok(x), Ok(y)) = (frame.parse::<usize>(), x.parse::<i64>(), y.parse::<i64>()) else {
            err(n, format!("non-integer field in {l:?}"));
            continue;
        };
        if frame != events.len() {
            err(n, format!("expected frame {}, got {frame}", events.len()));
        }
        if !(0..=i64::from(w)).contains(&x) || !(0..=i64::from(h)).contains(&y) {
            err(n, format!("coordinate ({x}, {y}) outside viewport {w}x{h}"));
        }
        events.push(ReplayEvent { frame, x, y, delay_ms });
    }
    if errors.is_empty() {
        Ok(ReplaySchedule { viewport: viewport.unwrap(), fps: fps.unwrap(), events })
    } else {
        Err(errors)
    }
}
