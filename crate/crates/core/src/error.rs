use core::fmt;

use crate::model::Space;

/// Axis of a 2D sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axis::X => f.write_str("x"),
            Axis::Y => f.write_str("y"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A stage received a trajectory in the wrong coordinate space.
    SpaceMismatch {
        expected: Space,
        found: Space,
    },
    EmptyTrajectory,
    /// Fewer samples than the operation needs.
    TooFewSamples {
        needed: usize,
        found: usize,
    },
    SourceFpsOutOfRange(f64),
    InvalidParameter {
        name: &'static str,
        value: f64,
    },
    /// Every sample was invalid or an outlier; there is nothing to fill from.
    NoValidAnchor,
    /// The percentile range on an axis is zero, so it cannot be auto-scaled.
    DegenerateAxis(Axis),
    /// The resampled path has zero length while the original does not.
    DegenerateResampledPath,
    EmptyInput(&'static str),
    /// Landmark frame indices must strictly increase within a source.
    NonIncreasingFrame {
        previous: u64,
        found: u64,
    },
    LengthMismatch {
        real: usize,
        sim: usize,
    },
    /// Real amplitude on an axis is zero; an amplitude ratio is undefined.
    ZeroAmplitude(Axis),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::SpaceMismatch { expected, found } => {
                write!(f, "expected a {expected}-space trajectory, got {found}-space")
            }
            Error::EmptyTrajectory => f.write_str("trajectory has no samples"),
            Error::TooFewSamples { needed: 2, found } if *found < 2 => {
                write!(f, "cannot interpolate: need at least 2 samples, got {found}")
            }
            Error::TooFewSamples { needed, found } => {
                write!(f, "need at least {needed} samples, got {found}")
            }
            Error::SourceFpsOutOfRange(fps) => {
                write!(f, "source frame rate {fps} outside supported range [1, 120]")
            }
            Error::InvalidParameter { name, value } => write!(f, "invalid {name}: {value}"),
            Error::NoValidAnchor => f.write_str("no valid anchor sample"),
            Error::DegenerateAxis(axis) => {
                write!(f, "degenerate axis {axis}: percentile range is zero")
            }
            Error::DegenerateResampledPath => f.write_str("degenerate resampled path"),
            Error::EmptyInput(what) => write!(f, "empty input: {what}"),
            Error::NonIncreasingFrame { previous, found } => {
                write!(f, "frame index {found} does not increase after {previous}")
            }
            Error::LengthMismatch { real, sim } => {
                write!(f, "length mismatch: real has {real} frames, sim has {sim}")
            }
            Error::ZeroAmplitude(axis) => {
                write!(f, "real amplitude on axis {axis} is zero; ratio undefined")
            }
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
