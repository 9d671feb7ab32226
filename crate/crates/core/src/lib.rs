//! Trajectory processing core for replaying real eye movements on a cursor-driven
//! eye simulator.
//!
//! The pipeline turns per-frame eye landmarks into labeled, fixed-length cursor
//! sessions:
//!
//! 1. [`calibration`]: iris position as a fraction of the eye aperture, blink
//!    filtering, and the affine map onto the simulator canvas.
//! 2. [`temporal`]: linear resampling to the target frame rate, path-length
//!    restoration, optional EdgeGauss smoothing, per-subject centering and
//!    per-class concatenation.
//! 3. [`session`]: per-class speed scaling, circular slicing into sessions and
//!    replay schedules.
//!
//! [`eval`] holds the fidelity metrics (I-VT events, two-sample KS, Q-Q pairs,
//! matched frame-by-frame comparison).
//!
//! The crate is `no_std` and only needs `alloc`. File formats and the CLI live
//! in the `gazeforge` crate.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod calibration;
pub mod error;
pub mod eval;
pub mod model;
pub mod session;
pub mod stats;
pub mod temporal;

pub use error::{Axis, Error, Result};
pub use model::{
    validate_config, CalibrationScope, Canvas, ClassLabel, ConfigViolation, EyeLandmarks, GlobalMeanMode, IrisSeries,
    LandmarkRecord, NormalizedSample, PipelineConfig, Point, Space, Trajectory,
};
