//! File formats, dataset export and command implementations for gazeforge.

pub mod config;
pub mod dataset;
pub mod error;
pub mod landmarks;
pub mod pipeline;
pub mod schedule;
pub mod trajectory_csv;

pub use error::{Error, Result, Stage};
