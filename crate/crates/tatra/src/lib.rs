//! File formats, JSON reports and the batch driver around `tatra-core`.

pub mod batch;
pub mod cli;
pub mod commands;
pub mod formats;

pub use tatra_core as core;
