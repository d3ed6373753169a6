//! Filesystem, network and command-line layer over `schemamatch_core`.

pub mod cli;
pub mod clock;
pub mod config;
pub mod error;
pub mod files;
pub mod grid;
pub mod remote;

pub use error::AppError;
pub use schemamatch_core as engine;
