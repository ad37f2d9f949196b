//! `bstree`: config-driven front end for the `bstree-core` library.
//!
//! Sessions are read from an INI-like file (see [`config`]); commands and
//! suites print line-oriented reports that are byte-identical across runs
//! with the same inputs and seed.

pub mod commands;
pub mod config;
pub mod sample;
pub mod suites;

pub use commands::run;

/// The session used when no `--config` is given.
pub const DEFAULT_CONFIG: &str = include_str!("default.ini");
