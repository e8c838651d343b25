//! Experiment runner for `wickbell-core`: `key = value` configs, CSV
//! outputs and the `wickbell` command-line tool.

pub mod catalog;
pub mod config;
pub mod error;
pub mod experiments;
pub mod output;

use std::path::PathBuf;

/// Environment variable consulted for the output directory.
pub const OUT_DIR_ENV: &str = "WICKBELL_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "wickbell-out";

/// Output directory: command-line flag, then the `output_dir` key, then
/// the environment, then `wickbell-out`.
pub fn out_dir(flag: Option<PathBuf>, config: &config::Config) -> PathBuf {
    flag.or_else(|| config.path("output_dir"))
        .or_else(|| std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}
