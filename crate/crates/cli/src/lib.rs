//! Library half of the `lhp` binary: argument handling, experiment dispatch and
//! SVG rendering.

pub mod commands;
pub mod config;
pub mod render;

pub use commands::run;
pub use config::{parse_config, Command, ExperimentConfig};
pub use render::{disk_scene, render_disk, scene_svg, DiskScene};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Clap(#[from] clap::Error),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] lhp_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 for numerical failures, 0 for `--help`/`--version`, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Clap(e) if !e.use_stderr() => 0,
            CliError::Core(e) if e.is_numerical() => 2,
            _ => 1,
        }
    }
}
