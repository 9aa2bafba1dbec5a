//! Pipeline orchestration behind the `polymm` binary.

pub mod config;
pub mod manifest;
pub mod stages;

use std::fmt::Display;
use std::path::Path;

use polymm_data::dataset::DatasetError;
use polymm_data::instructgen::{BankError, InstructError};
use polymm_data::metrics::MetricError;
use polymm_learn::baselines::BaselineError;
use polymm_learn::lora::LoraError;
use thiserror::Error;

pub use config::{PipelineConfig, SourceConfig};
pub use stages::{Pipeline, StageReport, StageStatus};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("stage {stage}: missing input {path}")]
    StageInputMissing { stage: String, path: String },
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Bank(#[from] BankError),
    #[error(transparent)]
    Instruct(#[from] InstructError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
    #[error(transparent)]
    Lora(#[from] LoraError),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

impl CliError {
    pub fn io(path: &Path, e: impl Display) -> CliError {
        CliError::Io(format!("{}: {e}", path.display()))
    }
}
