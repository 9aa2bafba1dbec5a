//! Low-rank adaptation at toy scale.

mod adapter;
mod attention;
mod checkpoint;

use thiserror::Error;

pub use adapter::{grad_check, param_count, relative_error, GradCheck, LoraAdapter};
pub use attention::{
    toy_finetune, toy_problem, AdamW, AdapterGrads, AttentionBlock, ToyConfig, ToyProblem, TrainingTrace,
};
pub use checkpoint::{read_adapter, write_adapter};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LoraError {
    #[error("rank must be at least 1, got {rank}")]
    InvalidRank { rank: usize },
    #[error("matrix dimensions must be positive, got {d}×{k}")]
    InvalidShape { d: usize, k: usize },
    #[error("expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },
    #[error("loss became non-finite at step {step}")]
    Diverged { step: usize },
    #[error("checkpoint: {0}")]
    Checkpoint(String),
}
