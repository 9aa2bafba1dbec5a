//! Per-property regression baselines and a low-rank adaptation demo.

pub mod baselines;
pub mod lora;
