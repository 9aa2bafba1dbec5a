//! Polymer property tables, instruction-tuning pairs and evaluation metrics.

pub mod dataset;
pub mod instructgen;
pub mod metrics;
pub mod property;

pub use property::{Property, UnitTable};
