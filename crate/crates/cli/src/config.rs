//! Pipeline configuration, read from a TOML file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use polymm_core::depict::StyleOverrides;
use polymm_data::dataset::{CsvSchema, Source};
use polymm_data::{Property, UnitTable};
use polymm_learn::baselines::{MlpConfig, ModelKind};
use polymm_learn::lora::ToyConfig;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// One input CSV and how to read it. Sources are merged in the order listed;
/// the first one is the main table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceConfig {
    /// Relative paths are resolved against the config file's directory.
    pub path: String,
    pub source: Source,
    #[serde(default = "default_smiles_column")]
    pub smiles_column: String,
    /// CSV column name to property.
    pub columns: BTreeMap<String, Property>,
}

fn default_smiles_column() -> String {
    "SMILES".into()
}

impl SourceConfig {
    pub fn schema(&self) -> CsvSchema {
        CsvSchema { smiles_column: self.smiles_column.clone(), columns: self.columns.clone(), source: self.source }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub output_dir: PathBuf,
    pub seed: u64,
    pub split_ratio: f64,
    pub img_size: u32,
    /// Also write PNG rasters next to the SVGs.
    pub png: bool,
    /// Template bank file; the built-in bank when unset.
    pub templates: Option<String>,
    /// Unit overrides on top of the default unit table.
    pub units: BTreeMap<Property, String>,
    pub models: Vec<ModelKind>,
    pub sources: Vec<SourceConfig>,
    pub mlp: MlpConfig,
    pub lora: ToyConfig,
    pub style: StyleOverrides,
    /// Directory that relative paths are resolved against. Not serialized.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            output_dir: PathBuf::from("polymm-out"),
            seed: 0,
            split_ratio: 0.9,
            img_size: polymm_core::depict::DEFAULT_IMAGE_SIZE,
            png: true,
            templates: None,
            units: BTreeMap::new(),
            models: vec![ModelKind::Linr, ModelKind::Mlp],
            sources: Vec::new(),
            mlp: MlpConfig::default(),
            lora: ToyConfig::default(),
            style: StyleOverrides::default(),
            base_dir: PathBuf::from("."),
        }
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<PipelineConfig, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = PipelineConfig::parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        cfg.base_dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new(".")).to_path_buf();
        if cfg.output_dir.is_relative() {
            cfg.output_dir = cfg.base_dir.join(&cfg.output_dir);
        }
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<PipelineConfig, String> {
        let cfg: PipelineConfig = toml::from_str(text).map_err(|e| e.to_string())?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.split_ratio > 0.0 && self.split_ratio < 1.0) {
            return Err(format!("split_ratio must lie in (0, 1), got {}", self.split_ratio));
        }
        if self.img_size == 0 {
            return Err("img_size must be positive".into());
        }
        for s in &self.sources {
            if s.columns.is_empty() {
                return Err(format!("source {}: no property columns", s.path));
            }
        }
        Ok(())
    }

    pub fn resolve(&self, path: &str) -> PathBuf {
        let p = Path::new(path);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn units(&self) -> UnitTable {
        let mut table = UnitTable::default();
        for (p, u) in &self.units {
            table.0.insert(*p, u.clone());
        }
        table
    }
}
