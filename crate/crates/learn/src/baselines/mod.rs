//! Per-property descriptor regressors: least squares and a small MLP.

mod checkpoint;
mod linreg;
mod mlp;
mod standardize;

use std::collections::{BTreeMap, HashMap};

use nalgebra::{DMatrix, DVector};
use polymm_core::descriptors::DescriptorVector;
use polymm_data::dataset::PolymerRecord;
use polymm_data::metrics::{evaluate, EvalReport, MetricError, PolymerPrediction};
use polymm_data::Property;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use checkpoint::{read_checkpoint, write_checkpoint, CHECKPOINT_VERSION};
pub use linreg::{fit_linreg, LinearFit, MIN_ROWS};
pub use mlp::{fit_mlp, Mlp, MlpConfig, MlpModel};
pub use standardize::Standardizer;

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("{rows} training rows, need at least {needed}")]
    TooFewRows { rows: usize, needed: usize },
    #[error("training diverged at epoch {epoch} with config {config}")]
    Diverged { epoch: usize, config: String },
    #[error("no model for {0}")]
    MissingModel(Property),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Linr,
    Mlp,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Linr => "linr",
            ModelKind::Mlp => "mlp",
        }
    }
}

/// Descriptor rows and targets for one property.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionTask {
    pub property: Property,
    pub keys: Vec<String>,
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
}

/// Rows with a value for `property` and a complete descriptor vector.
pub fn build_task(
    records: &[PolymerRecord],
    descriptors: &HashMap<String, DescriptorVector>,
    property: Property,
) -> RegressionTask {
    let mut keys = Vec::new();
    let mut rows: Vec<f64> = Vec::new();
    let mut y = Vec::new();
    for r in records {
        let (Some(v), Some(d)) = (r.get(property), descriptors.get(&r.canonical_psmiles)) else {
            continue;
        };
        if !d.is_complete() {
            continue;
        }
        keys.push(r.canonical_psmiles.clone());
        rows.extend(d.values().iter().map(|x| x.expect("complete vector")));
        y.push(v);
    }
    let n = y.len();
    RegressionTask { property, keys, x: DMatrix::from_row_slice(n, 17, &rows), y: DVector::from_vec(y) }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Regressor {
    Linear(LinearFit),
    Mlp(MlpModel),
}

/// A regressor together with the standardizer fitted on its training rows.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineModel {
    pub property: Property,
    pub standardizer: Standardizer,
    pub regressor: Regressor,
    pub train_rows: usize,
}

impl BaselineModel {
    pub fn kind(&self) -> ModelKind {
        match self.regressor {
            Regressor::Linear(_) => ModelKind::Linr,
            Regressor::Mlp(_) => ModelKind::Mlp,
        }
    }

    /// Intercept and coefficients of a linear model in raw descriptor units.
    pub fn raw_linear(&self) -> Option<(f64, Vec<f64>)> {
        let Regressor::Linear(f) = &self.regressor else {
            return None;
        };
        let s = &self.standardizer;
        let coef: Vec<f64> = f.coefficients.iter().zip(&s.scale).map(|(c, sc)| c / sc).collect();
        let shift: f64 = coef.iter().zip(&s.mean).map(|(c, m)| c * m).sum();
        Some((f.intercept - shift, coef))
    }

    pub fn predict(&self, raw: &[f64]) -> f64 {
        let z = self.standardizer.transform_row(raw);
        match &self.regressor {
            Regressor::Linear(f) => f.predict_row(&z),
            Regressor::Mlp(m) => m.predict_row(&z),
        }
    }
}

pub fn train(task: &RegressionTask, kind: ModelKind, mlp: &MlpConfig) -> Result<BaselineModel, BaselineError> {
    let standardizer = Standardizer::fit(&task.x);
    let z = standardizer.transform(&task.x);
    let regressor = match kind {
        ModelKind::Linr => Regressor::Linear(fit_linreg(&z, &task.y)?),
        ModelKind::Mlp => {
            let rows: Vec<Vec<f64>> = z.row_iter().map(|r| r.iter().copied().collect()).collect();
            Regressor::Mlp(fit_mlp(&rows, task.y.as_slice(), mlp)?)
        }
    };
    Ok(BaselineModel { property: task.property, standardizer, regressor, train_rows: task.y.len() })
}

/// One independent model per property that has training rows.
pub fn train_group(
    train_records: &[PolymerRecord],
    descriptors: &HashMap<String, DescriptorVector>,
    kind: ModelKind,
    mlp: &MlpConfig,
) -> Result<BTreeMap<Property, BaselineModel>, BaselineError> {
    let mut models = BTreeMap::new();
    for p in Property::ALL {
        let task = build_task(train_records, descriptors, p);
        if task.y.is_empty() {
            continue;
        }
        models.insert(p, train(&task, kind, mlp)?);
    }
    Ok(models)
}

/// Anything that predicts a property from a polymer key and its raw
/// descriptor row.
pub trait Predictor {
    fn predict(&self, property: Property, key: &str, raw: &[f64]) -> Option<f64>;
}

impl Predictor for BTreeMap<Property, BaselineModel> {
    fn predict(&self, property: Property, _key: &str, raw: &[f64]) -> Option<f64> {
        self.get(&property).map(|m| m.predict(raw))
    }
}

/// One scored prediction, as written to predictions files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRow {
    pub key: String,
    pub property: Property,
    pub value: f64,
}

/// Predictions and report for the test records. Records whose descriptors
/// are incomplete are left out and counted.
pub fn evaluate_group(
    test_records: &[PolymerRecord],
    descriptors: &HashMap<String, DescriptorVector>,
    predictor: &dyn Predictor,
) -> Result<(EvalReport, Vec<PredictionRow>, usize), BaselineError> {
    let mut rows = Vec::new();
    let mut predictions = Vec::new();
    let mut skipped = 0;
    for r in test_records {
        let Some(raw) = descriptors.get(&r.canonical_psmiles).filter(|d| d.is_complete()) else {
            skipped += 1;
            continue;
        };
        let raw: Vec<f64> = raw.values().iter().map(|v| v.expect("complete vector")).collect();
        let mut row = PolymerPrediction { key: r.canonical_psmiles.clone(), ..Default::default() };
        for (&p, &t) in &r.properties {
            let y = predictor.predict(p, &r.canonical_psmiles, &raw).ok_or(BaselineError::MissingModel(p))?;
            row.truths.insert(p, t);
            row.preds.insert(p, y);
            predictions.push(PredictionRow { key: r.canonical_psmiles.clone(), property: p, value: y });
        }
        rows.push(row);
    }
    Ok((evaluate(&rows)?, predictions, skipped))
}
