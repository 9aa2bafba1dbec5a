//! Binary model files: magic, version, a JSON header with the shape and
//! config, then every float as little-endian f64.

use serde::{Deserialize, Serialize};

use super::{BaselineError, BaselineModel, LinearFit, Mlp, MlpConfig, MlpModel, Regressor, Standardizer};
use polymm_data::Property;

const MAGIC: &[u8; 4] = b"PMMB";
pub const CHECKPOINT_VERSION: u16 = 1;

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum Header {
    Linr {
        property: Property,
        features: usize,
        train_rows: usize,
        rank: usize,
        rank_deficient: bool,
    },
    Mlp {
        property: Property,
        features: usize,
        train_rows: usize,
        sizes: Vec<usize>,
        config: MlpConfig,
        epochs_run: usize,
    },
}

pub fn write_checkpoint(model: &BaselineModel) -> Vec<u8> {
    let features = model.standardizer.mean.len();
    let mut floats: Vec<f64> = model.standardizer.mean.clone();
    floats.extend(&model.standardizer.scale);
    let header = match &model.regressor {
        Regressor::Linear(f) => {
            floats.push(f.intercept);
            floats.extend(&f.coefficients);
            Header::Linr {
                property: model.property,
                features,
                train_rows: model.train_rows,
                rank: f.rank,
                rank_deficient: f.rank_deficient,
            }
        }
        Regressor::Mlp(m) => {
            floats.push(m.y_mean);
            floats.push(m.y_scale);
            floats.extend(&m.net.params);
            floats.extend(&m.epoch_losses);
            Header::Mlp {
                property: model.property,
                features,
                train_rows: model.train_rows,
                sizes: m.net.sizes.clone(),
                config: m.config.clone(),
                epochs_run: m.epoch_losses.len(),
            }
        }
    };
    let json = serde_json::to_vec(&header).expect("header serializes");
    let mut out = Vec::with_capacity(16 + json.len() + 8 * floats.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
    out.extend_from_slice(&(json.len() as u32).to_le_bytes());
    out.extend_from_slice(&json);
    out.extend_from_slice(&(floats.len() as u64).to_le_bytes());
    for f in floats {
        out.extend_from_slice(&f.to_le_bytes());
    }
    out
}

struct Cursor<'a>(&'a [u8]);

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], BaselineError> {
        if self.0.len() < n {
            return Err(BaselineError::Checkpoint("truncated".into()));
        }
        let (head, tail) = self.0.split_at(n);
        self.0 = tail;
        Ok(head)
    }
}

pub fn read_checkpoint(bytes: &[u8]) -> Result<BaselineModel, BaselineError> {
    let bad = |m: &str| BaselineError::Checkpoint(m.to_string());
    let mut c = Cursor(bytes);
    if c.take(4)? != MAGIC {
        return Err(bad("not a model checkpoint"));
    }
    let version = u16::from_le_bytes(c.take(2)?.try_into().expect("2 bytes"));
    if version != CHECKPOINT_VERSION {
        return Err(BaselineError::Checkpoint(format!("unsupported version {version}")));
    }
    let len = u32::from_le_bytes(c.take(4)?.try_into().expect("4 bytes")) as usize;
    let header: Header = serde_json::from_slice(c.take(len)?).map_err(|e| BaselineError::Checkpoint(e.to_string()))?;
    let count = u64::from_le_bytes(c.take(8)?.try_into().expect("8 bytes")) as usize;
    let floats: Vec<f64> = (0..count)
        .map(|_| c.take(8).map(|b| f64::from_le_bytes(b.try_into().expect("8 bytes"))))
        .collect::<Result<_, _>>()?;
    if !c.0.is_empty() {
        return Err(bad("trailing bytes"));
    }
    let mut rest = floats.as_slice();
    let mut next = |n: usize| -> Result<Vec<f64>, BaselineError> {
        if rest.len() < n {
            return Err(bad("parameter block too short"));
        }
        let (a, b) = rest.split_at(n);
        rest = b;
        Ok(a.to_vec())
    };
    let model = match header {
        Header::Linr { property, features, train_rows, rank, rank_deficient } => {
            let standardizer = Standardizer { mean: next(features)?, scale: next(features)? };
            let intercept = next(1)?[0];
            let coefficients = next(features)?;
            BaselineModel {
                property,
                standardizer,
                regressor: Regressor::Linear(LinearFit { intercept, coefficients, rank, rank_deficient }),
                train_rows,
            }
        }
        Header::Mlp { property, features, train_rows, sizes, config, epochs_run } => {
            let standardizer = Standardizer { mean: next(features)?, scale: next(features)? };
            let y = next(2)?;
            let params = next(Mlp::param_count(&sizes))?;
            let epoch_losses = next(epochs_run)?;
            BaselineModel {
                property,
                standardizer,
                regressor: Regressor::Mlp(MlpModel {
                    config,
                    net: Mlp { sizes, params },
                    y_mean: y[0],
                    y_scale: y[1],
                    epoch_losses,
                }),
                train_rows,
            }
        }
    };
    if !rest.is_empty() {
        return Err(bad("parameter block too long"));
    }
    Ok(model)
}
