use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{DatasetError, PolymerRecord};

#[derive(Debug, Clone, PartialEq)]
pub struct DataSplit {
    pub seed: u64,
    pub ratio: f64,
    pub train: Vec<PolymerRecord>,
    pub test: Vec<PolymerRecord>,
}

/// Serialized form of a split: the two key lists and how they were drawn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitManifest {
    pub seed: u64,
    pub ratio: f64,
    pub train: Vec<String>,
    pub test: Vec<String>,
}

impl DataSplit {
    pub fn manifest(&self) -> SplitManifest {
        let keys = |v: &[PolymerRecord]| v.iter().map(|r| r.canonical_psmiles.clone()).collect();
        SplitManifest { seed: self.seed, ratio: self.ratio, train: keys(&self.train), test: keys(&self.test) }
    }
}

impl SplitManifest {
    /// Rebuild the split from a table holding every listed key.
    pub fn apply(&self, table: &[PolymerRecord]) -> Result<DataSplit, DatasetError> {
        let index: HashMap<&str, &PolymerRecord> = table.iter().map(|r| (r.canonical_psmiles.as_str(), r)).collect();
        let pick = |keys: &[String]| -> Result<Vec<PolymerRecord>, DatasetError> {
            keys.iter()
                .map(|k| index.get(k.as_str()).map(|r| (*r).clone()).ok_or_else(|| DatasetError::UnknownKey(k.clone())))
                .collect()
        };
        Ok(DataSplit { seed: self.seed, ratio: self.ratio, train: pick(&self.train)?, test: pick(&self.test)? })
    }
}

/// Shuffle by key under `seed` and put the first ⌈ratio·n⌉ records in train.
/// Input order does not matter.
pub fn split(table: &[PolymerRecord], ratio: f64, seed: u64) -> Result<DataSplit, DatasetError> {
    let n = table.len();
    let n_train = (ratio * n as f64).ceil() as usize;
    if !(ratio > 0.0 && ratio < 1.0) || n_train == 0 || n_train >= n {
        return Err(DatasetError::InvalidRatio { ratio, records: n });
    }
    let mut rows: Vec<PolymerRecord> = table.to_vec();
    rows.sort_by(|a, b| a.canonical_psmiles.cmp(&b.canonical_psmiles));
    rows.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let test = rows.split_off(n_train);
    Ok(DataSplit { seed, ratio, train: rows, test })
}
