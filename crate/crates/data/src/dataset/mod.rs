//! Property tables: ingestion, deduplication, merging, statistics and splits.

mod ingest;
mod merge;
mod split;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::property::Property;

pub use ingest::{ingest_csv, ingest_reader, read_table, write_rejects, write_table, CsvSchema, Ingested, RowError};
pub use merge::{dedup_against, merge_sequential, MergeOutcome, PropertyConflict, VALUE_TOLERANCE};
pub use split::{split, DataSplit, SplitManifest};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Main,
    Supp1,
    Supp3,
    Supp4,
    External,
}

impl Source {
    pub fn name(self) -> &'static str {
        match self {
            Source::Main => "main",
            Source::Supp1 => "supp1",
            Source::Supp3 => "supp3",
            Source::Supp4 => "supp4",
            Source::External => "external",
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Source {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [Source::Main, Source::Supp1, Source::Supp3, Source::Supp4, Source::External]
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown source tag {s:?}"))
    }
}

/// One polymer with its known property values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolymerRecord {
    pub canonical_psmiles: String,
    pub properties: BTreeMap<Property, f64>,
    pub source: Source,
}

impl PolymerRecord {
    pub fn new(canonical_psmiles: impl Into<String>, source: Source) -> Self {
        PolymerRecord { canonical_psmiles: canonical_psmiles.into(), properties: BTreeMap::new(), source }
    }

    pub fn with(mut self, p: Property, v: f64) -> Self {
        self.properties.insert(p, v);
        self
    }

    pub fn get(&self, p: Property) -> Option<f64> {
        self.properties.get(&p).copied()
    }
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{path}: missing columns {missing:?}")]
    SchemaMismatch { path: String, missing: Vec<String> },
    #[error("{path}: {message}")]
    Csv { path: String, message: String },
    #[error("split ratio {ratio} leaves an empty side for {records} records")]
    InvalidRatio { ratio: f64, records: usize },
    #[error("split manifest names {0:?}, which is not in the table")]
    UnknownKey(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MissingCount {
    pub missing: usize,
    /// Fraction of records, in [0, 1].
    pub ratio: f64,
}

impl MissingCount {
    pub fn percent(&self) -> f64 {
        self.ratio * 100.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissingStats {
    pub records: usize,
    pub properties: BTreeMap<Property, MissingCount>,
}

pub fn missing_stats(table: &[PolymerRecord]) -> MissingStats {
    let n = table.len();
    let properties = Property::ALL
        .into_iter()
        .map(|p| {
            let missing = table.iter().filter(|r| r.get(p).is_none()).count();
            let ratio = if n == 0 { 0.0 } else { missing as f64 / n as f64 };
            (p, MissingCount { missing, ratio })
        })
        .collect();
    MissingStats { records: n, properties }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_table_has_no_missing_values() {
        let mut r = PolymerRecord::new("*CC*", Source::Main);
        for p in Property::ALL {
            r = r.with(p, 1.0);
        }
        let s = missing_stats(&[r.clone(), r]);
        assert!(s.properties.values().all(|m| m.missing == 0 && m.ratio == 0.0));
    }

    #[test]
    fn single_record_missing_tg() {
        let r = PolymerRecord::new("*CC*", Source::Main)
            .with(Property::Ffv, 0.3)
            .with(Property::Tc, 0.2)
            .with(Property::Density, 1.0)
            .with(Property::Rg, 10.0);
        let s = missing_stats(&[r]);
        assert_eq!(s.properties[&Property::Tg], MissingCount { missing: 1, ratio: 1.0 });
        for p in &Property::ALL[1..] {
            assert_eq!(s.properties[p], MissingCount { missing: 0, ratio: 0.0 });
        }
    }

    #[test]
    fn source_tags_parse() {
        for s in ["main", "supp1", "supp3", "supp4", "external"] {
            assert_eq!(s.parse::<Source>().unwrap().name(), s);
        }
        assert!("supp2".parse::<Source>().is_err());
    }
}
