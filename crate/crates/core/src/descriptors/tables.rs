//! Versioned parameter tables shipped as data files.

use sha2::{Digest, Sha256};

use crate::elements;

const CRIPPEN: &str = include_str!("../../data/crippen.txt");
const TPSA: &str = include_str!("../../data/tpsa.tsv");
const HALL_KIER: &str = include_str!("../../data/hall_kier.tsv");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParameterTable {
    pub name: &'static str,
    pub version: &'static str,
    pub text: &'static str,
}

impl ParameterTable {
    pub fn sha256(&self) -> String {
        hex::encode(Sha256::digest(self.text.as_bytes()))
    }
}

pub fn parameter_tables() -> [ParameterTable; 4] {
    [
        ParameterTable { name: "elements", version: "1", text: elements::source_text() },
        ParameterTable { name: "crippen", version: "1", text: CRIPPEN },
        ParameterTable { name: "tpsa", version: "1", text: TPSA },
        ParameterTable { name: "hall_kier", version: "1", text: HALL_KIER },
    ]
}

pub(super) fn crippen_text() -> &'static str {
    CRIPPEN
}

pub(super) fn tpsa_text() -> &'static str {
    TPSA
}

pub(super) fn hall_kier_text() -> &'static str {
    HALL_KIER
}

/// Non-comment, non-blank lines split on tabs.
pub(super) fn rows(text: &str) -> impl Iterator<Item = Vec<&str>> {
    text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#')).map(|l| l.split('\t').collect())
}
