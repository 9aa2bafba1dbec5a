//! MAE, MAPE, weighted MAE over sparse multi-property predictions, and
//! answer-string parsing.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::property::{Property, UnitTable};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("no values to score")]
    EmptyInput,
    #[error("{preds} predictions for {truths} truths")]
    LengthMismatch { preds: usize, truths: usize },
    #[error("ground truth at index {0} is zero")]
    ZeroGroundTruth(usize),
    #[error("{0} has a zero test range")]
    DegenerateRange(Property),
    #[error("{key} has a {property} truth but no prediction")]
    MissingPrediction { key: String, property: Property },
    #[error("no polymer has an evaluable property")]
    NothingToScore,
    #[error("no <property>:<value> in {0:?}")]
    Unparseable(String),
    #[error("unknown property {0:?}")]
    UnknownProperty(String),
    #[error("unit {unit:?} does not match {property}")]
    UnitMismatch { property: Property, unit: String },
}

fn check_pairs(preds: &[f64], truths: &[f64]) -> Result<(), MetricError> {
    if preds.len() != truths.len() {
        return Err(MetricError::LengthMismatch { preds: preds.len(), truths: truths.len() });
    }
    if preds.is_empty() {
        return Err(MetricError::EmptyInput);
    }
    Ok(())
}

pub fn mae(preds: &[f64], truths: &[f64]) -> Result<f64, MetricError> {
    check_pairs(preds, truths)?;
    let sum: f64 = preds.iter().zip(truths).map(|(p, t)| (p - t).abs()).sum();
    Ok(sum / preds.len() as f64)
}

/// Mean absolute percentage error, in percent.
pub fn mape(preds: &[f64], truths: &[f64]) -> Result<f64, MetricError> {
    check_pairs(preds, truths)?;
    if let Some(i) = truths.iter().position(|&t| t == 0.0) {
        return Err(MetricError::ZeroGroundTruth(i));
    }
    let sum: f64 = preds.iter().zip(truths).map(|(p, t)| ((p - t) / t).abs()).sum();
    Ok(100.0 * sum / preds.len() as f64)
}

/// Truths and predictions for one polymer. Predictions without a truth are
/// ignored.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PolymerPrediction {
    pub key: String,
    pub truths: BTreeMap<Property, f64>,
    pub preds: BTreeMap<Property, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Wmae {
    pub wmae: f64,
    pub weights: BTreeMap<Property, f64>,
    pub ranges: BTreeMap<Property, f64>,
    pub counts: BTreeMap<Property, usize>,
    /// Polymers in the outer average.
    pub polymers: usize,
    /// Polymers dropped for having no truth at all.
    pub excluded: usize,
}

fn collect_truths(rows: &[PolymerPrediction]) -> Result<BTreeMap<Property, Vec<(f64, f64)>>, MetricError> {
    let mut by_prop: BTreeMap<Property, Vec<(f64, f64)>> = BTreeMap::new();
    for row in rows {
        for (&p, &t) in &row.truths {
            let &pred = row
                .preds
                .get(&p)
                .ok_or_else(|| MetricError::MissingPrediction { key: row.key.clone(), property: p })?;
            by_prop.entry(p).or_default().push((pred, t));
        }
    }
    Ok(by_prop)
}

/// w_k = (1/r_k)·K·√(1/n_k) / Σ_j √(1/n_j) for the K properties in `counts`.
pub fn property_weights(
    counts: &BTreeMap<Property, usize>,
    ranges: &BTreeMap<Property, f64>,
) -> BTreeMap<Property, f64> {
    let k = counts.len() as f64;
    let norm: f64 = counts.values().map(|&n| (1.0 / n as f64).sqrt()).sum();
    counts.iter().map(|(&p, &n)| (p, (1.0 / ranges[&p]) * (k * (1.0 / n as f64).sqrt() / norm))).collect()
}

/// w_k = (1/r_k)·K·√(1/n_k) / Σ_j √(1/n_j), with r_k the test-truth range;
/// wMAE = (1/n) Σ_i Σ_{k∈I_i} w_k |ŷ − y| over the n polymers with a truth.
pub fn wmae(rows: &[PolymerPrediction]) -> Result<Wmae, MetricError> {
    let by_prop = collect_truths(rows)?;
    if by_prop.is_empty() {
        return Err(MetricError::NothingToScore);
    }
    let mut ranges = BTreeMap::new();
    let mut counts = BTreeMap::new();
    for (&p, pairs) in &by_prop {
        let lo = pairs.iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
        let hi = pairs.iter().map(|x| x.1).fold(f64::NEG_INFINITY, f64::max);
        if hi - lo <= 0.0 {
            return Err(MetricError::DegenerateRange(p));
        }
        ranges.insert(p, hi - lo);
        counts.insert(p, pairs.len());
    }
    let weights = property_weights(&counts, &ranges);

    let scored: Vec<&PolymerPrediction> = rows.iter().filter(|r| !r.truths.is_empty()).collect();
    let total: f64 =
        scored.iter().map(|r| r.truths.iter().map(|(p, t)| weights[p] * (r.preds[p] - t).abs()).sum::<f64>()).sum();
    Ok(Wmae {
        wmae: total / scored.len() as f64,
        weights,
        ranges,
        counts,
        polymers: scored.len(),
        excluded: rows.len() - scored.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyScore {
    pub mae: f64,
    /// Absent when a truth is exactly zero.
    pub mape: Option<f64>,
    pub n: usize,
}

/// Per-property MAE/MAPE plus the overall wMAE.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub per_property: BTreeMap<Property, PropertyScore>,
    #[serde(flatten)]
    pub overall: Wmae,
}

pub fn evaluate(rows: &[PolymerPrediction]) -> Result<EvalReport, MetricError> {
    let overall = wmae(rows)?;
    let mut per_property = BTreeMap::new();
    for (p, pairs) in collect_truths(rows)? {
        let (preds, truths): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let score = PropertyScore { mae: mae(&preds, &truths)?, mape: mape(&preds, &truths).ok(), n: preds.len() };
        per_property.insert(p, score);
    }
    Ok(EvalReport { per_property, overall })
}

/// Length of the longest decimal literal at the start of `s`.
fn decimal_prefix(s: &str) -> usize {
    let b = s.as_bytes();
    let mut i = 0;
    if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
        i += 1;
    }
    let int_start = i;
    while i < b.len() && b[i].is_ascii_digit() {
        i += 1;
    }
    let mut digits = i - int_start;
    if i < b.len() && b[i] == b'.' {
        let frac_start = i + 1;
        let mut j = frac_start;
        while j < b.len() && b[j].is_ascii_digit() {
            j += 1;
        }
        if digits + (j - frac_start) > 0 {
            digits += j - frac_start;
            i = j;
        }
    }
    if digits == 0 {
        return 0;
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        let mut j = i + 1;
        if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
            j += 1;
        }
        let exp_start = j;
        while j < b.len() && b[j].is_ascii_digit() {
            j += 1;
        }
        if j > exp_start {
            i = j;
        }
    }
    i
}

/// First `<name>:<decimal>` whose name is a known property. A unit after the
/// number, if any, must match the unit table.
pub fn parse_answer(text: &str, units: &UnitTable) -> Result<(Property, f64), MetricError> {
    let mut first_unknown = None;
    for (colon, _) in text.match_indices(':') {
        let head = text[..colon].trim_end();
        let name_start =
            head.char_indices().rev().take_while(|(_, c)| c.is_alphanumeric() || *c == '_').last().map(|(i, _)| i);
        let Some(name_start) = name_start else { continue };
        let name = &head[name_start..];
        let tail = text[colon + 1..].trim_start();
        let len = decimal_prefix(tail);
        if len == 0 {
            continue;
        }
        let Ok(value) = tail[..len].parse::<f64>() else { continue };
        let Some(property) = Property::from_name(name) else {
            first_unknown.get_or_insert_with(|| name.to_string());
            continue;
        };
        let rest = &tail[len..];
        let unit = rest
            .trim_start_matches([' ', '\t'])
            .split(char::is_whitespace)
            .next()
            .unwrap_or("")
            .trim_end_matches(['.', ',', ';']);
        if !unit.is_empty() && !units.unit_matches(property, unit) {
            return Err(MetricError::UnitMismatch { property, unit: unit.to_string() });
        }
        return Ok((property, value));
    }
    Err(match first_unknown {
        Some(name) => MetricError::UnknownProperty(name),
        None => MetricError::Unparseable(text.to_string()),
    })
}
