use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::PolymerRecord;
use crate::property::Property;

/// Absolute tolerance for treating two property values as equal.
pub const VALUE_TOLERANCE: f64 = 1e-9;

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= VALUE_TOLERANCE
}

/// A key that arrived with a second, different value for one property.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyConflict {
    pub key: String,
    pub property: Property,
    pub kept: f64,
    pub rejected: f64,
}

fn covered_by(incoming: &PolymerRecord, base: &PolymerRecord) -> bool {
    incoming.properties.iter().all(|(p, &v)| base.get(*p).is_some_and(|b| same(b, v)))
}

/// Drop incoming records that repeat a base record: same key and every
/// incoming value already present in that base record.
pub fn dedup_against(base: &[PolymerRecord], incoming: &[PolymerRecord]) -> Vec<PolymerRecord> {
    let mut by_key: HashMap<&str, Vec<&PolymerRecord>> = HashMap::new();
    for b in base {
        by_key.entry(b.canonical_psmiles.as_str()).or_default().push(b);
    }
    incoming
        .iter()
        .filter(|r| !by_key.get(r.canonical_psmiles.as_str()).is_some_and(|bs| bs.iter().any(|b| covered_by(r, b))))
        .cloned()
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MergeOutcome {
    /// One record per key, in first-seen order.
    pub table: Vec<PolymerRecord>,
    pub conflicts: Vec<PropertyConflict>,
    /// Records removed by deduplication, per supplement.
    pub duplicates_removed: Vec<usize>,
}

struct Accumulator {
    table: Vec<PolymerRecord>,
    index: HashMap<String, usize>,
    conflicts: Vec<PropertyConflict>,
}

impl Accumulator {
    fn add(&mut self, r: PolymerRecord) {
        let Some(&i) = self.index.get(&r.canonical_psmiles) else {
            self.index.insert(r.canonical_psmiles.clone(), self.table.len());
            self.table.push(r);
            return;
        };
        let existing = &mut self.table[i];
        for (p, v) in r.properties {
            match existing.properties.get(&p) {
                None => {
                    existing.properties.insert(p, v);
                }
                Some(&kept) if !same(kept, v) => self.conflicts.push(PropertyConflict {
                    key: r.canonical_psmiles.clone(),
                    property: p,
                    kept,
                    rejected: v,
                }),
                Some(_) => {}
            }
        }
    }
}

/// Fold `main` into a keyed table, then each supplement in order after
/// deduplicating it against the table built so far. Same-key records are
/// unioned; on a value clash the first value is kept and the clash reported.
pub fn merge_sequential(main: Vec<PolymerRecord>, supplements: &[Vec<PolymerRecord>]) -> MergeOutcome {
    let mut acc = Accumulator { table: Vec::new(), index: HashMap::new(), conflicts: Vec::new() };
    for r in main {
        acc.add(r);
    }
    let mut duplicates_removed = Vec::with_capacity(supplements.len());
    for supp in supplements {
        let kept = dedup_against(&acc.table, supp);
        duplicates_removed.push(supp.len() - kept.len());
        for r in kept {
            acc.add(r);
        }
    }
    MergeOutcome { table: acc.table, conflicts: acc.conflicts, duplicates_removed }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Source;

    fn rec(key: &str, props: &[(Property, f64)]) -> PolymerRecord {
        props.iter().fold(PolymerRecord::new(key, Source::Supp3), |r, &(p, v)| r.with(p, v))
    }

    #[test]
    fn identical_record_removed() {
        let base = vec![rec("*CC*", &[(Property::Tg, 100.0)])];
        assert!(dedup_against(&base, &base).is_empty());
    }

    #[test]
    fn different_value_retained() {
        let base = vec![rec("*CC*", &[(Property::Tg, 100.0)])];
        let inc = vec![rec("*CC*", &[(Property::Tg, 101.0)])];
        assert_eq!(dedup_against(&base, &inc), inc);
    }

    #[test]
    fn tolerance_is_absolute_1e9() {
        let base = vec![rec("*CC*", &[(Property::Tg, 100.0)])];
        assert!(dedup_against(&base, &[rec("*CC*", &[(Property::Tg, 100.0 + 5e-10)])]).is_empty());
        assert_eq!(dedup_against(&base, &[rec("*CC*", &[(Property::Tg, 100.0 + 5e-9)])]).len(), 1);
    }

    #[test]
    fn new_property_is_not_a_duplicate() {
        let base = vec![rec("*CC*", &[(Property::Ffv, 0.3)])];
        let inc = vec![rec("*CC*", &[(Property::Tc, 0.2)])];
        assert_eq!(dedup_against(&base, &inc).len(), 1);
    }

    #[test]
    fn empty_supplements_leave_main() {
        let main = vec![rec("*CC*", &[(Property::Tg, 1.0)]), rec("*CCO*", &[(Property::Tg, 2.0)])];
        let out = merge_sequential(main.clone(), &[vec![], vec![]]);
        assert_eq!(out.table, main);
        assert!(out.conflicts.is_empty());
    }

    #[test]
    fn supplements_union_into_one_record() {
        let main = vec![rec("*CCO*", &[(Property::Tg, 1.0)])];
        let s1 = vec![rec("*CC*", &[(Property::Tc, 0.2)])];
        let s4 = vec![rec("*CC*", &[(Property::Ffv, 0.35)])];
        let out = merge_sequential(main, &[s1, s4]);
        assert_eq!(out.table.len(), 2);
        assert_eq!(out.table[1].get(Property::Tc), Some(0.2));
        assert_eq!(out.table[1].get(Property::Ffv), Some(0.35));
    }

    #[test]
    fn conflict_keeps_first_value() {
        let main = vec![rec("*CC*", &[(Property::Tg, 1.0)])];
        let out = merge_sequential(main, &[vec![rec("*CC*", &[(Property::Tg, 2.0), (Property::Rg, 5.0)])]]);
        assert_eq!(out.table[0].get(Property::Tg), Some(1.0));
        assert_eq!(out.table[0].get(Property::Rg), Some(5.0));
        assert_eq!(
            out.conflicts,
            vec![PropertyConflict { key: "*CC*".into(), property: Property::Tg, kept: 1.0, rejected: 2.0 }]
        );
    }
}
