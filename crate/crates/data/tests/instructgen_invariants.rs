use std::collections::{HashMap, HashSet};

use polymm_core::descriptors::compute_all;
use polymm_core::psmiles::parse;
use polymm_data::dataset::{split, PolymerRecord, Source};
use polymm_data::instructgen::{choose_templates, decompose, render, Sample, SplitTag, TemplateBank};
use polymm_data::{Property, UnitTable};

#[test]
fn every_template_is_used_within_4000_renders() {
    let bank = TemplateBank::builtin();
    let mut prefixes = HashSet::new();
    let mut bodies = HashSet::new();
    for i in 0..4000 {
        let s = Sample {
            canonical_psmiles: format!("*C{}*", "C".repeat(i % 50)),
            property: Property::ALL[i % 5],
            value: i as f64,
            split: SplitTag::Train,
        };
        let (p, b) = choose_templates(&s, &bank, (i / 250) as u64);
        prefixes.insert(p);
        bodies.insert(b);
    }
    assert_eq!((prefixes.len(), bodies.len()), (20, 20));
}

fn table() -> Vec<PolymerRecord> {
    let keys = [
        "*CC*",
        "*CC(*)C",
        "*CCO*",
        "*CC(*)c1ccccc1",
        "*CC(*)Cl",
        "*CCCC*",
        "*CC(*)C#N",
        "*CC(*)OC(C)=O",
        "*CCS*",
        "*Oc1ccc(*)cc1",
    ];
    keys.iter()
        .enumerate()
        .map(|(i, k)| {
            let mut r = PolymerRecord::new(polymm_core::canon::canonicalize(k).unwrap(), Source::Main);
            for (j, p) in Property::ALL.into_iter().enumerate() {
                if (i + j) % 3 != 0 {
                    r = r.with(p, (i * 10 + j) as f64 / 7.0);
                }
            }
            r
        })
        .collect()
}

#[test]
fn sample_counts_are_conserved_and_splits_do_not_leak() {
    let t = table();
    let s = split(&t, 0.9, 5).unwrap();
    let bank = TemplateBank::builtin();
    let units = UnitTable::default();
    let descriptors: HashMap<String, _> =
        t.iter().map(|r| (r.canonical_psmiles.clone(), compute_all(&parse(&r.canonical_psmiles).unwrap()))).collect();
    let mut pairs = Vec::new();
    for (records, tag) in [(&s.train, SplitTag::Train), (&s.test, SplitTag::Test)] {
        let samples = decompose(records, tag);
        assert_eq!(samples.len(), records.iter().map(|r| r.properties.len()).sum::<usize>());
        for sample in &samples {
            pairs.push((
                sample.canonical_psmiles.clone(),
                render(sample, &descriptors[&sample.canonical_psmiles], "x.png", &bank, &units, 9).unwrap(),
            ));
        }
    }
    let test_keys: HashSet<&str> = s.test.iter().map(|r| r.canonical_psmiles.as_str()).collect();
    for (key, pair) in &pairs {
        if pair.split == SplitTag::Train {
            assert!(!test_keys.contains(key.as_str()));
            assert!(!test_keys.iter().any(|k| pair.prompt.contains(&format!(" {k}"))));
        }
    }
}

#[test]
fn answers_follow_the_grammar() {
    let units = UnitTable::default();
    let bank = TemplateBank::builtin();
    for r in table() {
        let d = compute_all(&parse(&r.canonical_psmiles).unwrap());
        for s in decompose(std::slice::from_ref(&r), SplitTag::Train) {
            let pair = render(&s, &d, "", &bank, &units, 0).unwrap();
            let (name, rest) = pair.answer.split_once(':').unwrap();
            let (num, unit) = rest.split_once(' ').unwrap();
            assert_eq!(name, s.property.name());
            assert_eq!(num.split_once('.').unwrap().1.len(), s.property.precision());
            assert!(num.parse::<f64>().is_ok());
            assert_eq!(unit, units.unit(s.property));
            assert_eq!(polymm_data::metrics::parse_answer(&pair.answer, &units).unwrap().0, s.property);
        }
    }
}
