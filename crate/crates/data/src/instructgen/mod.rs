//! Per-property instruction-tuning pairs.

mod bank;

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use polymm_core::descriptors::{Descriptor, DescriptorVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use bank::{BankError, TemplateBank, BODY_COUNT, PLACEHOLDERS, PREFIX_COUNT};

use crate::dataset::PolymerRecord;
use crate::property::{Property, UnitTable};

/// Text substituted for `{image}`; the file itself travels in the `image` field.
pub const IMAGE_TOKEN: &str = "<image>";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitTag {
    Train,
    Test,
}

/// One (polymer, property) target.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub canonical_psmiles: String,
    pub property: Property,
    pub value: f64,
    pub split: SplitTag,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstructionPair {
    pub prompt: String,
    pub image: String,
    pub answer: String,
    pub property: Property,
    pub split: SplitTag,
}

#[derive(Debug, Error)]
pub enum InstructError {
    #[error("{key}: descriptor {descriptor} unavailable")]
    MissingDescriptor { key: String, descriptor: &'static str },
    #[error("io: {0}")]
    Io(String),
    #[error("line {line}: {message}")]
    Json { line: usize, message: String },
}

/// One sample per available property of each record, in record then
/// property order.
pub fn decompose(records: &[PolymerRecord], split: SplitTag) -> Vec<Sample> {
    records
        .iter()
        .flat_map(|r| {
            r.properties.iter().map(move |(&property, &value)| Sample {
                canonical_psmiles: r.canonical_psmiles.clone(),
                property,
                value,
                split,
            })
        })
        .collect()
}

/// `name:value` items joined by ", "; counts as integers, others at 4
/// decimals.
pub fn descriptor_text(key: &str, descriptors: &DescriptorVector) -> Result<String, InstructError> {
    let mut items = Vec::with_capacity(Descriptor::ALL.len());
    for d in Descriptor::ALL {
        let v = descriptors
            .get(d)
            .ok_or(InstructError::MissingDescriptor { key: key.to_string(), descriptor: d.name() })?;
        items.push(if d.is_count() {
            format!("{}:{}", d.name(), v.round() as i64)
        } else {
            format!("{}:{v:.4}", d.name())
        });
    }
    Ok(items.join(", "))
}

/// Seed for one sample, from sha256 of the key, the property and the global
/// seed.
pub fn sample_seed(key: &str, property: Property, global_seed: u64) -> u64 {
    let mut h = Sha256::new();
    h.update(key.as_bytes());
    h.update([0]);
    h.update(property.name().as_bytes());
    h.update([0]);
    h.update(global_seed.to_le_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("sha256 is 32 bytes"))
}

fn fill(template: &str, values: &[(&str, &str)]) -> String {
    let mut out = String::with_capacity(template.len() + 512);
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let after = &rest[open + 1..];
        let close = after.find('}');
        match close.and_then(|c| values.iter().find(|(k, _)| *k == &after[..c]).map(|(_, v)| (c, v))) {
            Some((c, v)) => {
                out.push_str(v);
                rest = &after[c + 1..];
            }
            None => {
                out.push('{');
                rest = after;
            }
        }
    }
    out.push_str(rest);
    out
}

/// Indices of the prefix and body drawn for a sample.
pub fn choose_templates(sample: &Sample, bank: &TemplateBank, global_seed: u64) -> (usize, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(sample_seed(&sample.canonical_psmiles, sample.property, global_seed));
    let p = rng.random_range(0..bank.prefixes.len());
    let b = rng.random_range(0..bank.bodies.len());
    (p, b)
}

pub fn render(
    sample: &Sample,
    descriptors: &DescriptorVector,
    image: &str,
    bank: &TemplateBank,
    units: &UnitTable,
    global_seed: u64,
) -> Result<InstructionPair, InstructError> {
    let descriptors = descriptor_text(&sample.canonical_psmiles, descriptors)?;
    let (p, b) = choose_templates(sample, bank, global_seed);
    let unit = units.unit(sample.property);
    let body = fill(
        &bank.bodies[b],
        &[
            ("image", IMAGE_TOKEN),
            ("psmiles", &sample.canonical_psmiles),
            ("descriptors", &descriptors),
            ("property", sample.property.name()),
            ("unit", unit),
        ],
    );
    Ok(InstructionPair {
        prompt: format!("{}\n{}", bank.prefixes[p], body),
        image: image.to_string(),
        answer: units.format_answer(sample.property, sample.value),
        property: sample.property,
        split: sample.split,
    })
}

pub fn write_jsonl<W: Write>(mut w: W, pairs: &[InstructionPair]) -> std::io::Result<()> {
    for pair in pairs {
        serde_json::to_writer(&mut w, pair)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

pub fn emit_jsonl(pairs: &[InstructionPair], path: &Path) -> Result<(), InstructError> {
    let io = |e: std::io::Error| InstructError::Io(format!("{}: {e}", path.display()));
    let file = File::create(path).map_err(io)?;
    write_jsonl(BufWriter::new(file), pairs).map_err(io)
}

pub fn read_jsonl(path: &Path) -> Result<Vec<InstructionPair>, InstructError> {
    let file = File::open(path).map_err(|e| InstructError::Io(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| InstructError::Io(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| InstructError::Json { line: i + 1, message: e.to_string() })?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Source;
    use polymm_core::descriptors::compute_all;
    use polymm_core::psmiles::parse;

    fn sample(key: &str, p: Property, v: f64) -> Sample {
        Sample { canonical_psmiles: key.into(), property: p, value: v, split: SplitTag::Train }
    }

    #[test]
    fn two_properties_two_samples() {
        let r = PolymerRecord::new("*CC*", Source::Main).with(Property::Tg, 1.0).with(Property::Tc, 0.2);
        let s = decompose(&[r], SplitTag::Test);
        assert_eq!(s.len(), 2);
        assert!(s.iter().all(|x| x.canonical_psmiles == "*CC*" && x.split == SplitTag::Test));
    }

    #[test]
    fn render_is_deterministic_and_filled() {
        let d = compute_all(&parse("*CC(*)C").unwrap());
        let s = sample("*CC(*)C", Property::Density, 0.9431);
        let bank = TemplateBank::builtin();
        let u = UnitTable::default();
        let a = render(&s, &d, "img/x.png", &bank, &u, 1).unwrap();
        assert_eq!(a, render(&s, &d, "img/x.png", &bank, &u, 1).unwrap());
        assert_eq!(a.answer, "Density:0.9431 g/cm^3");
        assert!(a.prompt.contains("redict the Density"));
        assert!(a.prompt.contains("g/cm^3"));
        assert!(a.prompt.contains("*CC(*)C"));
        assert!(a.prompt.contains(IMAGE_TOKEN));
        assert!(!a.prompt.contains('{'));
        for desc in Descriptor::ALL {
            assert!(a.prompt.contains(&format!("{}:", desc.name())), "{}", desc.name());
        }
    }

    #[test]
    fn incomplete_descriptors_are_reported() {
        let d = compute_all(&parse("C").unwrap());
        assert!(!d.is_complete());
        let e = render(&sample("C", Property::Tg, 1.0), &d, "", &TemplateBank::builtin(), &UnitTable::default(), 0);
        assert!(matches!(e, Err(InstructError::MissingDescriptor { .. })));
    }

    #[test]
    fn seed_depends_on_every_part() {
        let a = sample_seed("*CC*", Property::Tg, 1);
        assert_ne!(a, sample_seed("*CC*", Property::Tg, 2));
        assert_ne!(a, sample_seed("*CC*", Property::Rg, 1));
        assert_ne!(a, sample_seed("*CCC*", Property::Tg, 1));
    }

    #[test]
    fn fill_leaves_unknown_braces() {
        assert_eq!(fill("{a} {b} {", &[("a", "x")]), "x {b} {");
    }

    #[test]
    fn jsonl_round_trip_and_field_order() {
        let pair = InstructionPair {
            prompt: "p \"q\"\nr".into(),
            image: "i.png".into(),
            answer: "Tg:1.0 °C".into(),
            property: Property::Tg,
            split: SplitTag::Test,
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.jsonl");
        emit_jsonl(&[pair.clone(), pair.clone(), pair.clone()], &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.starts_with(r#"{"prompt":"#));
        assert!(text.lines().next().unwrap().ends_with(r#""property":"Tg","split":"test"}"#));
        assert_eq!(read_jsonl(&path).unwrap(), vec![pair.clone(), pair.clone(), pair]);
        emit_jsonl(&[], &path).unwrap();
        assert_eq!(std::fs::read(&path).unwrap().len(), 0);
    }
}
