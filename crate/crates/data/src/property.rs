//! The five target properties, their units and answer precision.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Property {
    Tg,
    #[serde(rename = "FFV")]
    Ffv,
    Tc,
    Density,
    Rg,
}

impl Property {
    pub const ALL: [Property; 5] = [Property::Tg, Property::Ffv, Property::Tc, Property::Density, Property::Rg];

    pub fn name(self) -> &'static str {
        match self {
            Property::Tg => "Tg",
            Property::Ffv => "FFV",
            Property::Tc => "Tc",
            Property::Density => "Density",
            Property::Rg => "Rg",
        }
    }

    /// Case-insensitive lookup by name.
    pub fn from_name(name: &str) -> Option<Property> {
        Property::ALL.into_iter().find(|p| p.name().eq_ignore_ascii_case(name))
    }

    /// Decimal places used when writing answers.
    pub fn precision(self) -> usize {
        match self {
            Property::Tg => 1,
            Property::Rg => 2,
            Property::Ffv | Property::Tc | Property::Density => 4,
        }
    }

    pub fn is_unitless(self) -> bool {
        self == Property::Ffv
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Unit text per property, as shown in prompts and answers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UnitTable(pub BTreeMap<Property, String>);

impl Default for UnitTable {
    fn default() -> Self {
        UnitTable(
            [
                (Property::Tg, "°C"),
                (Property::Ffv, "unitless"),
                (Property::Tc, "W/(m·K)"),
                (Property::Density, "g/cm^3"),
                (Property::Rg, "Å"),
            ]
            .into_iter()
            .map(|(p, u)| (p, u.to_string()))
            .collect(),
        )
    }
}

impl UnitTable {
    pub fn unit(&self, p: Property) -> &str {
        self.0.get(&p).map(String::as_str).unwrap_or("")
    }

    /// `<name>:<value> <unit>` with the property's fixed precision.
    pub fn format_answer(&self, p: Property, value: f64) -> String {
        format!("{}:{:.*} {}", p.name(), p.precision(), value, self.unit(p))
    }

    /// Loose unit comparison: ignores case, whitespace, degree signs and
    /// common typographic variants.
    pub fn unit_matches(&self, p: Property, written: &str) -> bool {
        normalize_unit(written) == normalize_unit(self.unit(p))
    }
}

fn normalize_unit(u: &str) -> String {
    let mut s = String::new();
    for c in u.chars() {
        match c {
            '°' | 'º' => {}
            c if c.is_whitespace() => {}
            '³' => s.push_str("^3"),
            '·' | '×' => s.push('*'),
            '\u{c5}' | '\u{212b}' => s.push('a'),
            c => s.extend(c.to_lowercase()),
        }
    }
    match s.as_str() {
        "degc" | "celsius" => "c".to_string(),
        "angstrom" | "angstroms" => "a".to_string(),
        "g/cc" | "g/cm3" => "g/cm^3".to_string(),
        "w/mk" | "w/m/k" | "w/(mk)" | "w/(m.k)" => "w/(m*k)".to_string(),
        _ => s,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn density_answer_format() {
        assert_eq!(UnitTable::default().format_answer(Property::Density, 0.9431), "Density:0.9431 g/cm^3");
    }

    #[test]
    fn precision_per_property() {
        let u = UnitTable::default();
        assert_eq!(u.format_answer(Property::Tg, 123.456), "Tg:123.5 °C");
        assert_eq!(u.format_answer(Property::Rg, 12.3456), "Rg:12.35 Å");
        assert_eq!(u.format_answer(Property::Tc, 0.25), "Tc:0.2500 W/(m·K)");
    }

    #[test]
    fn unit_aliases() {
        let u = UnitTable::default();
        assert!(u.unit_matches(Property::Tg, "C"));
        assert!(u.unit_matches(Property::Tg, "°C"));
        assert!(u.unit_matches(Property::Density, "g/cm³"));
        assert!(u.unit_matches(Property::Rg, "A"));
        assert!(u.unit_matches(Property::Tc, "W/(m*K)"));
        assert!(!u.unit_matches(Property::Tg, "K"));
    }

    #[test]
    fn names_round_trip() {
        for p in Property::ALL {
            assert_eq!(Property::from_name(p.name()), Some(p));
        }
        assert_eq!(Property::from_name("ffv"), Some(Property::Ffv));
        assert_eq!(Property::from_name("MolWt"), None);
    }
}
