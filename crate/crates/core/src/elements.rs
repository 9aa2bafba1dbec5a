//! Periodic-table data used by the parser and the descriptor tables.

use std::sync::OnceLock;

const ELEMENTS_TSV: &str = include_str!("../data/elements.tsv");

/// Per-element constants loaded from `data/elements.tsv`.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementData {
    pub atomic_number: u8,
    pub symbol: String,
    /// Standard atomic weight in g/mol; 0 for the wildcard.
    pub weight: f64,
    /// Bond radius in angstrom.
    pub rb0: f64,
    pub outer_electrons: u8,
    /// Allowed valences in ascending order; empty means unrestricted.
    pub valences: Vec<u8>,
}

fn table() -> &'static [ElementData] {
    static TABLE: OnceLock<Vec<ElementData>> = OnceLock::new();
    TABLE.get_or_init(|| {
        ELEMENTS_TSV
            .lines()
            .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
            .map(|line| {
                let cols: Vec<&str> = line.split('\t').collect();
                let mut valences: Vec<u8> = cols[5]
                    .split(',')
                    .filter_map(|v| v.parse::<i32>().ok())
                    .filter(|v| *v >= 0)
                    .map(|v| v as u8)
                    .collect();
                valences.sort_unstable();
                ElementData {
                    atomic_number: cols[0].parse().expect("atomic number"),
                    symbol: cols[1].to_string(),
                    weight: cols[2].parse().expect("weight"),
                    rb0: cols[3].parse().expect("rb0"),
                    outer_electrons: cols[4].parse().expect("outer electrons"),
                    valences,
                }
            })
            .collect()
    })
}

/// Raw text of the element table, for checksumming.
pub(crate) fn source_text() -> &'static str {
    ELEMENTS_TSV
}

pub fn element(atomic_number: u8) -> Option<&'static ElementData> {
    table().get(atomic_number as usize)
}

pub fn by_symbol(symbol: &str) -> Option<&'static ElementData> {
    table().iter().find(|e| e.symbol == symbol)
}

pub fn symbol(atomic_number: u8) -> &'static str {
    element(atomic_number).map(|e| e.symbol.as_str()).unwrap_or("?")
}

pub fn weight(atomic_number: u8) -> f64 {
    element(atomic_number).map(|e| e.weight).unwrap_or(0.0)
}

pub fn rb0(atomic_number: u8) -> f64 {
    element(atomic_number).map(|e| e.rb0).unwrap_or(0.0)
}

pub fn outer_electrons(atomic_number: u8) -> u8 {
    element(atomic_number).map(|e| e.outer_electrons).unwrap_or(0)
}

/// Allowed valences for an atom with the given charge.
///
/// Charged main-group atoms take the valences of their isoelectronic
/// neighbour (N+ behaves like C, O- like F), which covers the common
/// ammonium, oxonium, alkoxide and carbanion cases.
pub fn valences(atomic_number: u8, charge: i8) -> &'static [u8] {
    let shifted = atomic_number as i32 - charge as i32;
    let base = element(atomic_number).map(|e| e.valences.as_slice()).unwrap_or(&[]);
    if charge == 0 || !(1..=54).contains(&shifted) {
        return base;
    }
    let same_period = period(atomic_number) == period(shifted as u8);
    match element(shifted as u8) {
        Some(e) if same_period && matches!(atomic_number, 5..=9 | 13..=17 | 31..=35) => e.valences.as_slice(),
        _ => base,
    }
}

/// Smallest allowed valence that accommodates `bond_sum`, if any.
pub fn target_valence(atomic_number: u8, charge: i8, bond_sum: u32) -> Option<u32> {
    valences(atomic_number, charge).iter().map(|&v| v as u32).find(|&v| v >= bond_sum)
}

/// The valence SMILES assumes for an uncharged atom (the smallest allowed one).
pub fn default_valence(atomic_number: u8) -> Option<u8> {
    element(atomic_number).and_then(|e| e.valences.first().copied())
}

fn period(z: u8) -> u8 {
    match z {
        0 => 0,
        1..=2 => 1,
        3..=10 => 2,
        11..=18 => 3,
        19..=36 => 4,
        37..=54 => 5,
        55..=86 => 6,
        _ => 7,
    }
}

/// Pauling electronegativity for the elements the aromaticity model compares.
pub fn electronegativity(atomic_number: u8) -> f64 {
    match atomic_number {
        1 => 2.20,
        5 => 2.04,
        6 => 2.55,
        7 => 3.04,
        8 => 3.44,
        9 => 3.98,
        14 => 1.90,
        15 => 2.19,
        16 => 2.58,
        17 => 3.16,
        33 => 2.18,
        34 => 2.55,
        35 => 2.96,
        52 => 2.10,
        53 => 2.66,
        _ => 0.0,
    }
}
