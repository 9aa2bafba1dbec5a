//! Bond conjugation, orbital hybridization and the Hall-Kier alpha index.

use std::collections::HashMap;
use std::sync::OnceLock;

use serde::Serialize;

use super::tables::{hall_kier_text, rows};
use super::DescriptorError;
use crate::elements;
use crate::psmiles::{count_atom_electrons, BondOrder, MolecularGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Hybridization {
    S,
    Sp,
    Sp2,
    Sp3,
    Sp3d,
    Sp3d2,
    Other,
}

/// Second-row-and-below atoms with five or six valence electrons only
/// conjugate when terminal.
fn conjugation_candidate(graph: &MolecularGraph, atom: usize) -> bool {
    let z = graph.atom(atom).atomic_number;
    let outer = elements::outer_electrons(z);
    z <= 10 || (outer != 5 && outer != 6) || (outer == 6 && graph.degree(atom) < 2)
}

/// Aromatic bonds, plus a multiple bond and a neighbouring bond that meet at
/// a two- or three-coordinate atom next to an electron donor.
pub fn conjugated_bonds(graph: &MolecularGraph) -> Vec<bool> {
    let mut conj: Vec<bool> = graph.bonds().iter().map(|b| b.order == BondOrder::Aromatic).collect();
    for atom in 0..graph.atom_count() {
        if !conjugation_candidate(graph, atom) {
            continue;
        }
        let coordination = graph.total_degree(atom);
        if !(2..=3).contains(&coordination) {
            continue;
        }
        for &(_, b1) in graph.neighbors(atom) {
            if graph.bond(b1).order.valence_contrib() < 1.5 {
                continue;
            }
            for &(other, b2) in graph.neighbors(atom) {
                if b1 == b2 || graph.total_degree(other) > 3 {
                    continue;
                }
                if count_atom_electrons(graph, other) > 0 {
                    conj[b1] = true;
                    conj[b2] = true;
                }
            }
        }
    }
    conj
}

/// Hybridization from bonds plus lone pairs; four orbitals drop to sp2 when the
/// atom takes part in conjugation with at most three connections.
pub fn hybridizations(graph: &MolecularGraph) -> Vec<Hybridization> {
    let conj = conjugated_bonds(graph);
    (0..graph.atom_count())
        .map(|i| {
            let atom = graph.atom(i);
            let degree = graph.total_degree(i) as i32;
            let orbitals = if atom.atomic_number <= 1 {
                degree
            } else {
                let outer = elements::outer_electrons(atom.atomic_number) as i32;
                let free = outer - (graph.total_valence(i) as i32 + atom.formal_charge as i32);
                degree + free / 2
            };
            match orbitals {
                0 | 1 => Hybridization::S,
                2 => Hybridization::Sp,
                3 => Hybridization::Sp2,
                4 => {
                    let conjugated = graph.neighbors(i).iter().any(|&(_, b)| conj[b]);
                    if conjugated && degree <= 3 {
                        Hybridization::Sp2
                    } else {
                        Hybridization::Sp3
                    }
                }
                5 => Hybridization::Sp3d,
                6 => Hybridization::Sp3d2,
                _ => Hybridization::Other,
            }
        })
        .collect()
}

/// Per-element alphas for sp, sp2 and sp3; `None` means "use the sp3 value".
fn alpha_table() -> &'static HashMap<u8, [Option<f64>; 3]> {
    static TABLE: OnceLock<HashMap<u8, [Option<f64>; 3]>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let cell = |s: Option<&&str>| s.filter(|s| !s.is_empty()).map(|s| s.parse().expect("alpha"));
        rows(hall_kier_text())
            .map(|c| {
                let z = elements::by_symbol(c[0]).expect("element").atomic_number;
                (z, [cell(c.get(1)), cell(c.get(2)), cell(c.get(3))])
            })
            .collect()
    })
}

pub fn hall_kier_alpha(graph: &MolecularGraph) -> Result<f64, DescriptorError> {
    let hybrid = hybridizations(graph);
    let r_carbon = elements::rb0(6);
    let mut total = 0.0;
    for (i, atom) in graph.atoms().iter().enumerate() {
        if atom.is_wildcard() {
            continue;
        }
        let alpha = match alpha_table().get(&atom.atomic_number) {
            Some(row) => {
                let sp3 = row[2].expect("every row has an sp3 value");
                let slot = match hybrid[i] {
                    Hybridization::Sp => row[0],
                    Hybridization::Sp2 => row[1],
                    _ => None,
                };
                slot.unwrap_or(sp3)
            }
            None => {
                let r = elements::rb0(atom.atomic_number);
                if r <= 0.0 {
                    return Err(DescriptorError::UnclassifiedAtomType { atom: i });
                }
                r / r_carbon - 1.0
            }
        };
        total += alpha;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::psmiles::parse;

    fn alpha(s: &str) -> f64 {
        hall_kier_alpha(&parse(s).unwrap()).unwrap()
    }

    #[test]
    fn sp3_carbon_is_reference() {
        assert_eq!(alpha("CC"), 0.0);
    }

    #[test]
    fn benzene_is_six_aromatic_carbons() {
        assert!((alpha("c1ccccc1") - 6.0 * -0.13).abs() < 1e-12);
    }

    #[test]
    fn oxygen_is_negative() {
        assert!(alpha("O") < 0.0);
    }

    #[test]
    fn hybridization_cases() {
        use Hybridization::*;
        let h = hybridizations(&parse("CC(=O)NC").unwrap());
        assert_eq!(h, vec![Sp3, Sp2, Sp2, Sp2, Sp3]);
        let h = hybridizations(&parse("CC#N").unwrap());
        assert_eq!(h, vec![Sp3, Sp, Sp]);
        let h = hybridizations(&parse("c1cc[nH]c1").unwrap());
        assert!(h.iter().all(|&x| x == Sp2));
    }
}
