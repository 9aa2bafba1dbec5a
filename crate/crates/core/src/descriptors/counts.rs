//! Molecular weight and integer structural counts.

use std::collections::HashSet;
use std::sync::OnceLock;

use serde::Serialize;

use crate::elements;
use crate::psmiles::{BondOrder, MolecularGraph};
use crate::smarts::Smarts;

const HYDROGEN_WEIGHT: f64 = 1.008;

const AMIDE: &str = "C(=[O;!R])N";

const ROTATABLE: &str = concat!(
    "[!$(*#*)&!D1&!$(C(F)(F)F)&!$(C(Cl)(Cl)Cl)&!$(C(Br)(Br)Br)&!$(C([CH3])([CH3])[CH3])",
    "&!$([CD3](=[N,O,S])-!@[#7,O,S!D1])&!$([#7,O,S!D1]-!@[CD3]=[N,O,S])",
    "&!$([CD3](=[N+])-!@[#7!D1])&!$([#7!D1]-!@[CD3]=[N+])]",
    "-,:;!@",
    "[!$(*#*)&!D1&!$(C(F)(F)F)&!$(C(Cl)(Cl)Cl)&!$(C(Br)(Br)Br)&!$(C([CH3])([CH3])[CH3])]",
);

fn compiled(cell: &'static OnceLock<Smarts>, pattern: &str) -> &'static Smarts {
    cell.get_or_init(|| Smarts::parse(pattern).expect("built-in pattern parses"))
}

/// Standard atomic weights of real atoms plus hydrogens; wildcards weigh nothing.
pub fn mol_wt(graph: &MolecularGraph) -> f64 {
    graph.atoms().iter().map(|a| elements::weight(a.atomic_number) + HYDROGEN_WEIGHT * a.total_h() as f64).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StructuralCounts {
    pub heavy_atom_count: usize,
    pub nhoh_count: u32,
    pub no_count: usize,
    pub fraction_csp3: f64,
    pub num_aliphatic_rings: usize,
    pub num_aromatic_rings: usize,
    pub num_saturated_rings: usize,
    pub num_amide_bonds: usize,
    pub num_rotatable_bonds: usize,
}

pub fn structural_counts(graph: &MolecularGraph) -> StructuralCounts {
    let atoms = graph.atoms();
    let is_n_or_o = |z: u8| z == 7 || z == 8;

    let carbons: Vec<usize> = (0..atoms.len()).filter(|&i| atoms[i].atomic_number == 6).collect();
    let sp3 = carbons
        .iter()
        .filter(|&&c| graph.neighbors(c).iter().all(|&(_, b)| graph.bond(b).order == BondOrder::Single))
        .count();
    let fraction_csp3 = if carbons.is_empty() { 0.0 } else { sp3 as f64 / carbons.len() as f64 };

    let rings = graph.rings();
    let num_aromatic_rings = rings.iter().filter(|r| r.aromatic).count();
    let num_saturated_rings =
        rings.iter().filter(|r| r.bonds.iter().all(|&b| graph.bond(b).order == BondOrder::Single)).count();

    static AMIDE_CELL: OnceLock<Smarts> = OnceLock::new();
    static ROTATABLE_CELL: OnceLock<Smarts> = OnceLock::new();
    let amide_pairs: HashSet<(usize, usize)> =
        compiled(&AMIDE_CELL, AMIDE).find_unique_matches(graph).iter().map(|m| (m[0], m[2])).collect();
    let rotatable: HashSet<(usize, usize)> = compiled(&ROTATABLE_CELL, ROTATABLE)
        .find_unique_matches(graph)
        .iter()
        .map(|m| (m[0].min(m[1]), m[0].max(m[1])))
        .collect();

    StructuralCounts {
        heavy_atom_count: atoms.iter().filter(|a| a.is_heavy()).count(),
        nhoh_count: atoms.iter().filter(|a| is_n_or_o(a.atomic_number)).map(|a| a.total_h()).sum(),
        no_count: atoms.iter().filter(|a| is_n_or_o(a.atomic_number)).count(),
        fraction_csp3,
        num_aliphatic_rings: rings.len() - num_aromatic_rings,
        num_aromatic_rings,
        num_saturated_rings,
        num_amide_bonds: amide_pairs.len(),
        num_rotatable_bonds: rotatable.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::psmiles::parse;

    fn counts(s: &str) -> StructuralCounts {
        structural_counts(&parse(s).unwrap())
    }

    #[test]
    fn weights() {
        assert!((mol_wt(&parse("C").unwrap()) - 16.043).abs() < 1e-9);
        assert!((mol_wt(&parse("O").unwrap()) - 18.015).abs() < 1e-9);
        assert!((mol_wt(&parse("*CC*").unwrap()) - 28.054).abs() < 1e-9);
    }

    #[test]
    fn ethanol_counts() {
        let c = counts("CCO");
        assert_eq!(c.heavy_atom_count, 3);
        assert_eq!(c.no_count, 1);
        assert_eq!(c.nhoh_count, 1);
        assert_eq!(c.fraction_csp3, 1.0);
    }

    #[test]
    fn wildcards_are_not_heavy_atoms() {
        assert_eq!(counts("*CC*").heavy_atom_count, 2);
    }

    #[test]
    fn amide_and_rotors() {
        let c = counts("CC(=O)NC");
        assert_eq!(c.num_amide_bonds, 1);
        assert_eq!(c.num_rotatable_bonds, 0);
        assert_eq!(counts("CCCC").num_rotatable_bonds, 1);
        assert_eq!(counts("*OC(=O)c1ccc(C(=O)OCC*)cc1").num_rotatable_bonds, 4);
        assert_eq!(counts("CCC(F)(F)F").num_rotatable_bonds, 0);
        assert_eq!(counts("CCC(C)(C)C").num_rotatable_bonds, 0);
    }

    #[test]
    fn ring_classes() {
        let c = counts("O=C1CCCCC1");
        assert_eq!((c.num_aliphatic_rings, c.num_saturated_rings), (1, 1));
        let c = counts("C1=CCCCC1");
        assert_eq!((c.num_aliphatic_rings, c.num_saturated_rings), (1, 0));
        let c = counts("c1ccc2c(c1)CCCC2");
        assert_eq!((c.num_aromatic_rings, c.num_aliphatic_rings, c.num_saturated_rings), (1, 1, 0));
    }
}
