//! Graph construction from tokens: branches, ring closures, implicit hydrogens,
//! kekulization, ring perception and aromaticity.

use std::collections::BTreeMap;

use super::aromatic;
use super::error::SmilesError;
use super::graph::{Atom, Bond, BondOrder, MolecularGraph};
use super::rings;
use super::token::{tokenize, AtomSpec, BondSymbol, TokenKind};
use crate::elements;

struct PendingBond {
    begin: usize,
    end: usize,
    /// `None` when no bond symbol was written.
    symbol: Option<BondSymbol>,
    position: usize,
}

struct OpenRing {
    atom: usize,
    symbol: Option<BondSymbol>,
    position: usize,
}

pub fn parse(smiles: &str) -> Result<MolecularGraph, SmilesError> {
    let tokens = tokenize(smiles)?;
    let mut specs: Vec<(AtomSpec, usize)> = Vec::new();
    let mut pending: Vec<PendingBond> = Vec::new();
    let mut open_rings: BTreeMap<u16, OpenRing> = BTreeMap::new();
    let mut branch_stack: Vec<(usize, usize)> = Vec::new();
    let mut previous: Option<usize> = None;
    let mut bond_symbol: Option<(BondSymbol, usize)> = None;

    for token in &tokens {
        match &token.kind {
            TokenKind::Atom(spec) => {
                let index = specs.len();
                specs.push((spec.clone(), token.position));
                if let Some(prev) = previous {
                    pending.push(PendingBond {
                        begin: prev,
                        end: index,
                        symbol: bond_symbol.map(|(s, _)| s),
                        position: bond_symbol.map(|(_, p)| p).unwrap_or(token.position),
                    });
                } else if let Some((_, position)) = bond_symbol {
                    return Err(SmilesError::DanglingBond { position });
                }
                bond_symbol = None;
                previous = Some(index);
            }
            TokenKind::Bond(symbol) => {
                if previous.is_none() || bond_symbol.is_some() {
                    return Err(SmilesError::DanglingBond { position: token.position });
                }
                bond_symbol = Some((*symbol, token.position));
            }
            TokenKind::RingClosure(digit) => {
                let Some(atom) = previous else {
                    return Err(SmilesError::DanglingBond { position: token.position });
                };
                let symbol = bond_symbol.take().map(|(s, _)| s);
                match open_rings.remove(digit) {
                    Some(open) => {
                        let symbol = match (open.symbol, symbol) {
                            (Some(a), Some(b)) if !same_order(a, b) => {
                                return Err(SmilesError::ConflictingRingBond {
                                    digit: *digit,
                                    position: token.position,
                                })
                            }
                            (a, b) => a.or(b),
                        };
                        pending.push(PendingBond { begin: open.atom, end: atom, symbol, position: token.position });
                    }
                    None => {
                        open_rings.insert(*digit, OpenRing { atom, symbol, position: token.position });
                    }
                }
            }
            TokenKind::BranchOpen => {
                let Some(atom) = previous else {
                    return Err(SmilesError::DanglingBond { position: token.position });
                };
                if bond_symbol.is_some() {
                    return Err(SmilesError::DanglingBond { position: token.position });
                }
                branch_stack.push((atom, token.position));
            }
            TokenKind::BranchClose => {
                let (atom, _) =
                    branch_stack.pop().ok_or(SmilesError::UnmatchedParenthesis { position: token.position })?;
                if bond_symbol.is_some() {
                    return Err(SmilesError::DanglingBond { position: token.position });
                }
                previous = Some(atom);
            }
            TokenKind::Dot => {
                return Err(SmilesError::DisconnectedInput { position: token.position });
            }
        }
    }
    if let Some((_, position)) = bond_symbol {
        return Err(SmilesError::DanglingBond { position });
    }
    if let Some((_, position)) = branch_stack.first() {
        return Err(SmilesError::UnmatchedParenthesis { position: *position });
    }
    if let Some((digit, open)) = open_rings.iter().next() {
        return Err(SmilesError::UnmatchedRingClosure { digit: *digit, position: open.position });
    }
    build(smiles, specs, pending)
}

fn same_order(a: BondSymbol, b: BondSymbol) -> bool {
    let norm = |s: BondSymbol| match s {
        BondSymbol::Up | BondSymbol::Down => BondSymbol::Single,
        other => other,
    };
    norm(a) == norm(b)
}

fn build(
    smiles: &str,
    specs: Vec<(AtomSpec, usize)>,
    pending: Vec<PendingBond>,
) -> Result<MolecularGraph, SmilesError> {
    let atoms: Vec<Atom> = specs
        .iter()
        .enumerate()
        .map(|(index, (spec, position))| Atom {
            atomic_number: spec.atomic_number,
            formal_charge: spec.charge,
            is_aromatic: spec.aromatic,
            explicit_h: if spec.bracket { spec.hydrogens } else { 0 },
            implicit_h: 0,
            isotope: spec.isotope,
            bracket: spec.bracket,
            index,
            position: *position,
        })
        .collect();

    let mut bonds: Vec<Bond> = Vec::with_capacity(pending.len());
    let mut seen_pairs = std::collections::HashSet::new();
    for p in &pending {
        if p.begin == p.end || !seen_pairs.insert((p.begin.min(p.end), p.begin.max(p.end))) {
            return Err(SmilesError::DuplicateBond {
                first: p.begin.min(p.end),
                second: p.begin.max(p.end),
                position: p.position,
            });
        }
        let both_aromatic = atoms[p.begin].is_aromatic && atoms[p.end].is_aromatic;
        let order = match p.symbol {
            None if both_aromatic => BondOrder::Aromatic,
            None | Some(BondSymbol::Single | BondSymbol::Up | BondSymbol::Down) => BondOrder::Single,
            Some(BondSymbol::Double) => BondOrder::Double,
            Some(BondSymbol::Triple) => BondOrder::Triple,
            Some(BondSymbol::Aromatic) => BondOrder::Aromatic,
        };
        bonds.push(Bond { begin: p.begin, end: p.end, order, kekule: order, in_ring: false });
    }

    let mut graph = MolecularGraph::from_parts(atoms, bonds, smiles.to_string());

    // Aromatic bonds outside rings are plain single bonds (biaryl links).
    let ring_mask = rings::ring_bond_mask(&graph);
    for (bond, in_ring) in graph.bonds.iter_mut().zip(&ring_mask) {
        bond.in_ring = *in_ring;
        if !*in_ring && bond.order == BondOrder::Aromatic {
            bond.order = BondOrder::Single;
            bond.kekule = BondOrder::Single;
        }
    }

    let written_aromatic: Vec<bool> = graph.atoms.iter().map(|a| a.is_aromatic).collect();
    let pi_demand = assign_hydrogens(&mut graph)?;

    aromatic::kekulize(&mut graph, &pi_demand)
        .map_err(|atom| SmilesError::KekulizationFailure { atom, position: graph.atoms[atom].position })?;
    // Anything still marked aromatic but unmatched is localized single.
    for bond in graph.bonds.iter_mut() {
        if bond.kekule == BondOrder::Aromatic {
            bond.kekule = BondOrder::Single;
        }
    }
    check_valences(&graph)?;

    rings::assign_rings(&mut graph);
    aromatic::perceive(&mut graph);

    if let Some(atom) = (0..graph.atom_count()).find(|&a| written_aromatic[a] && !graph.atoms[a].is_aromatic) {
        return Err(SmilesError::KekulizationFailure { atom, position: graph.atoms[atom].position });
    }
    Ok(graph)
}

/// Fills implicit hydrogens and returns which aromatic atoms still need a
/// double bond from kekulization.
fn assign_hydrogens(graph: &mut MolecularGraph) -> Result<Vec<bool>, SmilesError> {
    let n = graph.atom_count();
    let mut pi_demand = vec![false; n];
    for i in 0..n {
        let atom = &graph.atoms[i];
        if atom.is_wildcard() {
            continue;
        }
        let bond_sum: u32 = graph.neighbors(i).iter().map(|&(_, b)| graph.bonds[b].order.integral()).sum();
        let has_aromatic_bond = graph.neighbors(i).iter().any(|&(_, b)| graph.bonds[b].order == BondOrder::Aromatic);
        let z = atom.atomic_number;
        if atom.bracket {
            if atom.is_aromatic && has_aromatic_bond {
                let used = bond_sum + atom.explicit_h as u32;
                if let Some(target) = elements::target_valence(z, atom.formal_charge, used) {
                    pi_demand[i] = target > used;
                }
            }
            continue;
        }
        let position = atom.position;
        if atom.is_aromatic {
            let target =
                elements::target_valence(z, 0, bond_sum).ok_or(SmilesError::ValenceExceeded { atom: i, position })?;
            let free = target - bond_sum;
            if has_aromatic_bond && free >= 1 {
                pi_demand[i] = true;
                graph.atoms[i].implicit_h = (free - 1) as u8;
            } else {
                graph.atoms[i].implicit_h = free as u8;
            }
        } else {
            let target =
                elements::target_valence(z, 0, bond_sum).ok_or(SmilesError::ValenceExceeded { atom: i, position })?;
            graph.atoms[i].implicit_h = (target - bond_sum) as u8;
        }
    }
    Ok(pi_demand)
}

fn check_valences(graph: &MolecularGraph) -> Result<(), SmilesError> {
    for (i, atom) in graph.atoms.iter().enumerate() {
        if atom.is_wildcard() {
            continue;
        }
        let allowed = elements::valences(atom.atomic_number, atom.formal_charge);
        let Some(&max) = allowed.last() else {
            continue;
        };
        if graph.total_valence(i) > max as u32 {
            return Err(SmilesError::ValenceExceeded { atom: i, position: atom.position });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h_counts(g: &MolecularGraph) -> Vec<u32> {
        g.atoms().iter().map(|a| a.total_h()).collect()
    }

    #[test]
    fn methane_gets_four_hydrogens() {
        assert_eq!(h_counts(&parse("C").unwrap()), vec![4]);
    }

    #[test]
    fn polyethylene_repeat_unit() {
        let g = parse("*CC*").unwrap();
        assert_eq!(g.atom_count(), 4);
        assert_eq!(g.bond_count(), 3);
        assert_eq!(h_counts(&g), vec![0, 2, 2, 0]);
        assert!(g.is_well_formed_polymer());
    }

    #[test]
    fn benzene_is_aromatic_either_way() {
        for s in ["c1ccccc1", "C1=CC=CC=C1"] {
            let g = parse(s).unwrap();
            assert_eq!(g.rings().len(), 1);
            assert!(g.rings()[0].aromatic, "{s}");
            assert!(g.bonds().iter().all(|b| b.order == BondOrder::Aromatic));
            assert!(g.atoms().iter().all(|a| a.total_h() == 1));
        }
    }

    #[test]
    fn naphthalene_has_two_aromatic_rings() {
        let g = parse("c1ccc2ccccc2c1").unwrap();
        assert_eq!(g.rings().len(), 2);
        assert!(g.rings().iter().all(|r| r.aromatic && r.len() == 6));
    }

    #[test]
    fn heteroaromatics() {
        for s in ["c1cc[nH]c1", "c1ccoc1", "c1ccsc1", "c1ccncc1", "Cn1cccc1", "c1cc[n+]([O-])cc1"] {
            let g = parse(s).unwrap_or_else(|e| panic!("{s}: {e}"));
            assert!(g.rings()[0].aromatic, "{s}");
        }
    }

    #[test]
    fn cyclobutadiene_lowercase_fails() {
        let err = parse("c1ccc1").unwrap_err();
        assert_eq!(err.code(), "KekulizationFailure");
    }

    #[test]
    fn pyrrole_without_hydrogen_fails() {
        assert!(matches!(parse("c1ccnc1"), Err(SmilesError::KekulizationFailure { .. })));
    }

    #[test]
    fn unmatched_ring_closure() {
        assert_eq!(parse("C1CC").unwrap_err(), SmilesError::UnmatchedRingClosure { digit: 1, position: 1 });
    }

    #[test]
    fn structural_errors() {
        assert!(matches!(parse("C(C"), Err(SmilesError::UnmatchedParenthesis { .. })));
        assert!(matches!(parse("CC)"), Err(SmilesError::UnmatchedParenthesis { .. })));
        assert!(matches!(parse("CC.C"), Err(SmilesError::DisconnectedInput { position: 2 })));
        assert!(matches!(parse("CC="), Err(SmilesError::DanglingBond { .. })));
        assert!(matches!(parse("C(=)C"), Err(SmilesError::DanglingBond { .. })));
        assert!(matches!(parse("C12CC12"), Err(SmilesError::DuplicateBond { .. })));
        assert!(matches!(parse("C(C)(C)(C)(C)C"), Err(SmilesError::ValenceExceeded { .. })));
        assert!(matches!(parse("C=1CC-1"), Err(SmilesError::ConflictingRingBond { .. })));
        assert!(matches!(parse("[NH4]"), Err(SmilesError::ValenceExceeded { .. })));
    }

    #[test]
    fn charged_and_hypervalent_atoms() {
        assert_eq!(parse("[NH4+]").unwrap().atom(0).total_h(), 4);
        let sulfone = parse("*CS(=O)(=O)C*").unwrap();
        assert_eq!(sulfone.atom(2).total_h(), 0);
        let phosphate = parse("*OP(=O)(O)O*").unwrap();
        assert_eq!(phosphate.atom(4).total_h(), 1);
    }

    #[test]
    fn biaryl_link_is_single() {
        let g = parse("*c1ccc(-c2ccc(*)cc2)cc1").unwrap();
        let link = g.bond_between(4, 5).unwrap();
        assert_eq!(g.bond(link).order, BondOrder::Single);
        let g = parse("*c1ccc(c2ccc(*)cc2)cc1").unwrap();
        let link = g.bond_between(4, 5).unwrap();
        assert_eq!(g.bond(link).order, BondOrder::Single);
        assert_eq!(g.rings().iter().filter(|r| r.aromatic).count(), 2);
    }

    #[test]
    fn fused_heterocycles() {
        for s in ["c1ccc2[nH]ccc2c1", "O=c1[nH]c2ccccc2o1", "c1ccc2c(c1)oc1ccccc12", "O=C1c2ccccc2C(=O)N1*"] {
            let g = parse(s).unwrap_or_else(|e| panic!("{s}: {e}"));
            assert!(g.rings().iter().any(|r| r.aromatic), "{s}");
        }
    }
}
