//! Kekulization of lowercase input and Hückel aromaticity perception.
//!
//! Perception runs on the localized (Kekulé) structure, so `C1=CC=CC=C1` and
//! `c1ccccc1` end up identical. Electron donation per ring atom follows the
//! usual toolkit conventions: an atom with an in-ring multiple bond donates
//! one electron, a lone pair on a saturated heteroatom donates two, and an
//! exocyclic multiple bond to a more electronegative partner leaves the atom
//! vacant (zero). Fused systems are checked ring by ring and then as unions of
//! up to four edge-sharing rings.

use super::graph::{BondOrder, MolecularGraph};
use crate::elements;

const MAX_FUSED_COMBINATION: usize = 4;

/// Atoms in the pi system that still need a double bond, in the order they
/// must be matched. `pi_demand[i]` is true when atom `i` needs one.
pub(crate) fn kekulize(graph: &mut MolecularGraph, pi_demand: &[bool]) -> Result<(), usize> {
    let n = graph.atom_count();
    let mut partner: Vec<Option<usize>> = vec![None; n];
    let mut order: Vec<usize> = (0..n).filter(|&a| pi_demand[a]).collect();
    let candidate_bonds = |g: &MolecularGraph, a: usize| -> Vec<(usize, usize)> {
        g.neighbors(a)
            .iter()
            .copied()
            .filter(|&(nb, b)| g.bonds[b].order == BondOrder::Aromatic && pi_demand[nb])
            .collect()
    };
    // Fewest options first keeps the backtracking shallow.
    order.sort_by_key(|&a| (candidate_bonds(graph, a).len(), a));
    if !solve(graph, &order, 0, &mut partner, &candidate_bonds) {
        let stuck = order
            .iter()
            .copied()
            .find(|&a| candidate_bonds(graph, a).is_empty())
            .or_else(|| order.first().copied())
            .unwrap_or(0);
        return Err(stuck);
    }
    for bond in graph.bonds.iter_mut() {
        if bond.order == BondOrder::Aromatic {
            bond.kekule = if partner[bond.begin] == Some(bond.end) { BondOrder::Double } else { BondOrder::Single };
        }
    }
    Ok(())
}

fn solve<F>(graph: &MolecularGraph, order: &[usize], k: usize, partner: &mut Vec<Option<usize>>, candidates: &F) -> bool
where
    F: Fn(&MolecularGraph, usize) -> Vec<(usize, usize)>,
{
    let Some(pos) = (k..order.len()).find(|&i| partner[order[i]].is_none()) else {
        return true;
    };
    let a = order[pos];
    for (nb, _) in candidates(graph, a) {
        if partner[nb].is_none() {
            partner[a] = Some(nb);
            partner[nb] = Some(a);
            if solve(graph, order, pos + 1, partner, candidates) {
                return true;
            }
            partner[a] = None;
            partner[nb] = None;
        }
    }
    false
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Donor {
    None,
    Vacant,
    One,
    Two,
    Any,
}

/// Electrons an atom can contribute to a conjugated system, or -1.
pub(crate) fn count_atom_electrons(graph: &MolecularGraph, atom: usize) -> i32 {
    let at = graph.atom(atom);
    let Some(dv) = elements::default_valence(at.atomic_number) else {
        return -1;
    };
    let dv = dv as i32;
    if dv <= 1 {
        return -1;
    }
    let degree = graph.total_degree(atom) as i32;
    if degree > 3 {
        return -1;
    }
    let lone = elements::outer_electrons(at.atomic_number) as i32 - dv;
    let lone = (lone - at.formal_charge as i32).max(0);
    let mut res = (dv - degree) + lone;
    if res > 1 {
        let unsaturation = graph.explicit_valence(atom) as i32 - graph.degree(atom) as i32 - at.explicit_h as i32;
        if unsaturation > 1 {
            res = 1;
        }
    }
    res
}

fn multiple_bonds(graph: &MolecularGraph, atom: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
    graph.neighbors(atom).iter().copied().filter(move |&(_, b)| graph.bonds[b].kekule.is_multiple())
}

fn donor_type(graph: &MolecularGraph, atom: usize) -> Donor {
    let at = graph.atom(atom);
    if at.is_wildcard() {
        return Donor::Any;
    }
    let nelec = count_atom_electrons(graph, atom);
    let exocyclic = multiple_bonds(graph, atom).find(|&(_, b)| !graph.bonds[b].in_ring);
    let has_multiple = multiple_bonds(graph, atom).next().is_some();
    match nelec {
        n if n < 0 => Donor::None,
        0 => {
            if has_multiple && exocyclic.is_none() {
                Donor::One
            } else {
                Donor::Vacant
            }
        }
        1 => match exocyclic {
            Some((partner, _)) => {
                let p = graph.atom(partner).atomic_number;
                if elements::electronegativity(p) > elements::electronegativity(at.atomic_number) {
                    Donor::Vacant
                } else {
                    Donor::One
                }
            }
            None if has_multiple => Donor::One,
            None if at.formal_charge == 1 => Donor::Vacant,
            None => Donor::None,
        },
        _ => {
            if exocyclic.is_some() || has_multiple {
                Donor::One
            } else {
                Donor::Two
            }
        }
    }
}

fn is_candidate(graph: &MolecularGraph, atom: usize, donor: Donor) -> bool {
    let at = graph.atom(atom);
    if at.is_wildcard() {
        return false;
    }
    if !matches!(at.atomic_number, 5..=8 | 15 | 16 | 33 | 34 | 52) {
        return false;
    }
    if donor == Donor::None {
        return false;
    }
    let outer = elements::outer_electrons(at.atomic_number) as i32 - at.formal_charge as i32;
    if graph.total_valence(atom) as i32 > outer {
        return false;
    }
    let multiple = multiple_bonds(graph, atom).count();
    if multiple > 1 {
        return false;
    }
    true
}

fn huckel(electrons: i32) -> bool {
    electrons >= 2 && (electrons - 2) % 4 == 0
}

/// Sets aromatic flags on atoms, bonds and rings. Returns nothing; atoms that
/// were written lowercase but end up outside every aromatic ring are reported
/// by the caller.
pub(crate) fn perceive(graph: &mut MolecularGraph) {
    let n = graph.atom_count();
    let donors: Vec<Donor> = (0..n).map(|a| donor_type(graph, a)).collect();
    let candidate: Vec<bool> = (0..n).map(|a| is_candidate(graph, a, donors[a])).collect();

    let eligible: Vec<usize> =
        (0..graph.rings.len()).filter(|&r| graph.rings[r].atoms.iter().all(|&a| candidate[a])).collect();

    let mut aromatic_bond = vec![false; graph.bond_count()];
    let mut ring_done = vec![false; graph.rings.len()];

    for system in fused_systems(graph, &eligible) {
        for size in 1..=system.len().min(MAX_FUSED_COMBINATION) {
            if system.iter().all(|&r| ring_done[r]) {
                break;
            }
            for combo in combinations(&system, size) {
                if size > 1 && (combo.iter().all(|&r| ring_done[r]) || !edge_connected(graph, &combo)) {
                    continue;
                }
                let mut atoms: Vec<usize> = combo.iter().flat_map(|&r| graph.rings[r].atoms.iter().copied()).collect();
                atoms.sort_unstable();
                atoms.dedup();
                if size > 2 && !is_simple_envelope(graph, &combo, &atoms) {
                    continue;
                }
                let electrons: i32 = atoms
                    .iter()
                    .map(|&a| match donors[a] {
                        Donor::One => 1,
                        Donor::Two => 2,
                        _ => 0,
                    })
                    .sum();
                if huckel(electrons) {
                    for &r in &combo {
                        ring_done[r] = true;
                        for &b in &graph.rings[r].bonds {
                            aromatic_bond[b] = true;
                        }
                    }
                }
            }
        }
    }

    for atom in graph.atoms.iter_mut() {
        atom.is_aromatic = false;
    }
    for (bi, bond) in graph.bonds.iter_mut().enumerate() {
        if aromatic_bond[bi] {
            bond.order = BondOrder::Aromatic;
            graph.atoms[bond.begin].is_aromatic = true;
            graph.atoms[bond.end].is_aromatic = true;
        } else {
            bond.order = bond.kekule;
        }
    }
    let bonds = &graph.bonds;
    for ring in graph.rings.iter_mut() {
        ring.aromatic = ring.bonds.iter().all(|&b| bonds[b].order == BondOrder::Aromatic);
    }
}

/// Groups eligible rings into systems connected by shared bonds.
fn fused_systems(graph: &MolecularGraph, rings: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; rings.len()];
    let mut systems = Vec::new();
    for start in 0..rings.len() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut system = vec![rings[start]];
        let mut k = 0;
        while k < system.len() {
            let cur = system[k];
            for (j, &other) in rings.iter().enumerate() {
                if !seen[j] && share_bond(graph, cur, other) {
                    seen[j] = true;
                    system.push(other);
                }
            }
            k += 1;
        }
        system.sort_unstable();
        systems.push(system);
    }
    systems
}

fn share_bond(graph: &MolecularGraph, a: usize, b: usize) -> bool {
    graph.rings[a].bonds.iter().any(|x| graph.rings[b].bonds.contains(x))
}

fn edge_connected(graph: &MolecularGraph, combo: &[usize]) -> bool {
    let mut reached = vec![combo[0]];
    let mut changed = true;
    while changed {
        changed = false;
        for &r in combo {
            if !reached.contains(&r) && reached.iter().any(|&q| share_bond(graph, q, r)) {
                reached.push(r);
                changed = true;
            }
        }
    }
    reached.len() == combo.len()
}

/// For larger unions, every atom must sit on the outer envelope (in at most
/// two of the combined rings), otherwise the union is not a single perimeter.
fn is_simple_envelope(graph: &MolecularGraph, combo: &[usize], atoms: &[usize]) -> bool {
    atoms.iter().all(|&a| combo.iter().filter(|&&r| graph.rings[r].contains_atom(a)).count() <= 2)
}

fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(items: &[usize], k: usize, start: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..items.len() {
            current.push(items[i]);
            rec(items, k, i + 1, current, out);
            current.pop();
        }
    }
    rec(items, k, 0, &mut current, &mut out);
    out
}
