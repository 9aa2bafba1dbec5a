//! Canonical atom ranking and SMILES emission.

use std::collections::{BTreeMap, HashSet};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::elements;
use crate::psmiles::{parse, BondOrder, MolecularGraph, SmilesError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CanonicalForm {
    pub smiles: String,
    /// `atom_order[k]` is the graph index of the k-th atom written.
    pub atom_order: Vec<usize>,
}

/// Parse and canonicalize in one step.
pub fn canonicalize(smiles: &str) -> Result<String, SmilesError> {
    Ok(write_canonical(&parse(smiles)?).smiles)
}

fn bond_code(order: BondOrder) -> u8 {
    match order {
        BondOrder::Single => 1,
        BondOrder::Double => 2,
        BondOrder::Triple => 3,
        BondOrder::Aromatic => 4,
    }
}

/// A total order over atoms that depends only on the graph up to isomorphism
/// (up to automorphism where ties are broken).
pub fn canonical_ranks(graph: &MolecularGraph) -> Vec<usize> {
    let n = graph.atom_count();
    let seeds: Vec<_> = (0..n)
        .map(|i| {
            let a = graph.atom(i);
            (
                a.atomic_number,
                graph.degree(i),
                a.formal_charge,
                a.is_aromatic,
                graph.is_atom_in_ring(i),
                a.total_h(),
                a.isotope.unwrap_or(0),
            )
        })
        .collect();
    let mut ranks = dense_ranks(&seeds);
    loop {
        refine(graph, &mut ranks);
        let mut counts: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (atom, &r) in ranks.iter().enumerate() {
            counts.entry(r).or_default().push(atom);
        }
        let Some((&tied_rank, tied)) = counts.iter().find(|(_, atoms)| atoms.len() > 1) else {
            break;
        };
        let promoted = *tied.iter().min().expect("non-empty class");
        for (atom, r) in ranks.iter_mut().enumerate() {
            *r = 2 * *r + usize::from(*r == tied_rank && atom != promoted);
        }
        ranks = dense_ranks(&ranks);
    }
    ranks
}

fn dense_ranks<K: Ord + Clone>(keys: &[K]) -> Vec<usize> {
    let mut sorted: Vec<K> = keys.to_vec();
    sorted.sort();
    sorted.dedup();
    keys.iter().map(|k| sorted.binary_search(k).expect("key present")).collect()
}

/// Refine by sorted (neighbor rank, bond order) lists until the partition is stable.
fn refine(graph: &MolecularGraph, ranks: &mut Vec<usize>) {
    let mut classes = count_classes(ranks);
    loop {
        let keys: Vec<(usize, Vec<(usize, u8)>)> = (0..graph.atom_count())
            .map(|i| {
                let mut nbrs: Vec<(usize, u8)> =
                    graph.neighbors(i).iter().map(|&(nb, b)| (ranks[nb], bond_code(graph.bond(b).order))).collect();
                nbrs.sort_unstable();
                (ranks[i], nbrs)
            })
            .collect();
        let next = dense_ranks(&keys);
        let next_classes = count_classes(&next);
        *ranks = next;
        if next_classes == classes {
            break;
        }
        classes = next_classes;
    }
}

fn count_classes(ranks: &[usize]) -> usize {
    ranks.iter().collect::<HashSet<_>>().len()
}

pub fn write_canonical(graph: &MolecularGraph) -> CanonicalForm {
    if graph.atom_count() == 0 {
        return CanonicalForm { smiles: String::new(), atom_order: Vec::new() };
    }
    let ranks = canonical_ranks(graph);
    let start = (0..graph.atom_count()).min_by_key(|&i| ranks[i]).expect("non-empty graph");
    let (smiles, atom_order) = write_from(graph, start, |_, nbrs| {
        nbrs.sort_by_key(|&(nb, _)| ranks[nb]);
    });
    CanonicalForm { smiles, atom_order }
}

/// A valid but non-canonical spelling: random start atom and branch order.
pub fn write_randomized<R: Rng + ?Sized>(graph: &MolecularGraph, rng: &mut R) -> String {
    if graph.atom_count() == 0 {
        return String::new();
    }
    let start = rng.random_range(0..graph.atom_count());
    let mut orders: Vec<Vec<(usize, usize)>> = (0..graph.atom_count())
        .map(|i| {
            let mut nbrs = graph.neighbors(i).to_vec();
            nbrs.shuffle(rng);
            nbrs
        })
        .collect();
    write_from(graph, start, |atom, nbrs| {
        *nbrs = std::mem::take(&mut orders[atom]);
    })
    .0
}

struct RingBond {
    bond: usize,
    opener: usize,
    closer: usize,
}

/// DFS emission; `order_neighbors` fixes the visit order at each atom.
fn write_from(
    graph: &MolecularGraph,
    start: usize,
    mut order_neighbors: impl FnMut(usize, &mut Vec<(usize, usize)>),
) -> (String, Vec<usize>) {
    let n = graph.atom_count();
    let ordered: Vec<Vec<(usize, usize)>> = (0..n)
        .map(|i| {
            let mut nbrs = graph.neighbors(i).to_vec();
            order_neighbors(i, &mut nbrs);
            nbrs
        })
        .collect();

    // Pass 1: spanning tree and ring-closure bonds.
    let mut visited = vec![false; n];
    let mut children: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    let mut ring_bonds: Vec<RingBond> = Vec::new();
    let mut seen_bond = vec![false; graph.bond_count()];
    let mut atom_order = Vec::with_capacity(n);
    let mut stack: Vec<(usize, usize)> = vec![(start, 0)];
    visited[start] = true;
    atom_order.push(start);
    while let Some(top) = stack.last_mut() {
        let (atom, cursor) = *top;
        if cursor == ordered[atom].len() {
            stack.pop();
            continue;
        }
        top.1 += 1;
        let (nb, bond) = ordered[atom][cursor];
        if seen_bond[bond] {
            continue;
        }
        seen_bond[bond] = true;
        if visited[nb] {
            ring_bonds.push(RingBond { bond, opener: nb, closer: atom });
        } else {
            visited[nb] = true;
            atom_order.push(nb);
            children[atom].push((nb, bond));
            stack.push((nb, 0));
        }
    }

    let mut openings: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut closings: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (k, rb) in ring_bonds.iter().enumerate() {
        openings[rb.opener].push(k);
        closings[rb.closer].push(k);
    }

    // Pass 2: emit.
    let mut out = String::new();
    let mut digit_of: Vec<Option<u32>> = vec![None; ring_bonds.len()];
    let mut in_use: Vec<bool> = Vec::new();
    let mut frames: Vec<Frame> = vec![Frame::Atom { atom: start, via: None }];
    while let Some(frame) = frames.pop() {
        match frame {
            Frame::Text(s) => out.push_str(s),
            Frame::Atom { atom, via } => {
                if let Some(bond) = via {
                    out.push_str(bond_symbol(graph, bond));
                }
                out.push_str(&atom_text(graph, atom));
                let mut freed = Vec::new();
                for &k in &closings[atom] {
                    let d = digit_of[k].expect("ring bond opened before closing");
                    freed.push(d);
                    push_digit(&mut out, d);
                }
                for &k in &openings[atom] {
                    let d = (1..)
                        .find(|&d: &u32| !in_use.get(d as usize).copied().unwrap_or(false))
                        .expect("a free digit exists");
                    if in_use.len() <= d as usize {
                        in_use.resize(d as usize + 1, false);
                    }
                    in_use[d as usize] = true;
                    digit_of[k] = Some(d);
                    out.push_str(bond_symbol(graph, ring_bonds[k].bond));
                    push_digit(&mut out, d);
                }
                // Freed only now so an atom never closes and reopens the same digit.
                for d in freed {
                    in_use[d as usize] = false;
                }
                let kids = &children[atom];
                // Pushed in reverse so they pop in visit order.
                for (idx, &(child, bond)) in kids.iter().enumerate().rev() {
                    let branch = idx + 1 < kids.len();
                    if branch {
                        frames.push(Frame::Text(")"));
                    }
                    frames.push(Frame::Atom { atom: child, via: Some(bond) });
                    if branch {
                        frames.push(Frame::Text("("));
                    }
                }
            }
        }
    }
    (out, atom_order)
}

enum Frame {
    Atom { atom: usize, via: Option<usize> },
    Text(&'static str),
}

fn push_digit(out: &mut String, d: u32) {
    if d < 10 {
        out.push(char::from(b'0' + d as u8));
    } else {
        out.push_str(&format!("%{d:02}"));
    }
}

fn bond_symbol(graph: &MolecularGraph, bond: usize) -> &'static str {
    let b = graph.bond(bond);
    match b.order {
        BondOrder::Double => "=",
        BondOrder::Triple => "#",
        BondOrder::Aromatic => "",
        BondOrder::Single => {
            if graph.atom(b.begin).is_aromatic && graph.atom(b.end).is_aromatic {
                "-"
            } else {
                ""
            }
        }
    }
}

const ORGANIC: &[u8] = &[5, 6, 7, 8, 9, 15, 16, 17, 35, 53];

/// Hydrogens the parser would assign to this atom written without brackets.
fn bare_hydrogens(graph: &MolecularGraph, atom: usize) -> Option<u32> {
    let a = graph.atom(atom);
    let bond_sum: u32 = graph.neighbors(atom).iter().map(|&(_, b)| graph.bond(b).order.integral()).sum();
    let target = elements::target_valence(a.atomic_number, 0, bond_sum)?;
    let free = target - bond_sum;
    let has_aromatic_bond = graph.neighbors(atom).iter().any(|&(_, b)| graph.bond(b).order == BondOrder::Aromatic);
    Some(if a.is_aromatic && has_aromatic_bond && free >= 1 { free - 1 } else { free })
}

fn atom_text(graph: &MolecularGraph, atom: usize) -> String {
    let a = graph.atom(atom);
    if a.is_wildcard() && a.formal_charge == 0 && a.isotope.is_none() && a.total_h() == 0 {
        return "*".to_string();
    }
    let mut symbol = a.symbol().to_string();
    if a.is_aromatic {
        symbol.make_ascii_lowercase();
    }
    let bare_ok = a.formal_charge == 0
        && a.isotope.is_none()
        && ORGANIC.contains(&a.atomic_number)
        && bare_hydrogens(graph, atom) == Some(a.total_h());
    if bare_ok {
        return symbol;
    }
    let mut s = String::from("[");
    if let Some(iso) = a.isotope {
        s.push_str(&iso.to_string());
    }
    s.push_str(&symbol);
    match a.total_h() {
        0 => {}
        1 => s.push('H'),
        h => s.push_str(&format!("H{h}")),
    }
    match a.formal_charge {
        0 => {}
        1 => s.push('+'),
        -1 => s.push('-'),
        c if c > 0 => s.push_str(&format!("+{c}")),
        c => s.push_str(&format!("-{}", -c)),
    }
    s.push(']');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn canon(s: &str) -> String {
        canonicalize(s).unwrap()
    }

    #[test]
    fn ethane_ranks_are_total() {
        let mut r = canonical_ranks(&parse("CC").unwrap());
        r.sort();
        assert_eq!(r, vec![0, 1]);
    }

    #[test]
    fn ethanol_oxygen_unique() {
        let g = parse("CCO").unwrap();
        let r = canonical_ranks(&g);
        assert_ne!(r[0], r[1]);
        assert_ne!(r[2], r[0]);
        assert_ne!(r[2], r[1]);
    }

    #[test]
    fn two_spellings_agree() {
        assert_eq!(canon("OCC"), canon("CCO"));
        assert_eq!(canon("C1=CC=CC=C1"), canon("c1ccccc1"));
        assert_eq!(canon("*CC(*)C"), canon("*C(C)C*"));
    }

    #[test]
    fn wildcard_polymer_fixed_point() {
        let s = canon("*CC*");
        assert_eq!(s.matches('*').count(), 2);
        assert_eq!(canon(&s), s);
    }

    #[test]
    fn benzene_rotations_agree() {
        let g = parse("c1ccccc1").unwrap();
        let expected = write_canonical(&g).smiles;
        for shift in 0..6 {
            for reflect in [false, true] {
                let order: Vec<usize> = (0..6)
                    .map(|k| {
                        let k = if reflect { (6 - k) % 6 } else { k };
                        (k + shift) % 6
                    })
                    .collect();
                assert_eq!(write_canonical(&g.permuted(&order)).smiles, expected);
            }
        }
    }

    #[test]
    fn atom_order_is_bijection() {
        let g = parse("*c1ccc(Oc2ccc(*)cc2)cc1").unwrap();
        let form = write_canonical(&g);
        let mut order = form.atom_order.clone();
        order.sort();
        assert_eq!(order, (0..g.atom_count()).collect::<Vec<_>>());
    }

    #[test]
    fn brackets_kept_where_needed() {
        assert_eq!(canon("[nH]1cccc1"), canon("c1cc[nH]c1"));
        assert!(canon("c1cc[nH]c1").contains("[nH]"));
        assert!(canon("C[N+](C)(C)C").contains("[N+]"));
        assert!(canon("[13CH4]").contains("[13CH4]"));
        assert_eq!(canon("[CH4]"), "C");
    }

    #[test]
    fn biaryl_single_bond_written() {
        let s = canon("*c1ccc(-c2ccc(*)cc2)cc1");
        assert!(s.contains('-'), "{s}");
        assert_eq!(canon(&s), s);
    }

    #[test]
    fn many_ring_closures_use_percent_digits() {
        let mut out = String::new();
        push_digit(&mut out, 12);
        assert_eq!(out, "%12");
    }
}
