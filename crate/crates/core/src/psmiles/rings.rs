//! Ring-bond detection and smallest-set-of-smallest-rings perception.
//!
//! Candidate cycles follow Horton's construction: for every ring atom `v` and
//! ring bond `(x, y)`, the cycle `P(v,x) + (x,y) + P(y,v)` built from fixed BFS
//! shortest paths. Candidates are sorted by length and then by their sorted
//! atom-index sequence, and accepted greedily while linearly independent over
//! GF(2) in bond space. The result is a minimum cycle basis with deterministic
//! tie-breaking.

use std::collections::VecDeque;

use super::graph::{MolecularGraph, Ring};

/// Marks ring bonds (non-bridges) and fills `graph.rings`.
pub(crate) fn assign_rings(graph: &mut MolecularGraph) {
    let ring_bonds = ring_bond_mask(graph);
    for (bond, in_ring) in graph.bonds.iter_mut().zip(&ring_bonds) {
        bond.in_ring = *in_ring;
    }
    graph.rings = find_sssr(graph);
}

/// `true` for every bond that lies on a cycle.
pub(crate) fn ring_bond_mask(graph: &MolecularGraph) -> Vec<bool> {
    let n = graph.atom_count();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut is_bridge = vec![false; graph.bond_count()];
    let mut timer = 0;
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        // Iterative DFS: (atom, bond used to enter, next neighbour cursor).
        let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        while let Some(&mut (v, parent_bond, ref mut cursor)) = stack.last_mut() {
            if let Some(&(w, b)) = graph.neighbors(v).get(*cursor) {
                *cursor += 1;
                if b == parent_bond {
                    continue;
                }
                if disc[w] == usize::MAX {
                    disc[w] = timer;
                    low[w] = timer;
                    timer += 1;
                    stack.push((w, b, 0));
                } else {
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if let Some(&(p, _, _)) = stack.last() {
                    low[p] = low[p].min(low[v]);
                    if low[v] > disc[p] {
                        is_bridge[parent_bond] = true;
                    }
                }
            }
        }
    }
    is_bridge.iter().map(|b| !b).collect()
}

/// Smallest set of smallest rings; exactly `cyclomatic_number()` rings.
pub fn find_sssr(graph: &MolecularGraph) -> Vec<Ring> {
    let target = graph.cyclomatic_number();
    if target == 0 {
        return Vec::new();
    }
    let ring_bonds = ring_bond_mask(graph);
    let n = graph.atom_count();
    let ring_atoms: Vec<usize> = (0..n).filter(|&a| graph.neighbors(a).iter().any(|&(_, b)| ring_bonds[b])).collect();

    let mut candidates: Vec<Candidate> = Vec::new();
    for &v in &ring_atoms {
        let (dist, parent) = bfs_tree(graph, v, &ring_bonds);
        for (bi, bond) in graph.bonds().iter().enumerate() {
            if !ring_bonds[bi] {
                continue;
            }
            let (x, y) = (bond.begin, bond.end);
            if dist[x] == usize::MAX || dist[y] == usize::MAX {
                continue;
            }
            let px = path_to_root(x, &parent);
            let py = path_to_root(y, &parent);
            // Paths must only share the root.
            if px.iter().filter(|(a, _)| *a != v).any(|(a, _)| py.iter().any(|(b, _)| b == a)) {
                continue;
            }
            let mut atoms: Vec<usize> = px.iter().rev().map(|(a, _)| *a).collect();
            atoms.extend(py.iter().map(|(a, _)| *a).filter(|&a| a != v));
            let mut bonds: Vec<usize> = px.iter().rev().filter_map(|(_, b)| *b).collect();
            bonds.push(bi);
            bonds.extend(py.iter().filter_map(|(_, b)| *b));
            if atoms.len() < 3 || atoms.len() != bonds.len() {
                continue;
            }
            candidates.push(Candidate::new(atoms, bonds));
        }
    }
    candidates.sort_by(|a, b| (a.atoms.len(), &a.key).cmp(&(b.atoms.len(), &b.key)));
    candidates.dedup_by(|a, b| a.key == b.key && a.bond_set == b.bond_set);

    let words = graph.bond_count().div_ceil(64);
    let mut basis = GfBasis::new(words);
    let mut rings = Vec::with_capacity(target);
    for cand in candidates {
        let mut vector = vec![0u64; words];
        for &b in &cand.bonds {
            vector[b / 64] |= 1 << (b % 64);
        }
        if basis.insert(vector) {
            rings.push(cand.into_ring());
            if rings.len() == target {
                break;
            }
        }
    }
    rings
}

struct Candidate {
    atoms: Vec<usize>,
    bonds: Vec<usize>,
    key: Vec<usize>,
    bond_set: Vec<usize>,
}

impl Candidate {
    fn new(atoms: Vec<usize>, bonds: Vec<usize>) -> Self {
        let mut key = atoms.clone();
        key.sort_unstable();
        let mut bond_set = bonds.clone();
        bond_set.sort_unstable();
        Candidate { atoms, bonds, key, bond_set }
    }

    /// Rotate so the lowest atom comes first, then walk toward its lower neighbour.
    fn into_ring(self) -> Ring {
        let n = self.atoms.len();
        let start = (0..n).min_by_key(|&i| self.atoms[i]).unwrap_or(0);
        let next = self.atoms[(start + 1) % n];
        let prev = self.atoms[(start + n - 1) % n];
        let mut atoms = Vec::with_capacity(n);
        let mut bonds = Vec::with_capacity(n);
        if next <= prev {
            for k in 0..n {
                atoms.push(self.atoms[(start + k) % n]);
                bonds.push(self.bonds[(start + k) % n]);
            }
        } else {
            for k in 0..n {
                atoms.push(self.atoms[(start + n - k) % n]);
                bonds.push(self.bonds[(start + 2 * n - k - 1) % n]);
            }
        }
        Ring { atoms, bonds, aromatic: false }
    }
}

fn bfs_tree(graph: &MolecularGraph, root: usize, ring_bonds: &[bool]) -> (Vec<usize>, Vec<Option<(usize, usize)>>) {
    let n = graph.atom_count();
    let mut dist = vec![usize::MAX; n];
    let mut parent = vec![None; n];
    let mut queue = VecDeque::new();
    dist[root] = 0;
    queue.push_back(root);
    while let Some(a) = queue.pop_front() {
        let mut nbrs: Vec<(usize, usize)> =
            graph.neighbors(a).iter().copied().filter(|&(_, b)| ring_bonds[b]).collect();
        nbrs.sort_unstable();
        for (w, b) in nbrs {
            if dist[w] == usize::MAX {
                dist[w] = dist[a] + 1;
                parent[w] = Some((a, b));
                queue.push_back(w);
            }
        }
    }
    (dist, parent)
}

/// `[(atom, bond to its parent)]` from `start` up to and including the root.
fn path_to_root(start: usize, parent: &[Option<(usize, usize)>]) -> Vec<(usize, Option<usize>)> {
    let mut path = Vec::new();
    let mut cur = start;
    loop {
        match parent[cur] {
            Some((p, b)) => {
                path.push((cur, Some(b)));
                cur = p;
            }
            None => {
                path.push((cur, None));
                break;
            }
        }
    }
    path
}

/// Incremental GF(2) row-echelon basis.
struct GfBasis {
    rows: Vec<(usize, Vec<u64>)>,
    words: usize,
}

impl GfBasis {
    fn new(words: usize) -> Self {
        GfBasis { rows: Vec::new(), words }
    }

    /// Reduces `v` against the basis; keeps it and returns `true` when independent.
    fn insert(&mut self, mut v: Vec<u64>) -> bool {
        for (pivot, row) in &self.rows {
            if v[pivot / 64] >> (pivot % 64) & 1 == 1 {
                for w in 0..self.words {
                    v[w] ^= row[w];
                }
            }
        }
        let pivot = (0..self.words * 64).find(|&bit| v[bit / 64] >> (bit % 64) & 1 == 1);
        match pivot {
            Some(p) => {
                // Keep rows fully reduced on the new pivot.
                for (_, row) in &mut self.rows {
                    if row[p / 64] >> (p % 64) & 1 == 1 {
                        for w in 0..self.words {
                            row[w] ^= v[w];
                        }
                    }
                }
                self.rows.push((p, v));
                true
            }
            None => false,
        }
    }
}
