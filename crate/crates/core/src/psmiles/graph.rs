//! Molecular graph produced by the parser.

use crate::elements;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum BondOrder {
    Single,
    Double,
    Triple,
    Aromatic,
}

impl BondOrder {
    /// Integer order; aromatic bonds count as 1 (their pi share is tracked separately).
    pub fn integral(self) -> u32 {
        match self {
            BondOrder::Single | BondOrder::Aromatic => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
        }
    }

    pub fn valence_contrib(self) -> f64 {
        match self {
            BondOrder::Single => 1.0,
            BondOrder::Double => 2.0,
            BondOrder::Triple => 3.0,
            BondOrder::Aromatic => 1.5,
        }
    }

    pub fn is_multiple(self) -> bool {
        !matches!(self, BondOrder::Single)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Atom {
    /// Atomic number; 0 for the `*` wildcard.
    pub atomic_number: u8,
    pub formal_charge: i8,
    pub is_aromatic: bool,
    /// Hydrogens written inside a bracket atom.
    pub explicit_h: u8,
    /// Hydrogens implied by the valence model (organic-subset atoms only).
    pub implicit_h: u8,
    pub isotope: Option<u16>,
    /// Written in `[...]` form.
    pub bracket: bool,
    pub index: usize,
    /// Byte offset of the atom in the source string.
    pub position: usize,
}

impl Atom {
    pub fn is_wildcard(&self) -> bool {
        self.atomic_number == 0
    }

    pub fn total_h(&self) -> u32 {
        self.explicit_h as u32 + self.implicit_h as u32
    }

    pub fn symbol(&self) -> &'static str {
        elements::symbol(self.atomic_number)
    }

    /// Heavy atom in the toolkit sense: not hydrogen, not a wildcard.
    pub fn is_heavy(&self) -> bool {
        self.atomic_number > 1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bond {
    pub begin: usize,
    pub end: usize,
    pub order: BondOrder,
    /// Localized order; equals `order` except for aromatic bonds.
    pub kekule: BondOrder,
    pub in_ring: bool,
}

impl Bond {
    pub fn other(&self, atom: usize) -> usize {
        if self.begin == atom {
            self.end
        } else {
            self.begin
        }
    }

    pub fn is_aromatic(&self) -> bool {
        self.order == BondOrder::Aromatic
    }
}

/// A ring of the smallest set of smallest rings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Ring {
    /// Atoms in cyclic order, starting from the lowest index.
    pub atoms: Vec<usize>,
    /// Bonds in the same cyclic order (`bonds[i]` joins `atoms[i]` and `atoms[i+1]`).
    pub bonds: Vec<usize>,
    pub aromatic: bool,
}

impl Ring {
    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn contains_atom(&self, atom: usize) -> bool {
        self.atoms.contains(&atom)
    }
}

/// Parsed, validated molecule. Immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MolecularGraph {
    pub(crate) atoms: Vec<Atom>,
    pub(crate) bonds: Vec<Bond>,
    pub(crate) rings: Vec<Ring>,
    #[serde(skip)]
    pub(crate) adjacency: Vec<Vec<(usize, usize)>>,
    pub(crate) source_smiles: String,
}

impl MolecularGraph {
    pub(crate) fn from_parts(atoms: Vec<Atom>, bonds: Vec<Bond>, source_smiles: String) -> Self {
        let mut adjacency = vec![Vec::new(); atoms.len()];
        for (bi, b) in bonds.iter().enumerate() {
            adjacency[b.begin].push((b.end, bi));
            adjacency[b.end].push((b.begin, bi));
        }
        MolecularGraph { atoms, bonds, rings: Vec::new(), adjacency, source_smiles }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn atom(&self, index: usize) -> &Atom {
        &self.atoms[index]
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn bond(&self, index: usize) -> &Bond {
        &self.bonds[index]
    }

    pub fn rings(&self) -> &[Ring] {
        &self.rings
    }

    pub fn source_smiles(&self) -> &str {
        &self.source_smiles
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn bond_count(&self) -> usize {
        self.bonds.len()
    }

    /// `(neighbor, bond index)` pairs in insertion order.
    pub fn neighbors(&self, atom: usize) -> &[(usize, usize)] {
        &self.adjacency[atom]
    }

    /// Explicit graph degree; wildcard neighbours count, hydrogens do not.
    pub fn degree(&self, atom: usize) -> usize {
        self.adjacency[atom].len()
    }

    pub fn bond_between(&self, a: usize, b: usize) -> Option<usize> {
        self.adjacency[a].iter().find(|(n, _)| *n == b).map(|(_, bi)| *bi)
    }

    /// Cyclomatic number |bonds| - |atoms| + components.
    pub fn cyclomatic_number(&self) -> usize {
        (self.bonds.len() + self.components()).saturating_sub(self.atoms.len())
    }

    pub fn components(&self) -> usize {
        let mut seen = vec![false; self.atoms.len()];
        let mut count = 0;
        for start in 0..self.atoms.len() {
            if seen[start] {
                continue;
            }
            count += 1;
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(a) = stack.pop() {
                for &(n, _) in &self.adjacency[a] {
                    if !seen[n] {
                        seen[n] = true;
                        stack.push(n);
                    }
                }
            }
        }
        count
    }

    pub fn wildcard_count(&self) -> usize {
        self.atoms.iter().filter(|a| a.is_wildcard()).count()
    }

    /// Advisory polymer check: a repeat unit is expected to carry exactly two `*` stubs.
    pub fn is_well_formed_polymer(&self) -> bool {
        self.wildcard_count() == 2
    }

    pub fn is_atom_in_ring(&self, atom: usize) -> bool {
        self.adjacency[atom].iter().any(|&(_, b)| self.bonds[b].in_ring)
    }

    pub fn is_atom_in_ring_of_size(&self, atom: usize, size: usize) -> bool {
        self.rings.iter().any(|r| r.len() == size && r.contains_atom(atom))
    }

    /// Sum of localized bond orders plus bracket hydrogens.
    pub fn explicit_valence(&self, atom: usize) -> u32 {
        self.adjacency[atom].iter().map(|&(_, b)| self.bonds[b].kekule.integral()).sum::<u32>()
            + self.atoms[atom].explicit_h as u32
    }

    pub fn total_valence(&self, atom: usize) -> u32 {
        self.explicit_valence(atom) + self.atoms[atom].implicit_h as u32
    }

    /// Degree including hydrogens.
    pub fn total_degree(&self, atom: usize) -> usize {
        self.degree(atom) + self.atoms[atom].total_h() as usize
    }

    /// Rebuild the graph with atoms renumbered so that old atom `order[k]` becomes `k`.
    ///
    /// Bond list order follows the new numbering. Ring perception is re-run.
    pub fn permuted(&self, order: &[usize]) -> MolecularGraph {
        assert_eq!(order.len(), self.atoms.len(), "permutation length mismatch");
        let mut new_index = vec![usize::MAX; order.len()];
        for (k, &old) in order.iter().enumerate() {
            new_index[old] = k;
        }
        let atoms: Vec<Atom> =
            order.iter().enumerate().map(|(k, &old)| Atom { index: k, ..self.atoms[old].clone() }).collect();
        let mut bonds: Vec<Bond> = self
            .bonds
            .iter()
            .map(|b| {
                let (x, y) = (new_index[b.begin], new_index[b.end]);
                Bond { begin: x.min(y), end: x.max(y), ..b.clone() }
            })
            .collect();
        bonds.sort_by_key(|b| (b.begin, b.end));
        let mut graph = MolecularGraph::from_parts(atoms, bonds, self.source_smiles.clone());
        super::rings::assign_rings(&mut graph);
        for ring in &mut graph.rings {
            ring.aromatic = ring.bonds.iter().all(|&b| graph.bonds[b].is_aromatic());
        }
        graph
    }

    /// Copy with every hydrogen materialized as an atom (atomic number 1).
    ///
    /// Heavy atoms keep their indices; hydrogens are appended.
    pub fn with_explicit_hydrogens(&self) -> MolecularGraph {
        let mut atoms = self.atoms.clone();
        let mut bonds = self.bonds.clone();
        for i in 0..self.atoms.len() {
            let n_h = self.atoms[i].total_h();
            atoms[i].explicit_h = 0;
            atoms[i].implicit_h = 0;
            for _ in 0..n_h {
                let index = atoms.len();
                atoms.push(Atom {
                    atomic_number: 1,
                    formal_charge: 0,
                    is_aromatic: false,
                    explicit_h: 0,
                    implicit_h: 0,
                    isotope: None,
                    bracket: false,
                    index,
                    position: self.atoms[i].position,
                });
                bonds.push(Bond {
                    begin: i,
                    end: index,
                    order: BondOrder::Single,
                    kekule: BondOrder::Single,
                    in_ring: false,
                });
            }
        }
        let mut graph = MolecularGraph::from_parts(atoms, bonds, self.source_smiles.clone());
        graph.rings = self.rings.clone();
        graph
    }
}
