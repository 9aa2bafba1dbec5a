//! Wildman-Crippen atom-typed logP.

use std::sync::OnceLock;

use super::tables::{crippen_text, rows};
use super::DescriptorError;
use crate::psmiles::MolecularGraph;
use crate::smarts::Smarts;

struct AtomType {
    pattern: Smarts,
    logp: f64,
}

fn atom_types() -> &'static [AtomType] {
    static TYPES: OnceLock<Vec<AtomType>> = OnceLock::new();
    TYPES.get_or_init(|| {
        rows(crippen_text())
            .map(|c| AtomType {
                pattern: Smarts::parse(c[1]).unwrap_or_else(|e| panic!("{}: {e}", c[0])),
                logp: c[2].parse().expect("logP value"),
            })
            .collect()
    })
}

/// Sum of per-atom contributions; each atom, hydrogens included, takes the
/// first type in table order whose pattern matches starting at that atom.
pub fn mol_logp(graph: &MolecularGraph) -> Result<f64, DescriptorError> {
    let explicit = graph.with_explicit_hydrogens();
    let mut total = 0.0;
    for (i, atom) in explicit.atoms().iter().enumerate() {
        if atom.is_wildcard() {
            continue;
        }
        let hit = atom_types().iter().find(|t| t.pattern.matches_at(&explicit, i));
        match hit {
            Some(t) => total += t.logp,
            None => return Err(DescriptorError::UnclassifiedAtomType { atom: i }),
        }
    }
    Ok(total)
}
