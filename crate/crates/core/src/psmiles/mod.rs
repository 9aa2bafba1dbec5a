//! P-SMILES parsing into a validated molecular graph.

mod aromatic;
mod error;
mod graph;
mod parse;
mod rings;
mod token;

pub use error::{ErrorReport, SmilesError};
pub use graph::{Atom, Bond, BondOrder, MolecularGraph, Ring};
pub use parse::parse;
pub use rings::find_sssr;
pub use token::{tokenize, AtomSpec, BondSymbol, Token, TokenKind};

pub(crate) use aromatic::count_atom_electrons;
