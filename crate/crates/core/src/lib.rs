//! Polymer SMILES parsing, canonicalization, descriptors and depiction.

pub mod canon;
pub mod depict;
pub mod descriptors;
pub mod elements;
pub mod psmiles;
pub mod smarts;
