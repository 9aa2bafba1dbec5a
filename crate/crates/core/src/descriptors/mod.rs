//! The seventeen descriptors used as tabular features.
//!
//! Wildcard atoms count toward degree and connectivity but contribute nothing
//! to mass, logP, polar surface, Labute surface area or Hall-Kier alpha.

mod counts;
mod crippen;
mod hybrid;
mod surface;
mod tables;
mod topology;

use serde::Serialize;
use thiserror::Error;

use crate::psmiles::MolecularGraph;

pub use counts::{mol_wt, structural_counts, StructuralCounts};
pub use crippen::mol_logp;
pub use hybrid::{hall_kier_alpha, hybridizations, Hybridization};
pub use surface::{labute_asa, tpsa};
pub use tables::{parameter_tables, ParameterTable};
pub use topology::{balaban_j, chi_indices};

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
pub enum DescriptorError {
    #[error("atom {atom} has no heavy neighbours")]
    IsolatedAtom { atom: usize },
    #[error("graph has {heavy_atoms} atoms; at least 2 are required")]
    TooSmall { heavy_atoms: usize },
    #[error("no polar surface fragment matches atom {atom}")]
    UnclassifiedFragment { atom: usize },
    #[error("no parameter class matches atom {atom}")]
    UnclassifiedAtomType { atom: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Descriptor {
    MolWt,
    MolLogP,
    BalabanJ,
    Chi0,
    Chi1,
    HallKierAlpha,
    LabuteASA,
    TPSA,
    FractionCSP3,
    HeavyAtomCount,
    NHOHCount,
    NOCount,
    NumAliphaticRings,
    NumAmideBonds,
    NumAromaticRings,
    NumRotatableBonds,
    NumSaturatedRings,
}

impl Descriptor {
    pub const ALL: [Descriptor; 17] = [
        Descriptor::MolWt,
        Descriptor::MolLogP,
        Descriptor::BalabanJ,
        Descriptor::Chi0,
        Descriptor::Chi1,
        Descriptor::HallKierAlpha,
        Descriptor::LabuteASA,
        Descriptor::TPSA,
        Descriptor::FractionCSP3,
        Descriptor::HeavyAtomCount,
        Descriptor::NHOHCount,
        Descriptor::NOCount,
        Descriptor::NumAliphaticRings,
        Descriptor::NumAmideBonds,
        Descriptor::NumAromaticRings,
        Descriptor::NumRotatableBonds,
        Descriptor::NumSaturatedRings,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Descriptor::MolWt => "MolWt",
            Descriptor::MolLogP => "MolLogP",
            Descriptor::BalabanJ => "BalabanJ",
            Descriptor::Chi0 => "Chi0",
            Descriptor::Chi1 => "Chi1",
            Descriptor::HallKierAlpha => "HallKierAlpha",
            Descriptor::LabuteASA => "LabuteASA",
            Descriptor::TPSA => "TPSA",
            Descriptor::FractionCSP3 => "FractionCSP3",
            Descriptor::HeavyAtomCount => "HeavyAtomCount",
            Descriptor::NHOHCount => "NHOHCount",
            Descriptor::NOCount => "NOCount",
            Descriptor::NumAliphaticRings => "NumAliphaticRings",
            Descriptor::NumAmideBonds => "NumAmideBonds",
            Descriptor::NumAromaticRings => "NumAromaticRings",
            Descriptor::NumRotatableBonds => "NumRotatableBonds",
            Descriptor::NumSaturatedRings => "NumSaturatedRings",
        }
    }

    pub fn from_name(name: &str) -> Option<Descriptor> {
        Descriptor::ALL.into_iter().find(|d| d.name() == name)
    }

    /// Whether the value is a non-negative integer count.
    pub fn is_count(self) -> bool {
        matches!(
            self,
            Descriptor::HeavyAtomCount
                | Descriptor::NHOHCount
                | Descriptor::NOCount
                | Descriptor::NumAliphaticRings
                | Descriptor::NumAmideBonds
                | Descriptor::NumAromaticRings
                | Descriptor::NumRotatableBonds
                | Descriptor::NumSaturatedRings
        )
    }
}

/// One value per descriptor; a failed descriptor is `None` with its error kept.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DescriptorVector {
    values: [Option<f64>; 17],
    errors: Vec<(Descriptor, DescriptorError)>,
}

impl DescriptorVector {
    pub fn get(&self, d: Descriptor) -> Option<f64> {
        self.values[d as usize]
    }

    pub fn errors(&self) -> &[(Descriptor, DescriptorError)] {
        &self.errors
    }

    pub fn is_complete(&self) -> bool {
        self.errors.is_empty() && self.values.iter().all(Option::is_some)
    }

    /// Rebuild from stored values, e.g. a descriptor CSV row. Errors are not
    /// stored, so a missing value only shows up through `is_complete`.
    pub fn from_values(values: [Option<f64>; 17]) -> Self {
        DescriptorVector { values, errors: Vec::new() }
    }

    /// Parse cells written by `csv_cells`; empty cells are missing values.
    pub fn from_csv_cells(cells: &[&str]) -> Option<Self> {
        if cells.len() != 17 {
            return None;
        }
        let mut values = [None; 17];
        for (slot, cell) in values.iter_mut().zip(cells) {
            let t = cell.trim();
            if !t.is_empty() {
                *slot = Some(t.parse().ok()?);
            }
        }
        Some(Self::from_values(values))
    }

    /// Values in column order, `None` where the descriptor failed.
    pub fn values(&self) -> &[Option<f64>; 17] {
        &self.values
    }

    pub fn csv_header() -> Vec<&'static str> {
        Descriptor::ALL.iter().map(|d| d.name()).collect()
    }

    /// Cells for a CSV row; failed descriptors are empty.
    pub fn csv_cells(&self) -> Vec<String> {
        self.values
            .iter()
            .zip(Descriptor::ALL)
            .map(|(v, d)| match v {
                None => String::new(),
                Some(x) if d.is_count() => format!("{}", *x as i64),
                Some(x) => format!("{x:.6}"),
            })
            .collect()
    }
}

pub fn compute_all(graph: &MolecularGraph) -> DescriptorVector {
    let mut values = [None; 17];
    let mut errors = Vec::new();
    let mut record = |d: Descriptor, r: Result<f64, DescriptorError>| match r {
        Ok(v) => values[d as usize] = Some(v),
        Err(e) => errors.push((d, e)),
    };
    record(Descriptor::MolWt, Ok(mol_wt(graph)));
    record(Descriptor::MolLogP, mol_logp(graph));
    record(Descriptor::BalabanJ, balaban_j(graph));
    match chi_indices(graph) {
        Ok((c0, c1)) => {
            record(Descriptor::Chi0, Ok(c0));
            record(Descriptor::Chi1, Ok(c1));
        }
        Err(e) => {
            record(Descriptor::Chi0, Err(e.clone()));
            record(Descriptor::Chi1, Err(e));
        }
    }
    record(Descriptor::HallKierAlpha, hall_kier_alpha(graph));
    record(Descriptor::LabuteASA, labute_asa(graph));
    record(Descriptor::TPSA, tpsa(graph));
    let c = structural_counts(graph);
    record(Descriptor::FractionCSP3, Ok(c.fraction_csp3));
    record(Descriptor::HeavyAtomCount, Ok(c.heavy_atom_count as f64));
    record(Descriptor::NHOHCount, Ok(c.nhoh_count as f64));
    record(Descriptor::NOCount, Ok(c.no_count as f64));
    record(Descriptor::NumAliphaticRings, Ok(c.num_aliphatic_rings as f64));
    record(Descriptor::NumAmideBonds, Ok(c.num_amide_bonds as f64));
    record(Descriptor::NumAromaticRings, Ok(c.num_aromatic_rings as f64));
    record(Descriptor::NumRotatableBonds, Ok(c.num_rotatable_bonds as f64));
    record(Descriptor::NumSaturatedRings, Ok(c.num_saturated_rings as f64));
    DescriptorVector { values, errors }
}
