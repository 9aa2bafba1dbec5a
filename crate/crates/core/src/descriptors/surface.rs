//! Fragment-based polar surface area and Labute's approximate surface area.

use std::f64::consts::PI;
use std::sync::OnceLock;

use super::tables::{rows, tpsa_text};
use super::DescriptorError;
use crate::elements;
use crate::psmiles::{BondOrder, MolecularGraph};

/// `None` in a condition accepts any value.
#[derive(Debug, Clone)]
struct TpsaRow {
    element: u8,
    charge: i8,
    neighbors: usize,
    hydrogens: u32,
    single: Option<usize>,
    double: Option<usize>,
    triple: Option<usize>,
    aromatic: Option<usize>,
    in_three_ring: Option<bool>,
    value: f64,
}

fn tpsa_rows() -> &'static [TpsaRow] {
    static ROWS: OnceLock<Vec<TpsaRow>> = OnceLock::new();
    ROWS.get_or_init(|| {
        let count = |s: &str| (s != "*").then(|| s.parse().expect("count"));
        rows(tpsa_text())
            .map(|c| TpsaRow {
                element: elements::by_symbol(c[0]).expect("element").atomic_number,
                charge: c[1].parse().expect("charge"),
                neighbors: c[2].parse().expect("neighbours"),
                hydrogens: c[3].parse().expect("hydrogens"),
                single: count(c[4]),
                double: count(c[5]),
                triple: count(c[6]),
                aromatic: count(c[7]),
                in_three_ring: match c[8] {
                    "y" => Some(true),
                    "n" => Some(false),
                    _ => None,
                },
                value: c[9].parse().expect("value"),
            })
            .collect()
    })
}

/// Sum of polar fragment contributions over nitrogen and oxygen atoms.
pub fn tpsa(graph: &MolecularGraph) -> Result<f64, DescriptorError> {
    let mut total = 0.0;
    for (i, atom) in graph.atoms().iter().enumerate() {
        if atom.atomic_number != 7 && atom.atomic_number != 8 {
            continue;
        }
        let mut orders = [0usize; 4];
        for &(_, b) in graph.neighbors(i) {
            orders[match graph.bond(b).order {
                BondOrder::Single => 0,
                BondOrder::Double => 1,
                BondOrder::Triple => 2,
                BondOrder::Aromatic => 3,
            }] += 1;
        }
        let fits = |want: Option<usize>, have: usize| want.is_none_or(|w| w == have);
        let in3 = graph.is_atom_in_ring_of_size(i, 3);
        let row = tpsa_rows().iter().find(|r| {
            r.element == atom.atomic_number
                && r.charge == atom.formal_charge
                && r.neighbors == graph.degree(i)
                && r.hydrogens == atom.total_h()
                && fits(r.single, orders[0])
                && fits(r.double, orders[1])
                && fits(r.triple, orders[2])
                && fits(r.aromatic, orders[3])
                && r.in_three_ring.is_none_or(|w| w == in3)
        });
        match row {
            Some(r) => total += r.value,
            None => return Err(DescriptorError::UnclassifiedFragment { atom: i }),
        }
    }
    Ok(total)
}

/// Labute's approximate surface area from bonded sphere overlaps.
///
/// Every atom also receives one hydrogen overlap term regardless of how many
/// hydrogens it carries, and a single pooled hydrogen contribution is added.
pub fn labute_asa(graph: &MolecularGraph) -> Result<f64, DescriptorError> {
    let mut radii = Vec::with_capacity(graph.atom_count());
    for (i, atom) in graph.atoms().iter().enumerate() {
        if elements::element(atom.atomic_number).is_none() {
            return Err(DescriptorError::UnclassifiedAtomType { atom: i });
        }
        radii.push(elements::rb0(atom.atomic_number));
    }
    let overlap = |ri: f64, rj: f64, bij: f64| -> (f64, f64) {
        let dij = (ri - rj).abs().max(bij).min(ri + rj);
        if dij == 0.0 {
            return (0.0, 0.0);
        }
        (rj * rj - (ri - dij).powi(2) / dij, ri * ri - (rj - dij).powi(2) / dij)
    };
    let mut v = vec![0.0; radii.len()];
    for bond in graph.bonds() {
        let (ri, rj) = (radii[bond.begin], radii[bond.end]);
        let shrink = match bond.order {
            BondOrder::Single => 0.0,
            BondOrder::Aromatic => 0.1,
            BondOrder::Double => 0.2,
            BondOrder::Triple => 0.3,
        };
        let (to_i, to_j) = overlap(ri, rj, ri + rj - shrink);
        v[bond.begin] += to_i;
        v[bond.end] += to_j;
    }
    let rh = elements::rb0(1);
    let mut h_pool = 0.0;
    for (vi, &ri) in v.iter_mut().zip(&radii) {
        let (to_i, to_h) = overlap(ri, rh, ri + rh);
        *vi += to_i;
        h_pool += to_h;
    }
    let heavy: f64 = radii.iter().zip(&v).map(|(&r, &vi)| PI * r * (4.0 * r - vi)).sum();
    Ok(heavy + PI * rh * (4.0 * rh - h_pool))
}
