//! Connectivity indices and Balaban's J.

use std::collections::VecDeque;

use super::DescriptorError;
use crate::psmiles::MolecularGraph;

/// Kier-Hall zero- and first-order connectivity indices over all non-hydrogen
/// atoms, wildcards included.
pub fn chi_indices(graph: &MolecularGraph) -> Result<(f64, f64), DescriptorError> {
    let delta: Vec<f64> = (0..graph.atom_count()).map(|i| graph.degree(i) as f64).collect();
    if let Some(atom) = delta.iter().position(|&d| d == 0.0) {
        return Err(DescriptorError::IsolatedAtom { atom });
    }
    let chi0 = delta.iter().map(|d| d.powf(-0.5)).sum();
    let chi1 = graph.bonds().iter().map(|b| (delta[b.begin] * delta[b.end]).powf(-0.5)).sum();
    Ok((chi0, chi1))
}

/// J = m / (mu + 1) * sum over bonds of (s_i s_j)^(-1/2), with s the row sums
/// of the topological distance matrix.
pub fn balaban_j(graph: &MolecularGraph) -> Result<f64, DescriptorError> {
    let n = graph.atom_count();
    if n < 2 {
        return Err(DescriptorError::TooSmall { heavy_atoms: n });
    }
    let row_sums: Vec<f64> = (0..n).map(|i| distance_row_sum(graph, i)).collect();
    let m = graph.bond_count() as f64;
    let mu = graph.cyclomatic_number() as f64;
    let sum: f64 = graph.bonds().iter().map(|b| (row_sums[b.begin] * row_sums[b.end]).powf(-0.5)).sum();
    Ok(m / (mu + 1.0) * sum)
}

fn distance_row_sum(graph: &MolecularGraph, source: usize) -> f64 {
    let mut dist = vec![usize::MAX; graph.atom_count()];
    dist[source] = 0;
    let mut queue = VecDeque::from([source]);
    let mut total = 0usize;
    while let Some(a) = queue.pop_front() {
        total += dist[a];
        for &(nb, _) in graph.neighbors(a) {
            if dist[nb] == usize::MAX {
                dist[nb] = dist[a] + 1;
                queue.push_back(nb);
            }
        }
    }
    total as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::psmiles::parse;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn chi_small_alkanes() {
        let (c0, c1) = chi_indices(&parse("CC").unwrap()).unwrap();
        assert!(close(c0, 2.0, 1e-12) && close(c1, 1.0, 1e-12));
        let (c0, c1) = chi_indices(&parse("CCC").unwrap()).unwrap();
        assert!(close(c0, 2.7071, 1e-4), "{c0}");
        assert!(close(c1, std::f64::consts::SQRT_2, 1e-12), "{c1}");
    }

    #[test]
    fn chi_single_atom_is_isolated() {
        assert_eq!(chi_indices(&parse("C").unwrap()), Err(DescriptorError::IsolatedAtom { atom: 0 }));
    }

    #[test]
    fn balaban_examples() {
        assert!(close(balaban_j(&parse("CC").unwrap()).unwrap(), 1.0, 1e-12));
        let butane = balaban_j(&parse("CCCC").unwrap()).unwrap();
        assert!(close(butane, 1.9747, 1e-4), "{butane}");
        assert!(close(butane, 3.0 * (2.0 / 24f64.sqrt() + 0.25), 1e-12));
        assert_eq!(balaban_j(&parse("C").unwrap()), Err(DescriptorError::TooSmall { heavy_atoms: 1 }));
    }

    #[test]
    fn balaban_benzene_regression() {
        // Row sums are all 9 and the ring adds one cycle: 6/2 * 6/9.
        let j = balaban_j(&parse("c1ccccc1").unwrap()).unwrap();
        assert!(close(j, 2.0, 1e-12), "{j}");
    }
}
