use polymm_core::psmiles::MolecularGraph;

/// Dense Floyd-Warshall distances and the textbook formulas, written without
/// any of the library's traversal code.
pub fn brute_force(graph: &MolecularGraph) -> (f64, f64, f64) {
    let n = graph.atom_count();
    let inf = u32::MAX / 4;
    let mut d = vec![vec![inf; n]; n];
    let mut adjacent = vec![vec![false; n]; n];
    for i in 0..n {
        d[i][i] = 0;
    }
    for b in graph.bonds() {
        d[b.begin][b.end] = 1;
        d[b.end][b.begin] = 1;
        adjacent[b.begin][b.end] = true;
        adjacent[b.end][b.begin] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    let deg: Vec<f64> = (0..n).map(|i| adjacent[i].iter().filter(|&&x| x).count() as f64).collect();
    let s: Vec<f64> = (0..n).map(|i| d[i].iter().map(|&x| x as f64).sum()).collect();
    let chi0 = deg.iter().map(|x| 1.0 / x.sqrt()).sum();
    let mut chi1 = 0.0;
    let mut edge_sum = 0.0;
    let mut m = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            if adjacent[i][j] {
                chi1 += 1.0 / (deg[i] * deg[j]).sqrt();
                edge_sum += 1.0 / (s[i] * s[j]).sqrt();
                m += 1.0;
            }
        }
    }
    let mu = m - n as f64 + 1.0;
    (chi0, chi1, m / (mu + 1.0) * edge_sum)
}
