//! Ring-template and zig-zag 2D coordinates.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::f64::consts::PI;

use serde::Serialize;

use crate::psmiles::{BondOrder, MolecularGraph, Ring};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    fn polar(angle: f64, radius: f64) -> Self {
        Point::new(radius * angle.cos(), radius * angle.sin())
    }

    pub fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }

    pub fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }

    pub fn scale(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, o: Point) -> f64 {
        self.sub(o).norm()
    }

    fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    fn rotate(self, theta: f64) -> Point {
        let (s, c) = theta.sin_cos();
        Point::new(self.x * c - self.y * s, self.x * s + self.y * c)
    }

    fn unit(self) -> Point {
        let n = self.norm();
        if n < 1e-12 {
            Point::new(1.0, 0.0)
        } else {
            self.scale(1.0 / n)
        }
    }
}

/// Coordinates in bond-length units plus any atom pairs left too close.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Layout {
    pub coordinates: Vec<Point>,
    pub overlaps: Vec<(usize, usize)>,
}

/// Atoms closer than this (in mean bond lengths) count as overlapping.
pub const MIN_SEPARATION: f64 = 0.5;
/// Placement tries to keep new atoms at least this far from existing ones.
const CLEARANCE: f64 = 0.75;
const SWEEP_STEP: f64 = PI / 12.0;
const SWEEP_STEPS: usize = 11;

struct RingSystem {
    atoms: BTreeSet<usize>,
    local: BTreeMap<usize, Point>,
    outward: BTreeMap<usize, Point>,
}

/// Lay out the graph; the result always has coordinates, with `overlaps`
/// listing pairs the bounded rotation sweep could not separate.
pub fn compute_layout(graph: &MolecularGraph) -> Layout {
    let n = graph.atom_count();
    let mut pos: Vec<Option<Point>> = vec![None; n];
    if n == 0 {
        return Layout { coordinates: Vec::new(), overlaps: Vec::new() };
    }
    let systems = ring_systems(graph);
    let mut system_of = vec![usize::MAX; n];
    for (s, sys) in systems.iter().enumerate() {
        for &a in &sys.atoms {
            system_of[a] = s;
        }
    }
    // Zig-zag direction memory: +1 or -1 turn applied at the next chain step.
    let mut turn = vec![1.0f64; n];
    let mut queue = VecDeque::new();

    if system_of[0] != usize::MAX {
        let sys = &systems[system_of[0]];
        for (&a, &p) in &sys.local {
            pos[a] = Some(p);
            queue.push_back(a);
        }
    } else {
        pos[0] = Some(Point::default());
        queue.push_back(0);
    }

    while let Some(a) = queue.pop_front() {
        let here = pos[a].expect("queued atoms are placed");
        let pending: Vec<usize> =
            graph.neighbors(a).iter().map(|&(nb, _)| nb).filter(|&nb| pos[nb].is_none()).collect();
        if pending.is_empty() {
            continue;
        }
        let placed_dirs: Vec<f64> =
            graph.neighbors(a).iter().filter_map(|&(nb, _)| pos[nb].map(|p| p.sub(here).angle())).collect();
        let preferred = preferred_angles(graph, a, &placed_dirs, pending.len(), &systems, &system_of, turn[a]);

        for (k, &nb) in pending.iter().enumerate() {
            if pos[nb].is_some() {
                continue;
            }
            let base = preferred[k];
            let mut candidates = vec![base];
            if placed_dirs.len() == 1 && pending.len() == 1 && system_of[a] == usize::MAX {
                // Mirror image of the zig-zag step.
                let incoming = placed_dirs[0] + PI;
                candidates.push(2.0 * incoming - base);
            }
            for j in 1..=SWEEP_STEPS {
                for sign in [1.0, -1.0] {
                    candidates.push(base + sign * SWEEP_STEP * j as f64);
                }
            }
            let mut chosen = None;
            for &theta in &candidates {
                let proposal = propose(nb, here, theta, &systems, &system_of);
                if clear_of(&proposal, &pos, CLEARANCE) {
                    chosen = Some((theta, proposal));
                    break;
                }
            }
            let (theta, proposal) = chosen.unwrap_or_else(|| (base, propose(nb, here, base, &systems, &system_of)));
            for &(atom, p) in &proposal {
                pos[atom] = Some(p);
                queue.push_back(atom);
            }
            if system_of[nb] == usize::MAX {
                let incoming = placed_dirs.first().map(|d| d + PI).unwrap_or(0.0);
                let bent = normalize_angle(theta - incoming);
                turn[nb] = if bent > 1e-9 {
                    -1.0
                } else if bent < -1e-9 {
                    1.0
                } else {
                    -turn[a]
                };
            }
        }
    }

    let mut coordinates: Vec<Point> = pos.into_iter().map(|p| p.expect("connected graph")).collect();
    normalize_bond_length(graph, &mut coordinates);
    let mut overlaps = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if coordinates[i].distance(coordinates[j]) < MIN_SEPARATION {
                overlaps.push((i, j));
            }
        }
    }
    Layout { coordinates, overlaps }
}

fn normalize_angle(a: f64) -> f64 {
    let mut a = a % (2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    } else if a <= -PI {
        a += 2.0 * PI;
    }
    a
}

fn is_linear_center(graph: &MolecularGraph, atom: usize) -> bool {
    let orders: Vec<BondOrder> = graph.neighbors(atom).iter().map(|&(_, b)| graph.bond(b).order).collect();
    orders.len() == 2 && (orders.contains(&BondOrder::Triple) || orders.iter().all(|&o| o == BondOrder::Double))
}

fn preferred_angles(
    graph: &MolecularGraph,
    atom: usize,
    placed: &[f64],
    k: usize,
    systems: &[RingSystem],
    system_of: &[usize],
    turn: f64,
) -> Vec<f64> {
    if system_of[atom] != usize::MAX {
        let out = systems[system_of[atom]].outward[&atom];
        // `out` is in local frame; recover the placed frame from neighbours.
        let base = placed_outward(placed).unwrap_or_else(|| out.angle());
        let spread = PI / 6.0;
        return (0..k).map(|i| base + spread * (i as f64 - (k as f64 - 1.0) / 2.0)).collect();
    }
    match placed.len() {
        0 => (0..k).map(|i| -PI / 6.0 + 2.0 * PI * i as f64 / k as f64).collect(),
        1 if k == 1 => {
            let incoming = placed[0] + PI;
            if is_linear_center(graph, atom) {
                vec![incoming]
            } else {
                vec![incoming + turn * PI / 3.0]
            }
        }
        _ => {
            let mut sorted: Vec<f64> = placed.iter().map(|&a| normalize_angle(a)).collect();
            sorted.sort_by(f64::total_cmp);
            let (mut gap_start, mut gap) = (sorted[sorted.len() - 1], sorted[0] + 2.0 * PI - sorted[sorted.len() - 1]);
            for w in sorted.windows(2) {
                if w[1] - w[0] > gap + 1e-9 {
                    gap = w[1] - w[0];
                    gap_start = w[0];
                }
            }
            (0..k).map(|i| gap_start + gap * (i as f64 + 1.0) / (k as f64 + 1.0)).collect()
        }
    }
}

/// Direction pointing away from the already placed neighbours.
fn placed_outward(placed: &[f64]) -> Option<f64> {
    if placed.is_empty() {
        return None;
    }
    let sum = placed.iter().fold(Point::default(), |acc, &a| acc.add(Point::polar(a, 1.0)));
    if sum.norm() < 1e-9 {
        return Some(placed[0] + PI / 2.0);
    }
    Some(sum.angle() + PI)
}

/// Positions for `atom` (and its whole ring system, if any) when bonded to
/// `anchor` along direction `theta`.
fn propose(atom: usize, anchor: Point, theta: f64, systems: &[RingSystem], system_of: &[usize]) -> Vec<(usize, Point)> {
    let target = anchor.add(Point::polar(theta, 1.0));
    if system_of[atom] == usize::MAX {
        return vec![(atom, target)];
    }
    let sys = &systems[system_of[atom]];
    let rotation = theta - sys.outward[&atom].angle() + PI;
    let origin = sys.local[&atom];
    sys.local.iter().map(|(&a, &p)| (a, p.sub(origin).rotate(rotation).add(target))).collect()
}

fn clear_of(proposal: &[(usize, Point)], pos: &[Option<Point>], clearance: f64) -> bool {
    proposal.iter().all(|&(_, p)| pos.iter().flatten().all(|&q| p.distance(q) >= clearance))
}

fn normalize_bond_length(graph: &MolecularGraph, coords: &mut [Point]) {
    if graph.bond_count() == 0 {
        return;
    }
    let mean =
        graph.bonds().iter().map(|b| coords[b.begin].distance(coords[b.end])).sum::<f64>() / graph.bond_count() as f64;
    if mean > 1e-12 {
        for p in coords.iter_mut() {
            *p = p.scale(1.0 / mean);
        }
    }
}

fn ring_systems(graph: &MolecularGraph) -> Vec<RingSystem> {
    let rings = graph.rings();
    let mut parent: Vec<usize> = (0..rings.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for i in 0..rings.len() {
        for j in i + 1..rings.len() {
            if rings[i].atoms.iter().any(|a| rings[j].contains_atom(*a)) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<&Ring>> = BTreeMap::new();
    for (i, ring) in rings.iter().enumerate() {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(ring);
    }
    groups.into_values().map(layout_ring_system).collect()
}

fn polygon_radius(n: usize) -> f64 {
    1.0 / (2.0 * (PI / n as f64).sin())
}

fn centroid(points: impl Iterator<Item = Point>) -> Point {
    let (sum, count) = points.fold((Point::default(), 0usize), |(s, c), p| (s.add(p), c + 1));
    sum.scale(1.0 / count.max(1) as f64)
}

fn layout_ring_system(rings: Vec<&Ring>) -> RingSystem {
    let mut local: BTreeMap<usize, Point> = BTreeMap::new();
    let mut placed_rings: Vec<usize> = Vec::new();
    let mut centers: BTreeMap<usize, Point> = BTreeMap::new();

    let first = (0..rings.len()).max_by_key(|&i| (rings[i].len(), std::cmp::Reverse(i))).expect("non-empty system");
    let n = rings[first].len();
    let r = polygon_radius(n);
    for (k, &a) in rings[first].atoms.iter().enumerate() {
        let angle = -PI / 2.0 - PI / n as f64 + 2.0 * PI * k as f64 / n as f64;
        local.insert(a, Point::polar(angle, r));
    }
    centers.insert(first, Point::default());
    placed_rings.push(first);

    while placed_rings.len() < rings.len() {
        let next = (0..rings.len())
            .filter(|i| !placed_rings.contains(i))
            .max_by_key(|&i| {
                let shared = rings[i].atoms.iter().filter(|a| local.contains_key(a)).count();
                (shared, std::cmp::Reverse(i))
            })
            .expect("unplaced ring remains");
        let ring = rings[next];
        let m = ring.len();
        let placed_idx: Vec<usize> = (0..m).filter(|&k| local.contains_key(&ring.atoms[k])).collect();
        let center;
        if placed_idx.len() == 1 {
            let a = ring.atoms[placed_idx[0]];
            let host = placed_rings
                .iter()
                .copied()
                .find(|&p| rings[p].contains_atom(a))
                .expect("shared atom belongs to a placed ring");
            let out = local[&a].sub(centers[&host]).unit();
            center = local[&a].add(out.scale(polygon_radius(m)));
            let start = local[&a].sub(center).angle();
            for step in 1..m {
                let atom = ring.atoms[(placed_idx[0] + step) % m];
                local.entry(atom).or_insert_with(|| {
                    center.add(Point::polar(start + 2.0 * PI * step as f64 / m as f64, polygon_radius(m)))
                });
            }
        } else {
            // Longest run of consecutive placed atoms; new atoms fill the rest.
            let (run_start, run_len) = longest_run(m, |k| local.contains_key(&ring.atoms[k]));
            let u = ring.atoms[(run_start + run_len - 1) % m];
            let v = ring.atoms[run_start];
            let (pu, pv) = (local[&u], local[&v]);
            let hosts = centroid(
                placed_rings
                    .iter()
                    .filter(|&&p| rings[p].contains_atom(u) || rings[p].contains_atom(v))
                    .map(|p| centers[p]),
            );
            let free: Vec<usize> = (1..=m - run_len).map(|s| ring.atoms[(run_start + run_len - 1 + s) % m]).collect();
            let mid = pu.add(pv).scale(0.5);
            let chord = pv.sub(pu);
            let mut normal = Point::new(-chord.y, chord.x).unit();
            if normal.x * (mid.x - hosts.x) + normal.y * (mid.y - hosts.y) < 0.0 {
                normal = normal.scale(-1.0);
            }
            if run_len == 2 {
                let radius = polygon_radius(m);
                let apothem = (radius * radius - chord.norm().powi(2) / 4.0).max(0.0).sqrt();
                center = mid.add(normal.scale(apothem));
                let a0 = pu.sub(center).angle();
                let a1 = pv.sub(center).angle();
                let step = -normalize_angle(a1 - a0);
                for (s, &atom) in free.iter().enumerate() {
                    local.insert(atom, center.add(Point::polar(a0 + step * (s as f64 + 1.0), radius)));
                }
            } else {
                // Bridged: spread the new atoms on an arc over the chord.
                let count = free.len() as f64 + 1.0;
                let height = (count / 2.0).max(0.6);
                for (s, &atom) in free.iter().enumerate() {
                    let t = (s as f64 + 1.0) / count;
                    let along = pu.add(chord.scale(t));
                    local.insert(atom, along.add(normal.scale(height * (PI * t).sin())));
                }
                center = centroid(ring.atoms.iter().map(|a| local[a]));
            }
        }
        centers.insert(next, center);
        placed_rings.push(next);
    }

    let atoms: BTreeSet<usize> = local.keys().copied().collect();
    let outward = atoms
        .iter()
        .map(|&a| {
            let sum = rings
                .iter()
                .enumerate()
                .filter(|(_, r)| r.contains_atom(a))
                .fold(Point::default(), |acc, (i, _)| acc.add(local[&a].sub(centers[&i]).unit()));
            (a, sum.unit())
        })
        .collect();
    RingSystem { atoms, local, outward }
}

/// Start index and length of the longest cyclic run where `placed` holds,
/// for a ring that is not fully placed.
fn longest_run(m: usize, placed: impl Fn(usize) -> bool) -> (usize, usize) {
    let mut best = (0, 0);
    for start in 0..m {
        if !placed(start) || placed((start + m - 1) % m) {
            continue;
        }
        let mut len = 0;
        while len < m && placed((start + len) % m) {
            len += 1;
        }
        if len > best.1 {
            best = (start, len);
        }
    }
    best
}
