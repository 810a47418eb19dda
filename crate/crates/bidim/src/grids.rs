//! Meshes, walls, annulus walls, cylindrical meshes and surface-wall segments.
//!
//! Paths are explicit vertex sequences. Crossing structure is recomputed from
//! the sequences on demand and never stored.

use crate::error::{Error, Result};
use crate::graph::{edge, AnnotatedGraph, Edge, Separation, SideTag, VSet, Vertex};
use crate::report::{Kind, ValidityReport};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

pub type Path = Vec<Vertex>;

fn path_edges(p: &[Vertex]) -> impl Iterator<Item = Edge> + '_ {
    p.windows(2).map(|w| edge(w[0], w[1]))
}

fn cycle_edges(c: &[Vertex]) -> impl Iterator<Item = Edge> + '_ {
    let closing = (c.len() > 2).then(|| edge(c[c.len() - 1], c[0]));
    path_edges(c).chain(closing)
}

fn union_graph<'a>(paths: impl IntoIterator<Item = &'a Path>, cycles: impl IntoIterator<Item = &'a Path>) -> AnnotatedGraph {
    let mut g = AnnotatedGraph::new();
    for p in paths {
        p.iter().for_each(|&v| g.add_vertex(v));
        for (u, v) in path_edges(p) {
            g.add_edge(u, v).expect("paths have no self-loops");
        }
    }
    for c in cycles {
        c.iter().for_each(|&v| g.add_vertex(v));
        for (u, v) in cycle_edges(c) {
            g.add_edge(u, v).expect("cycles have no self-loops");
        }
    }
    g
}

fn check_simple(report: &mut ValidityReport, what: &str, p: &[Vertex], host: Option<&AnnotatedGraph>) {
    if p.is_empty() {
        report.push(Kind::PathShape, format!("{what} is empty"));
        return;
    }
    let distinct: VSet = p.iter().copied().collect();
    if distinct.len() != p.len() {
        report.push(Kind::PathShape, format!("{what} repeats a vertex"));
    }
    if let Some(g) = host {
        if let Some(w) = p.windows(2).find(|w| !g.has_edge(w[0], w[1])) {
            report.push(Kind::PathShape, format!("{what} uses non-edge {}-{}", w[0], w[1]));
        }
    }
}

fn check_disjoint(report: &mut ValidityReport, what: &str, family: &[Path]) {
    let mut owner: BTreeMap<Vertex, usize> = BTreeMap::new();
    for (i, p) in family.iter().enumerate() {
        for &v in p {
            if let Some(&j) = owner.get(&v) {
                if j != i {
                    report.push(Kind::Overlap, format!("{what} {} and {} share vertex {v}", j + 1, i + 1));
                }
            } else {
                owner.insert(v, i);
            }
        }
    }
}

/// Inclusive index ranges of `P_i ∩ Q_j` inside `P_i` and inside `Q_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Crossing {
    pub p: (usize, usize),
    pub q: (usize, usize),
}

fn contiguous(mut idx: Vec<usize>) -> Option<(usize, usize)> {
    idx.sort_unstable();
    let (&lo, &hi) = (idx.first()?, idx.last()?);
    (hi - lo + 1 == idx.len()).then_some((lo, hi))
}

fn crossing(p: &[Vertex], q: &[Vertex], qpos: &BTreeMap<Vertex, usize>) -> std::result::Result<Crossing, String> {
    let shared: Vec<(usize, usize)> =
        p.iter().enumerate().filter_map(|(i, v)| qpos.get(v).map(|&j| (i, j))).collect();
    if shared.is_empty() {
        return Err("paths do not meet".into());
    }
    let pr = contiguous(shared.iter().map(|s| s.0).collect()).ok_or("intersection not contiguous")?;
    let qr = contiguous(shared.iter().map(|s| s.1).collect()).ok_or("intersection not contiguous")?;
    let a = &p[pr.0..=pr.1];
    let b = &q[qr.0..=qr.1];
    if a != b && !a.iter().eq(b.iter().rev()) {
        return Err("intersection is not a common subpath".into());
    }
    Ok(Crossing { p: pr, q: qr })
}

/// An `(n × m)`-mesh given by oriented horizontal and vertical paths.
///
/// Horizontal path `i` meets the vertical paths in increasing index order
/// along its own direction, and vice versa.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mesh {
    pub horizontal: Vec<Path>,
    pub vertical: Vec<Path>,
}

/// The unique cycle in `P_i ∪ P_{i+1} ∪ Q_j ∪ Q_{j+1}`, with 1-based coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Brick {
    pub i: usize,
    pub j: usize,
    pub cycle: Vec<Vertex>,
}

impl Brick {
    pub fn vertices(&self) -> VSet {
        self.cycle.iter().copied().collect()
    }

    pub fn edges(&self) -> BTreeSet<Edge> {
        cycle_edges(&self.cycle).collect()
    }
}

fn two_core_cycle(edges: &BTreeSet<Edge>) -> Option<Vec<Vertex>> {
    let mut adj: BTreeMap<Vertex, BTreeSet<Vertex>> = BTreeMap::new();
    for &(u, v) in edges {
        adj.entry(u).or_default().insert(v);
        adj.entry(v).or_default().insert(u);
    }
    loop {
        let leaves: Vec<Vertex> = adj.iter().filter(|(_, n)| n.len() < 2).map(|(&v, _)| v).collect();
        if leaves.is_empty() {
            break;
        }
        for v in leaves {
            if let Some(ns) = adj.remove(&v) {
                for u in ns {
                    if let Some(s) = adj.get_mut(&u) {
                        s.remove(&v);
                    }
                }
            }
        }
    }
    if adj.is_empty() || adj.values().any(|n| n.len() != 2) {
        return None;
    }
    let start = *adj.keys().next()?;
    let mut cycle = vec![start];
    let mut prev = start;
    let mut cur = *adj[&start].iter().next()?;
    while cur != start {
        cycle.push(cur);
        let next = *adj[&cur].iter().find(|&&w| w != prev)?;
        prev = cur;
        cur = next;
    }
    (cycle.len() == adj.len()).then_some(cycle)
}

impl Mesh {
    pub fn new(horizontal: Vec<Path>, vertical: Vec<Path>) -> Self {
        Self { horizontal, vertical }
    }

    pub fn rows(&self) -> usize {
        self.horizontal.len()
    }

    pub fn cols(&self) -> usize {
        self.vertical.len()
    }

    /// Union of all paths, with no red vertices.
    pub fn graph(&self) -> AnnotatedGraph {
        union_graph(self.horizontal.iter().chain(&self.vertical), [])
    }

    pub fn vertex_set(&self) -> VSet {
        self.horizontal.iter().chain(&self.vertical).flatten().copied().collect()
    }

    pub fn edge_set(&self) -> BTreeSet<Edge> {
        self.horizontal.iter().chain(&self.vertical).flat_map(|p| path_edges(p)).collect()
    }

    /// Checks every mesh condition; `host` additionally checks that path steps are edges.
    pub fn validate(&self, host: Option<&AnnotatedGraph>) -> ValidityReport {
        let mut report = ValidityReport::new();
        let (n, m) = (self.rows(), self.cols());
        if n < 2 || m < 2 {
            report.push(Kind::PathShape, format!("mesh needs at least 2 paths per family, has {n}x{m}"));
            return report;
        }
        for (i, p) in self.horizontal.iter().enumerate() {
            check_simple(&mut report, &format!("horizontal path {}", i + 1), p, host);
        }
        for (j, q) in self.vertical.iter().enumerate() {
            check_simple(&mut report, &format!("vertical path {}", j + 1), q, host);
        }
        if !report.is_valid() {
            return report;
        }
        check_disjoint(&mut report, "horizontal paths", &self.horizontal);
        check_disjoint(&mut report, "vertical paths", &self.vertical);
        let table = match self.crossing_table() {
            Ok(t) => t,
            Err(e) => {
                report.push(Kind::Crossing, e);
                return report;
            }
        };
        for i in 0..n {
            for j in 1..m {
                if table[i][j - 1].p.1 >= table[i][j].p.0 {
                    report.push(Kind::CrossingOrder, format!("horizontal path {} meets vertical {} before {}", i + 1, j + 1, j));
                }
            }
        }
        for j in 0..m {
            for i in 1..n {
                if table[i - 1][j].q.1 >= table[i][j].q.0 {
                    report.push(Kind::CrossingOrder, format!("vertical path {} meets horizontal {} before {}", j + 1, i + 1, i));
                }
            }
        }
        for i in 0..n {
            let (first, last) = (table[i][0].p, table[i][m - 1].p);
            if first != (0, 0) || last != (self.horizontal[i].len() - 1, self.horizontal[i].len() - 1) {
                report.push(Kind::Endpoint, format!("horizontal path {} is not a path between the outer verticals", i + 1));
            }
        }
        for j in 0..m {
            let (first, last) = (table[0][j].q, table[n - 1][j].q);
            if first != (0, 0) || last != (self.vertical[j].len() - 1, self.vertical[j].len() - 1) {
                report.push(Kind::Endpoint, format!("vertical path {} is not a path between the outer horizontals", j + 1));
            }
        }
        report
    }

    /// `table[i][j]` locates `P_{i+1} ∩ Q_{j+1}`.
    pub fn crossing_table(&self) -> std::result::Result<Vec<Vec<Crossing>>, String> {
        let qpos: Vec<BTreeMap<Vertex, usize>> =
            self.vertical.iter().map(|q| q.iter().enumerate().map(|(i, &v)| (v, i)).collect()).collect();
        self.horizontal
            .iter()
            .enumerate()
            .map(|(i, p)| {
                self.vertical
                    .iter()
                    .enumerate()
                    .map(|(j, q)| {
                        crossing(p, q, &qpos[j]).map_err(|e| format!("P{} and Q{}: {e}", i + 1, j + 1))
                    })
                    .collect()
            })
            .collect()
    }

    /// The crossing table of a valid mesh.
    pub fn checked_table(&self) -> Result<Vec<Vec<Crossing>>> {
        let report = self.validate(None);
        if !report.is_valid() {
            return Err(Error::InvalidModel(format!("not a mesh: {report}")));
        }
        self.crossing_table().map_err(Error::InvalidModel)
    }

    pub fn brick_count(&self) -> usize {
        (self.rows().saturating_sub(1)) * (self.cols().saturating_sub(1))
    }

    /// The `(i, j)`-brick, 1-based.
    pub fn brick(&self, i: usize, j: usize) -> Result<Brick> {
        if i == 0 || j == 0 || i >= self.rows() || j >= self.cols() {
            return Err(Error::OutOfRange(format!(
                "brick ({i},{j}) of a {}x{} mesh",
                self.rows(),
                self.cols()
            )));
        }
        let t = self.checked_table()?;
        Ok(self.brick_with(&t, i, j))
    }

    /// The `(i, j)`-brick from a precomputed crossing table.
    pub fn brick_with(&self, t: &[Vec<Crossing>], i: usize, j: usize) -> Brick {
        let (a, b) = (i - 1, j - 1);
        let mut edges = BTreeSet::new();
        for r in [a, a + 1] {
            let p = &self.horizontal[r];
            edges.extend(path_edges(&p[t[r][b].p.0..=t[r][b + 1].p.1]));
        }
        for c in [b, b + 1] {
            let q = &self.vertical[c];
            edges.extend(path_edges(&q[t[a][c].q.0..=t[a + 1][c].q.1]));
        }
        let cycle = two_core_cycle(&edges).expect("a valid mesh has a cycle in every brick");
        Brick { i, j, cycle }
    }

    /// All bricks in row-major order.
    pub fn bricks(&self) -> Result<Vec<Brick>> {
        let t = self.checked_table()?;
        Ok((1..self.rows())
            .flat_map(|i| (1..self.cols()).map(move |j| (i, j)))
            .map(|(i, j)| self.brick_with(&t, i, j))
            .collect())
    }

    /// Vertices of `P_1 ∪ P_n ∪ Q_1 ∪ Q_m`.
    pub fn perimeter(&self) -> VSet {
        let (n, m) = (self.rows(), self.cols());
        [&self.horizontal[0], &self.horizontal[n - 1], &self.vertical[0], &self.vertical[m - 1]]
            .into_iter()
            .flatten()
            .copied()
            .collect()
    }

    /// The perimeter as a closed vertex sequence.
    pub fn perimeter_cycle(&self) -> Result<Vec<Vertex>> {
        self.checked_table()?;
        Ok(two_core_cycle(&self.perimeter_edges()).expect("a valid mesh has a perimeter cycle"))
    }

    pub fn perimeter_edges(&self) -> BTreeSet<Edge> {
        let (n, m) = (self.rows(), self.cols());
        [&self.horizontal[0], &self.horizontal[n - 1], &self.vertical[0], &self.vertical[m - 1]]
            .into_iter()
            .flat_map(|p| path_edges(p))
            .collect()
    }

    /// Submesh on 1-based strictly increasing index lists.
    ///
    /// Paths are trimmed so that boundary paths of the result meet only at
    /// single vertices, which keeps every output a mesh in the strict sense.
    pub fn submesh(&self, rows: &[usize], cols: &[usize]) -> Result<Mesh> {
        let in_range = |idx: &[usize], bound: usize| {
            idx.len() >= 2 && idx.windows(2).all(|w| w[0] < w[1]) && idx[0] >= 1 && idx[idx.len() - 1] <= bound
        };
        if !in_range(rows, self.rows()) || !in_range(cols, self.cols()) {
            return Err(Error::OutOfRange(format!("index lists {rows:?} x {cols:?}")));
        }
        let t = self.checked_table()?;
        let rows: Vec<usize> = rows.iter().map(|r| r - 1).collect();
        let cols: Vec<usize> = cols.iter().map(|c| c - 1).collect();
        let (r0, rl) = (rows[0], rows[rows.len() - 1]);
        let (c0, cl) = (cols[0], cols[cols.len() - 1]);
        let vertical = cols
            .iter()
            .map(|&c| self.vertical[c][t[r0][c].q.1..=t[rl][c].q.0].to_vec())
            .collect();
        let horizontal = rows
            .iter()
            .map(|&r| {
                let p = &self.horizontal[r];
                let at = |v: Vertex| p.iter().position(|&x| x == v).expect("crossing vertex lies on the path");
                let (start, end) = if r == r0 {
                    (at(self.vertical[c0][t[r][c0].q.1]), at(self.vertical[cl][t[r][cl].q.1]))
                } else if r == rl {
                    (at(self.vertical[c0][t[r][c0].q.0]), at(self.vertical[cl][t[r][cl].q.0]))
                } else {
                    (t[r][c0].p.1, t[r][cl].p.0)
                };
                p[start..=end].to_vec()
            })
            .collect();
        Ok(Mesh { horizontal, vertical })
    }

    /// Side of `sep` whose strict part holds both a horizontal and a vertical path.
    pub fn majority(&self, sep: &Separation) -> Result<SideTag> {
        let bound = self.rows().min(self.cols());
        if sep.order() >= bound {
            return Err(Error::OrderTooLarge { order: sep.order(), bound });
        }
        for tag in [SideTag::B, SideTag::A] {
            let strict = sep.strict(tag);
            let holds = |ps: &[Path]| ps.iter().any(|p| p.iter().all(|v| strict.contains(v)));
            if holds(&self.horizontal) && holds(&self.vertical) {
                return Ok(tag);
            }
        }
        Err(Error::Precondition("no side holds a horizontal and a vertical path".into()))
    }
}

/// Vertex ids of an `n × m` grid block starting after `base`; `ids[i][j]` is `(i+1, j+1)`.
pub fn grid_ids(n: usize, m: usize, base: Vertex) -> Vec<Vec<Vertex>> {
    (0..n).map(|i| (0..m).map(|j| base + (i * m + j) as Vertex + 1).collect()).collect()
}

/// Edges of an elementary wall on the grid block `rows`; closed rows wrap around.
pub fn wall_edges(rows: &[Vec<Vertex>], closed: bool) -> BTreeSet<Edge> {
    let mut e = BTreeSet::new();
    for (i, row) in rows.iter().enumerate() {
        e.extend(path_edges(row));
        if closed && row.len() > 2 {
            e.insert(edge(row[0], row[row.len() - 1]));
        }
        if let Some(next) = rows.get(i + 1) {
            for c in (0..row.len()).filter(|c| c % 2 == i % 2) {
                e.insert(edge(row[c], next[c]));
            }
        }
    }
    e
}

/// The `j`-th zigzag vertical path (0-based) through columns `2j, 2j+1`, top to bottom.
pub fn zigzag(rows: &[Vec<Vertex>], j: usize) -> Path {
    let down = |i: usize| 2 * j + i % 2;
    let n = rows.len();
    let mut p = vec![rows[0][down(0)]];
    for i in 1..n {
        p.push(rows[i][down(i - 1)]);
        if i + 1 < n {
            p.push(rows[i][down(i)]);
        }
    }
    p
}

/// The `(n × m)`-grid: vertex `(i, j)` has id `(i−1)m + j`.
pub fn make_grid(n: usize, m: usize) -> Result<Mesh> {
    if n < 2 || m < 2 {
        return Err(Error::ParameterRange(format!("grid needs n, m >= 2, got {n}x{m}")));
    }
    let rows = grid_ids(n, m, 0);
    let cols = (0..m).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
    Ok(Mesh::new(rows, cols))
}

/// The elementary `(n × m)`-wall as a mesh with `n` rows and `m` zigzag verticals.
///
/// Built on the `(n × 2m)`-grid; vertices outside the mesh paths are dropped.
pub fn make_elementary_wall(n: usize, m: usize) -> Result<Mesh> {
    if n < 2 || m < 2 {
        return Err(Error::ParameterRange(format!("wall needs n, m >= 2, got {n}x{m}")));
    }
    let rows = grid_ids(n, 2 * m, 0);
    let vertical: Vec<Path> = (0..m).map(|j| zigzag(&rows, j)).collect();
    let first: VSet = vertical[0].iter().copied().collect();
    let last: VSet = vertical[m - 1].iter().copied().collect();
    let horizontal = rows
        .iter()
        .map(|row| {
            let s = row.iter().rposition(|v| first.contains(v)).expect("zigzag meets every row");
            let e = row.iter().position(|v| last.contains(v)).expect("zigzag meets every row");
            row[s..=e].to_vec()
        })
        .collect();
    Ok(Mesh::new(horizontal, vertical))
}

/// Concentric cycles crossed by radial paths.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CylindricalMesh {
    /// Innermost first.
    pub cycles: Vec<Path>,
    /// Each rail runs from the first cycle to the last.
    pub rails: Vec<Path>,
}

fn cyclic_arc(idx: &[usize], len: usize) -> Option<(usize, usize)> {
    let set: BTreeSet<usize> = idx.iter().copied().collect();
    if set.len() == len {
        return Some((0, len));
    }
    let start = *set.iter().find(|&&i| !set.contains(&((i + len - 1) % len)))?;
    let mut k = 0;
    while set.contains(&((start + k) % len)) {
        k += 1;
    }
    (k == set.len()).then_some((start, k))
}

impl CylindricalMesh {
    pub fn graph(&self) -> AnnotatedGraph {
        union_graph(&self.rails, &self.cycles)
    }

    /// Checks the cylindrical-mesh conditions. The strict flags demand that the
    /// outer cycles, respectively the outer rails, meet every crossing path in one vertex.
    pub fn validate(&self, host: Option<&AnnotatedGraph>, strict_cycles: bool, strict_rails: bool) -> ValidityReport {
        let mut report = ValidityReport::new();
        let (m, n) = (self.cycles.len(), self.rails.len());
        if m < 2 || n < 2 {
            report.push(Kind::PathShape, format!("needs at least 2 cycles and 2 rails, has {m} and {n}"));
            return report;
        }
        for (i, c) in self.cycles.iter().enumerate() {
            check_simple(&mut report, &format!("cycle {}", i + 1), c, host);
            if c.len() < 3 {
                report.push(Kind::PathShape, format!("cycle {} has fewer than 3 vertices", i + 1));
            } else if let Some(g) = host {
                if !g.has_edge(c[0], c[c.len() - 1]) {
                    report.push(Kind::PathShape, format!("cycle {} is not closed", i + 1));
                }
            }
        }
        for (j, p) in self.rails.iter().enumerate() {
            check_simple(&mut report, &format!("rail {}", j + 1), p, host);
        }
        if !report.is_valid() {
            return report;
        }
        check_disjoint(&mut report, "cycles", &self.cycles);
        check_disjoint(&mut report, "rails", &self.rails);
        for (i, c) in self.cycles.iter().enumerate() {
            let cpos: BTreeMap<Vertex, usize> = c.iter().enumerate().map(|(k, &v)| (v, k)).collect();
            let mut arcs = Vec::new();
            for (j, p) in self.rails.iter().enumerate() {
                let shared: Vec<usize> = p.iter().filter_map(|v| cpos.get(v).copied()).collect();
                let on_p: Vec<usize> = p.iter().enumerate().filter(|(_, v)| cpos.contains_key(v)).map(|(k, _)| k).collect();
                let boundary = (strict_cycles && (i == 0 || i == m - 1)) || (strict_rails && (j == 0 || j == n - 1));
                match (cyclic_arc(&shared, c.len()), contiguous(on_p)) {
                    (Some(arc), Some(_)) => {
                        if boundary && shared.len() != 1 {
                            report.push(Kind::Crossing, format!("cycle {} meets rail {} in {} vertices", i + 1, j + 1, shared.len()));
                        }
                        arcs.push((arc.0, j));
                    }
                    _ => report.push(Kind::Crossing, format!("cycle {} and rail {} do not meet in a path", i + 1, j + 1)),
                }
            }
            if arcs.len() == n {
                let base = arcs[0].0;
                let mut order: Vec<(usize, usize)> = arcs.iter().map(|&(s, j)| ((s + c.len() - base) % c.len(), j)).collect();
                order.sort();
                let seq: Vec<usize> = order.iter().map(|&(_, j)| j).collect();
                let forward: Vec<usize> = (0..n).collect();
                let backward: Vec<usize> = std::iter::once(0).chain((1..n).rev()).collect();
                if seq != forward && seq != backward {
                    report.push(Kind::CrossingOrder, format!("cycle {} meets the rails in order {seq:?}", i + 1));
                }
            }
        }
        for (j, p) in self.rails.iter().enumerate() {
            let mut last = None;
            for (i, c) in self.cycles.iter().enumerate() {
                let cset: VSet = c.iter().copied().collect();
                let Some(first_pos) = p.iter().position(|v| cset.contains(v)) else { continue };
                if let Some(prev) = last {
                    if first_pos <= prev {
                        report.push(Kind::CrossingOrder, format!("rail {} meets cycle {} out of order", j + 1, i + 1));
                    }
                }
                last = Some(p.iter().rposition(|v| cset.contains(v)).unwrap_or(first_pos));
            }
            let first_cycle: VSet = self.cycles[0].iter().copied().collect();
            let last_cycle: VSet = self.cycles[m - 1].iter().copied().collect();
            if !first_cycle.contains(&p[0]) || !last_cycle.contains(&p[p.len() - 1]) {
                report.push(Kind::Endpoint, format!("rail {} does not run from the first to the last cycle", j + 1));
            }
        }
        report
    }

    /// Side whose strict part holds a whole cycle and a whole rail.
    pub fn majority(&self, sep: &Separation) -> Result<SideTag> {
        let bound = self.cycles.len().min(self.rails.len());
        if sep.order() >= bound {
            return Err(Error::OrderTooLarge { order: sep.order(), bound });
        }
        for tag in [SideTag::B, SideTag::A] {
            let strict = sep.strict(tag);
            let holds = |ps: &[Path]| ps.iter().any(|p| p.iter().all(|v| strict.contains(v)));
            if holds(&self.cycles) && holds(&self.rails) {
                return Ok(tag);
            }
        }
        Err(Error::Precondition("no side holds a cycle and a rail".into()))
    }
}

/// `m` concentric cycles of length `n` crossed by `n` straight rails.
/// Cycle `i` and rail `j` (1-based) meet at id `(i−1)n + j`.
pub fn make_cylindrical_mesh(n: usize, m: usize) -> Result<CylindricalMesh> {
    if n < 3 || m < 3 {
        return Err(Error::ParameterRange(format!("cylindrical mesh needs n, m >= 3, got {n}x{m}")));
    }
    let cycles = grid_ids(m, n, 0);
    let rails = (0..n).map(|j| cycles.iter().map(|c| c[j]).collect()).collect();
    Ok(CylindricalMesh { cycles, rails })
}

/// An annulus wall: its rows closed into base cycles, crossed by zigzag verticals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnulusWall {
    /// Base cycles `C_1..C_n`, `C_1` first.
    pub cycles: Vec<Path>,
    pub verticals: Vec<Path>,
}

impl AnnulusWall {
    pub fn n(&self) -> usize {
        self.cycles.len()
    }

    pub fn m(&self) -> usize {
        self.verticals.len()
    }

    pub fn as_cylindrical(&self) -> CylindricalMesh {
        CylindricalMesh { cycles: self.cycles.clone(), rails: self.verticals.clone() }
    }

    pub fn graph(&self) -> AnnotatedGraph {
        let mut g = union_graph(&self.verticals, &self.cycles);
        let edges: Vec<Edge> = wall_edges(&self.cycles, true).into_iter().collect();
        for (u, v) in edges {
            if g.contains(u) && g.contains(v) {
                g.add_edge(u, v).expect("no self-loops");
            }
        }
        g
    }

    pub fn validate(&self, host: Option<&AnnotatedGraph>) -> ValidityReport {
        self.as_cylindrical().validate(host, true, false)
    }
}

fn annulus_wall_on(rows: Vec<Vec<Vertex>>) -> AnnulusWall {
    let m = rows[0].len() / 2;
    let verticals = (0..m).map(|j| zigzag(&rows, j)).collect();
    AnnulusWall { cycles: rows, verticals }
}

/// The elementary `(n × m)`-annulus wall on the `(n × 2m)`-annulus grid; row 1 is `C_1`.
pub fn make_annulus_wall(n: usize, m: usize) -> Result<AnnulusWall> {
    if n < 2 || m < 2 {
        return Err(Error::ParameterRange(format!("annulus wall needs n, m >= 2, got {n}x{m}")));
    }
    Ok(annulus_wall_on(grid_ids(n, 2 * m, 0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SegmentKind {
    Wall,
    Handle,
    Crosscap,
    Vortex,
}

/// One elementary segment of a surface wall.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub kind: SegmentKind,
    /// Rows of the base `(n × 8n)`-grid block.
    pub base: Vec<Vec<Vertex>>,
    /// Rows of the second block of a vortex segment; row 1 faces the base.
    pub inner: Option<Vec<Vec<Vertex>>>,
    /// Handle, crosscap, linking and closing edges on top of the wall edges.
    pub extra: Vec<Edge>,
}

impl Segment {
    fn build(kind: SegmentKind, n: usize, base_id: Vertex) -> Self {
        let w = 8 * n;
        let base = grid_ids(n, w, base_id);
        let top = |rows: &Vec<Vec<Vertex>>, i: usize| rows[0][2 * i - 1];
        let mut extra = Vec::new();
        let mut inner = None;
        match kind {
            SegmentKind::Wall => {}
            SegmentKind::Handle => {
                for i in 1..=n {
                    extra.push(edge(base[0][2 * i - 1], base[0][6 * n + 1 - 2 * i]));
                }
                for i in n + 1..=2 * n {
                    extra.push(edge(base[0][2 * i - 1], base[0][10 * n + 1 - 2 * i]));
                }
            }
            SegmentKind::Crosscap => {
                for i in 1..=2 * n {
                    extra.push(edge(base[0][2 * i - 1], base[0][4 * n + 2 * i - 1]));
                }
            }
            SegmentKind::Vortex => {
                let w1 = grid_ids(n, w, base_id + (n * w) as Vertex);
                for i in 1..=4 * n {
                    extra.push(edge(top(&base, i), top(&w1, i)));
                }
                for row in &w1 {
                    extra.push(edge(row[0], row[w - 1]));
                }
                inner = Some(w1);
            }
        }
        Self { kind, base, inner, extra }
    }

    pub fn n(&self) -> usize {
        self.base.len()
    }

    /// Vertices `(1, 2i)` of the base, `i ∈ [4n]`.
    pub fn top_boundary(&self) -> Vec<Vertex> {
        self.base[0].iter().skip(1).step_by(2).copied().collect()
    }

    pub fn left_boundary(&self) -> Vec<Vertex> {
        self.base.iter().map(|r| r[0]).collect()
    }

    pub fn right_boundary(&self) -> Vec<Vertex> {
        self.base.iter().map(|r| r[r.len() - 1]).collect()
    }

    pub fn edges(&self) -> BTreeSet<Edge> {
        let mut e = wall_edges(&self.base, false);
        if let Some(w1) = &self.inner {
            e.extend(wall_edges(w1, false));
        }
        e.extend(self.extra.iter().copied());
        e
    }

    pub fn vertices(&self) -> VSet {
        self.base.iter().chain(self.inner.iter().flatten()).flatten().copied().collect()
    }

    /// Nest cycles of a vortex segment, inner cycle first.
    pub fn nest(&self) -> Vec<Path> {
        self.inner.as_ref().map(|w1| w1.iter().rev().cloned().collect()).unwrap_or_default()
    }

    /// Rails of a vortex segment, each from the inner cycle out to the base's last row.
    pub fn rails(&self) -> Vec<Path> {
        let Some(w1) = &self.inner else { return Vec::new() };
        (0..4 * self.n())
            .map(|i| {
                let mut p: Path = zigzag(w1, i).into_iter().rev().collect();
                p.push(w1[0][2 * i + 1]);
                p.push(self.base[0][2 * i + 1]);
                p.extend(zigzag(&self.base, i));
                p
            })
            .collect()
    }

    /// Zigzag verticals of the base, left to right, top to bottom.
    pub fn verticals(&self) -> Vec<Path> {
        (0..4 * self.n()).map(|i| zigzag(&self.base, i)).collect()
    }
}

/// `make_vortex_segment(n)` on ids `1..=16n²`.
pub fn make_vortex_segment(n: usize) -> Result<Segment> {
    if n < 1 {
        return Err(Error::ParameterRange("vortex segment needs n >= 1".into()));
    }
    Ok(Segment::build(SegmentKind::Vortex, n, 0))
}

/// Cylindrical closure of one wall segment, `h` handle, `c` crosscap and `b`
/// vortex segments, in that order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceWall {
    pub n: usize,
    pub signature: (usize, usize, usize),
    pub segments: Vec<Segment>,
}

impl SurfaceWall {
    fn closure_edges(&self) -> Vec<Edge> {
        let s = self.segments.len();
        (0..s)
            .flat_map(|i| {
                let right = self.segments[i].right_boundary();
                let left = self.segments[(i + 1) % s].left_boundary();
                right.into_iter().zip(left).map(|(u, v)| edge(u, v)).collect::<Vec<_>>()
            })
            .collect()
    }

    pub fn edges(&self) -> BTreeSet<Edge> {
        let mut e: BTreeSet<Edge> = self.segments.iter().flat_map(|s| s.edges()).collect();
        e.extend(self.closure_edges());
        e
    }

    pub fn graph(&self) -> AnnotatedGraph {
        let vs: VSet = self.segments.iter().flat_map(|s| s.vertices()).collect();
        let edges: Vec<Edge> = self.edges().into_iter().collect();
        AnnotatedGraph::from_edges(vs, &edges).expect("surface wall edges join its vertices")
    }

    /// The `(n × 4(h+c+b+1)n)`-annulus wall formed by the segment bases.
    pub fn base_wall(&self) -> AnnulusWall {
        let rows: Vec<Vec<Vertex>> = (0..self.n)
            .map(|i| self.segments.iter().flat_map(|s| s.base[i].iter().copied()).collect())
            .collect();
        annulus_wall_on(rows)
    }

    /// `C_n` of the base wall.
    pub fn simple_cycle(&self) -> Path {
        self.segments.iter().flat_map(|s| s.base[self.n - 1].iter().copied()).collect()
    }

    pub fn vortex_segments(&self) -> impl Iterator<Item = &Segment> {
        self.segments.iter().filter(|s| s.kind == SegmentKind::Vortex)
    }

    pub fn validate(&self, host: Option<&AnnotatedGraph>) -> ValidityReport {
        let mut report = ValidityReport::new();
        let count = |k: SegmentKind| self.segments.iter().filter(|s| s.kind == k).count();
        let (h, c, b) = self.signature;
        if count(SegmentKind::Wall) != 1 {
            report.push(Kind::Signature, format!("{} wall segments", count(SegmentKind::Wall)));
        }
        if (count(SegmentKind::Handle), count(SegmentKind::Crosscap), count(SegmentKind::Vortex)) != (h, c, b) {
            report.push(Kind::Signature, "segment counts differ from the signature");
        }
        if self.segments.iter().any(|s| s.n() != self.n || s.base.iter().any(|r| r.len() != 8 * self.n)) {
            report.push(Kind::Signature, "segment of the wrong order");
            return report;
        }
        let own = self.graph();
        let g = host.unwrap_or(&own);
        for (u, v) in self.closure_edges() {
            if !g.has_edge(u, v) {
                report.push(Kind::Closure, format!("missing closure edge {u}-{v}"));
            }
        }
        for (u, v) in self.segments.iter().flat_map(|s| s.edges()) {
            if !g.has_edge(u, v) {
                report.push(Kind::MissingEdge, format!("missing segment edge {u}-{v}"));
            }
        }
        report.merge(self.base_wall().validate(Some(g)));
        for s in self.vortex_segments() {
            let nest = CylindricalMesh { cycles: s.nest(), rails: s.rails() };
            let mut inner = nest.validate(Some(g), false, false);
            // rails continue into the base past the outer nest cycle
            inner.violations.retain(|v| v.kind != Kind::Endpoint);
            report.merge(inner);
        }
        report
    }

    /// Side whose strict part holds a base cycle and a base vertical path.
    pub fn majority(&self, sep: &Separation) -> Result<SideTag> {
        self.base_wall().as_cylindrical().majority(sep)
    }
}

pub fn make_surface_wall(n: usize, h: usize, c: usize, b: usize) -> Result<SurfaceWall> {
    if n < 1 {
        return Err(Error::ParameterRange("surface wall needs n >= 1".into()));
    }
    let kinds = std::iter::once(SegmentKind::Wall)
        .chain(std::iter::repeat_n(SegmentKind::Handle, h))
        .chain(std::iter::repeat_n(SegmentKind::Crosscap, c))
        .chain(std::iter::repeat_n(SegmentKind::Vortex, b));
    let mut next: Vertex = 0;
    let mut segments = Vec::new();
    for kind in kinds {
        let s = Segment::build(kind, n, next);
        next += s.vertices().len() as Vertex;
        segments.push(s);
    }
    Ok(SurfaceWall { n, signature: (h, c, b), segments })
}
