use super::{Cell, Rendition, Slot, Surface};
use crate::graph::{edge, Edge, VSet, Vertex};
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// A cell other than a single drawn edge.
#[derive(Debug, Clone, PartialEq)]
pub struct Blob {
    /// Nodes in counterclockwise order around the cell.
    pub nodes: Vec<Vertex>,
    pub interior: VSet,
    pub edges: Vec<Edge>,
    pub vortex: bool,
    /// Reference point for the direction of the cell as seen from its nodes.
    pub center: (f64, f64),
}

/// Keys for overriding the direction of a rotation slot at a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SlotKey {
    Edge(Vertex),
    Blob(usize),
    Outer,
}

/// A straight-line drawing from which a rendition is read off: every listed
/// edge becomes a two-node cell, every blob one cell, and rotations sort
/// slots by direction.
#[derive(Debug, Clone, Default)]
pub struct Drawing {
    pub pos: BTreeMap<Vertex, (f64, f64)>,
    pub edges: Vec<Edge>,
    pub blobs: Vec<Blob>,
    /// Counterclockwise boundary for a disk; `None` for the sphere.
    pub boundary: Option<Vec<Vertex>>,
    pub overrides: BTreeMap<(Vertex, SlotKey), f64>,
}

/// Sorts `nodes` counterclockwise around `center`.
pub fn ccw_around(center: (f64, f64), nodes: &[Vertex], pos: &BTreeMap<Vertex, (f64, f64)>) -> Vec<Vertex> {
    let mut ns = nodes.to_vec();
    ns.sort_by(|a, b| {
        let ang = |v: &Vertex| {
            let p = pos[v];
            (p.1 - center.1).atan2(p.0 - center.0)
        };
        ang(a).total_cmp(&ang(b))
    });
    ns
}

fn angle(from: (f64, f64), to: (f64, f64)) -> f64 {
    let a = (to.1 - from.1).atan2(to.0 - from.0);
    if a < 0.0 {
        a + 2.0 * PI
    } else {
        a
    }
}

impl Drawing {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn place(&mut self, v: Vertex, x: f64, y: f64) -> &mut Self {
        self.pos.insert(v, (x, y));
        self
    }

    pub fn build(&self) -> Rendition {
        let mut cells = Vec::new();
        let mut slots: BTreeMap<Vertex, Vec<(f64, Slot)>> = BTreeMap::new();
        let mut edges: Vec<Edge> = self.edges.iter().map(|&(u, v)| edge(u, v)).collect();
        edges.sort();
        edges.dedup();
        for &(u, v) in &edges {
            let c = cells.len();
            cells.push(Cell::new(vec![u, v], [(u, v)]));
            for (a, b) in [(u, v), (v, u)] {
                let ang = self.overrides.get(&(a, SlotKey::Edge(b))).copied().unwrap_or_else(|| angle(self.pos[&a], self.pos[&b]));
                slots.entry(a).or_default().push((ang, Slot::Cell(c)));
            }
        }
        for (bi, b) in self.blobs.iter().enumerate() {
            let c = cells.len();
            let mut cell = Cell::new(b.nodes.clone(), b.edges.iter().copied());
            cell.interior = b.interior.clone();
            cell.vortex = b.vortex;
            cells.push(cell);
            for &v in &b.nodes {
                let ang = self.overrides.get(&(v, SlotKey::Blob(bi))).copied().unwrap_or_else(|| angle(self.pos[&v], b.center));
                slots.entry(v).or_default().push((ang, Slot::Cell(c)));
            }
        }
        let boundary = self.boundary.clone().unwrap_or_default();
        if !boundary.is_empty() {
            let k = boundary.len() as f64;
            let cx = boundary.iter().map(|v| self.pos[v].0).sum::<f64>() / k;
            let cy = boundary.iter().map(|v| self.pos[v].1).sum::<f64>() / k;
            for &v in &boundary {
                let ang = self.overrides.get(&(v, SlotKey::Outer)).copied().unwrap_or_else(|| angle((cx, cy), self.pos[&v]));
                slots.entry(v).or_default().push((ang, Slot::Outer));
            }
        }
        let mut rotation = BTreeMap::new();
        for (v, mut s) in slots {
            s.sort_by(|a, b| a.0.total_cmp(&b.0));
            rotation.insert(v, s.into_iter().map(|x| x.1).collect());
        }
        for &v in self.pos.keys() {
            let inside = self.blobs.iter().any(|b| {
                b.interior.contains(&v) || (!b.nodes.contains(&v) && b.edges.iter().any(|e| e.0 == v || e.1 == v))
            });
            if !inside {
                rotation.entry(v).or_insert_with(Vec::new);
            }
        }
        let surface = if boundary.is_empty() { Surface::Sphere } else { Surface::Disk };
        Rendition { surface, cells, boundary, rotation }
    }
}

/// Grid block drawn with row `i`, column `j` at `(j, -i)`. As a disk, the
/// boundary is the outer face of the block.
pub fn grid_drawing(rows: &[Vec<Vertex>], edges: impl IntoIterator<Item = Edge>, disk: bool) -> Drawing {
    let mut d = Drawing::new();
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            d.place(v, j as f64, -(i as f64));
        }
    }
    d.edges = edges.into_iter().collect();
    if disk {
        let (n, m) = (rows.len(), rows[0].len());
        let mut b: Vec<Vertex> = (0..n).map(|i| rows[i][0]).collect();
        b.extend((1..m).map(|j| rows[n - 1][j]));
        b.extend((0..n - 1).rev().map(|i| rows[i][m - 1]));
        b.extend((1..m - 1).rev().map(|j| rows[0][j]));
        d.boundary = Some(b);
    }
    d
}

/// Concentric cycles drawn counterclockwise, the first innermost, with the
/// last cycle as the disk boundary. `vortex` fills the inner face with one
/// vortex cell holding the given interior vertices and edges.
pub fn annulus_drawing(
    cycles: &[Vec<Vertex>],
    edges: impl IntoIterator<Item = Edge>,
    vortex: Option<(VSet, Vec<Edge>)>,
) -> Drawing {
    let mut d = Drawing::new();
    for (i, cyc) in cycles.iter().enumerate() {
        let k = cyc.len() as f64;
        for (j, &v) in cyc.iter().enumerate() {
            let a = 2.0 * PI * j as f64 / k;
            let r = (i + 2) as f64;
            d.place(v, r * a.cos(), r * a.sin());
        }
    }
    d.edges = edges.into_iter().collect();
    if let Some((interior, edges)) = vortex {
        for (t, &v) in interior.iter().enumerate() {
            let a = 2.0 * PI * t as f64 / interior.len().max(1) as f64;
            d.place(v, 0.5 * a.cos(), 0.5 * a.sin());
        }
        d.blobs.push(Blob { nodes: cycles[0].clone(), interior, edges, vortex: true, center: (0.0, 0.0) });
    }
    d.boundary = cycles.last().cloned();
    d
}
