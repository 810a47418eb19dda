//! Combinatorial renditions in the disk or sphere.
//!
//! A rendition stores its cells explicitly. Each cell lists its nodes in
//! counterclockwise order, the edges of its subgraph and the vertices drawn
//! strictly inside it. Nodes are identified with the vertices they carry.
//! Every node has a rotation: the cells around it in counterclockwise
//! order, plus [`Slot::Outer`] where a disk node touches the boundary.
//! Traces, disks and containers are computed from this data alone.

mod drawing;
mod society;
mod trace;

pub use drawing::{annulus_drawing, ccw_around, grid_drawing, Blob, Drawing, SlotKey};
pub use society::{
    classify_transaction, max_transaction, society_depth, strip, strip_society, strips, Classification,
    EndSegments, Society, Transaction, TransactionKind,
};
pub use trace::{
    container, crop, cycle_disk, cycle_disk_avoiding, is_exposed, is_grounded, is_rho_flat,
    residual_vortices, restrict, side_region, sides, trace, Region, Sides, Trace, TraceStep,
};

use crate::graph::{edge, AnnotatedGraph, Edge, VSet, Vertex};
use crate::report::{Kind, ValidityReport};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Surface {
    Disk,
    Sphere,
}

/// An entry in the rotation at a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    Cell(usize),
    Outer,
}

impl Serialize for Slot {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Slot::Cell(c) => s.serialize_u64(*c as u64),
            Slot::Outer => s.serialize_str("outer"),
        }
    }
}

impl<'de> Deserialize<'de> for Slot {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Cell(usize),
            Name(String),
        }
        match Repr::deserialize(d)? {
            Repr::Cell(c) => Ok(Slot::Cell(c)),
            Repr::Name(n) if n == "outer" => Ok(Slot::Outer),
            Repr::Name(n) => Err(serde::de::Error::custom(format!("unknown slot {n:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    /// Boundary nodes in counterclockwise order.
    pub nodes: Vec<Vertex>,
    pub edges: BTreeSet<Edge>,
    /// Vertices drawn in the interior of the cell.
    #[serde(default)]
    pub interior: VSet,
    #[serde(default)]
    pub vortex: bool,
    /// For two-node cells: traversing `nodes[0] -> nodes[1]` keeps the cell on the left.
    #[serde(default = "default_tie")]
    pub tie: bool,
}

fn default_tie() -> bool {
    true
}

impl Cell {
    pub fn new(nodes: Vec<Vertex>, edges: impl IntoIterator<Item = Edge>) -> Self {
        Self {
            nodes,
            edges: edges.into_iter().map(|(u, v)| edge(u, v)).collect(),
            interior: VSet::new(),
            vortex: false,
            tie: true,
        }
    }

    pub fn vortex(nodes: Vec<Vertex>, edges: impl IntoIterator<Item = Edge>, interior: VSet) -> Self {
        Self { interior, vortex: true, ..Self::new(nodes, edges) }
    }

    /// All vertices of the cell subgraph, nodes included.
    pub fn vertices(&self) -> VSet {
        let mut vs: VSet = self.nodes.iter().copied().collect();
        vs.extend(self.interior.iter().copied());
        for &(u, v) in &self.edges {
            vs.insert(u);
            vs.insert(v);
        }
        vs
    }

    /// Position of `v` among the nodes.
    pub fn node_index(&self, v: Vertex) -> Option<usize> {
        self.nodes.iter().position(|&x| x == v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rendition {
    pub surface: Surface,
    pub cells: Vec<Cell>,
    /// Boundary nodes in counterclockwise order; empty on the sphere.
    #[serde(default)]
    pub boundary: Vec<Vertex>,
    pub rotation: BTreeMap<Vertex, Vec<Slot>>,
}

impl Rendition {
    pub fn nodes(&self) -> VSet {
        self.rotation.keys().copied().collect()
    }

    pub fn is_node(&self, v: Vertex) -> bool {
        self.rotation.contains_key(&v)
    }

    pub fn vortices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.cells.len()).filter(|&c| self.cells[c].vortex)
    }

    pub fn breadth(&self) -> usize {
        self.vortices().count()
    }

    /// The cell drawing each edge.
    pub fn edge_cells(&self) -> BTreeMap<Edge, usize> {
        let mut map = BTreeMap::new();
        for (i, c) in self.cells.iter().enumerate() {
            for &e in &c.edges {
                map.entry(e).or_insert(i);
            }
        }
        map
    }

    /// Vertices drawn in the interior of a vortex.
    pub fn vortex_interior(&self) -> VSet {
        self.vortices().flat_map(|c| self.cells[c].interior.iter().copied()).collect()
    }

    /// Cells having `v` as a node.
    pub fn cells_at(&self, v: Vertex) -> Vec<usize> {
        self.rotation
            .get(&v)
            .map(|r| r.iter().filter_map(|s| if let Slot::Cell(c) = s { Some(*c) } else { None }).collect())
            .unwrap_or_default()
    }

    /// The union of the cell subgraphs of `cells`, red vertices taken from `g`.
    pub fn sigma(&self, g: &AnnotatedGraph, cells: impl IntoIterator<Item = usize>) -> AnnotatedGraph {
        let mut h = AnnotatedGraph::new();
        for c in cells {
            let cell = &self.cells[c];
            for v in cell.vertices() {
                h.add_vertex(v);
            }
            for &(u, v) in &cell.edges {
                h.add_edge(u, v).expect("cells hold no loops");
            }
        }
        let red: Vec<Vertex> = h.vertices().filter(|&v| g.is_red(v)).collect();
        h.with_red(red).expect("vertices exist")
    }

    /// Society depth of a vortex: its subgraph with the nodes as the cyclic boundary.
    pub fn vortex_society(&self, g: &AnnotatedGraph, c: usize) -> Society {
        Society::new(self.sigma(g, [c]), self.cells[c].nodes.clone())
    }

    /// The sphere rendition obtained by closing a disk with one vortex cell
    /// on the boundary nodes, holding `interior` and `edges`.
    pub fn capped(&self, interior: VSet, edges: impl IntoIterator<Item = Edge>) -> Rendition {
        let cap = self.cells.len();
        let mut nodes = self.boundary.clone();
        nodes.reverse();
        let mut cells = self.cells.clone();
        cells.push(Cell::vortex(nodes, edges, interior));
        let rotation = self
            .rotation
            .iter()
            .map(|(&v, rot)| {
                let r = rot.iter().map(|&s| if s == Slot::Outer { Slot::Cell(cap) } else { s }).collect();
                (v, r)
            })
            .collect();
        Rendition { surface: Surface::Sphere, cells, boundary: Vec::new(), rotation }
    }

    /// Maximum society depth over all vortices.
    pub fn depth(&self, g: &AnnotatedGraph) -> usize {
        self.vortices().map(|c| society_depth(&self.vortex_society(g, c))).max().unwrap_or(0)
    }
}

/// Checks the cover, edge-disjointness and node conditions, the rotation
/// data and realizability of the radial map in the claimed surface.
pub fn validate_rendition(g: &AnnotatedGraph, rho: &Rendition) -> ValidityReport {
    let mut rep = ValidityReport::new();
    let mut owner: BTreeMap<Edge, usize> = BTreeMap::new();
    let mut seen_vertex: BTreeMap<Vertex, Vec<usize>> = BTreeMap::new();
    for (i, c) in rho.cells.iter().enumerate() {
        for &e in &c.edges {
            if !g.has_edge(e.0, e.1) {
                rep.push(Kind::R1, format!("cell {i} draws {e:?}, which is not an edge of the graph"));
            }
            if let Some(j) = owner.insert(e, i) {
                rep.push(Kind::R2, format!("edge {e:?} lies in cells {j} and {i}"));
            }
        }
        for v in c.vertices() {
            if !g.contains(v) {
                rep.push(Kind::R1, format!("cell {i} holds unknown vertex {v}"));
            }
            seen_vertex.entry(v).or_default().push(i);
        }
        if c.edges.is_empty() && c.interior.is_empty() {
            rep.push(Kind::R3, format!("cell {i} draws nothing"));
        }
        if let Some(v) = c.nodes.iter().find(|v| c.interior.contains(v)) {
            rep.push(Kind::R3, format!("node {v} of cell {i} is drawn in its interior"));
        }
        let distinct: VSet = c.nodes.iter().copied().collect();
        if distinct.len() != c.nodes.len() {
            rep.push(Kind::NotInjective, format!("cell {i} repeats a node"));
        }
        if c.nodes.is_empty() {
            rep.push(Kind::NodeCount, format!("cell {i} has no node"));
        }
        if !c.vortex && c.nodes.len() > 3 {
            rep.push(Kind::NodeCount, format!("cell {i} has {} nodes but is not a vortex", c.nodes.len()));
        }
    }
    for (u, v) in g.edges() {
        if !owner.contains_key(&(u, v)) {
            rep.push(Kind::R1, format!("edge ({u}, {v}) is in no cell"));
        }
    }
    for v in g.vertices() {
        if !seen_vertex.contains_key(&v) && !rho.is_node(v) {
            rep.push(Kind::R1, format!("vertex {v} is drawn nowhere"));
        }
    }
    for (v, cs) in &seen_vertex {
        let shared = cs.len() > 1 || rho.boundary.contains(v);
        if shared {
            for &c in cs {
                if rho.cells[c].node_index(*v).is_none() {
                    rep.push(Kind::R4, format!("vertex {v} is shared but is not a node of cell {c}"));
                }
            }
        }
    }

    let distinct: VSet = rho.boundary.iter().copied().collect();
    if distinct.len() != rho.boundary.len() {
        rep.push(Kind::NotInjective, "boundary repeats a node");
    }
    match rho.surface {
        Surface::Sphere if !rho.boundary.is_empty() => rep.push(Kind::Boundary, "sphere rendition with a boundary"),
        Surface::Disk if rho.boundary.is_empty() => rep.push(Kind::Boundary, "disk rendition without boundary"),
        _ => {}
    }

    let mut expected: BTreeMap<Vertex, BTreeSet<Slot>> = BTreeMap::new();
    for (i, c) in rho.cells.iter().enumerate() {
        for &v in &c.nodes {
            expected.entry(v).or_default().insert(Slot::Cell(i));
        }
    }
    for &v in &rho.boundary {
        expected.entry(v).or_default().insert(Slot::Outer);
    }
    for (v, slots) in &expected {
        match rho.rotation.get(v) {
            None => rep.push(Kind::Rotation, format!("node {v} has no rotation")),
            Some(rot) => {
                let got: BTreeSet<Slot> = rot.iter().copied().collect();
                if got.len() != rot.len() || &got != slots {
                    rep.push(Kind::Rotation, format!("rotation at {v} does not list its cells exactly once"));
                }
            }
        }
    }
    for (v, rot) in &rho.rotation {
        if !expected.contains_key(v) && !rot.is_empty() {
            rep.push(Kind::Rotation, format!("rotation at {v} lists slots of no incident cell"));
        }
        if !g.contains(*v) {
            rep.push(Kind::R1, format!("node {v} is not a vertex"));
        }
    }
    if rep.is_valid() {
        if let Err(msg) = check_radial_map(rho) {
            rep.push(Kind::Realizability, msg);
        }
    }
    rep
}

/// Euler check of the radial map: node, cell and outer vertices with the
/// stored rotations must trace faces with `V - E + F = 2` per component.
fn check_radial_map(rho: &Rendition) -> Result<(), String> {
    #[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
    enum Pt {
        Node(Vertex),
        Cell(usize),
        Outer,
    }
    let slot_pt = |s: &Slot| match s {
        Slot::Cell(c) => Pt::Cell(*c),
        Slot::Outer => Pt::Outer,
    };
    let mut rot: BTreeMap<Pt, Vec<Pt>> = BTreeMap::new();
    for (&v, slots) in &rho.rotation {
        rot.insert(Pt::Node(v), slots.iter().map(slot_pt).collect());
    }
    for (i, c) in rho.cells.iter().enumerate() {
        rot.insert(Pt::Cell(i), c.nodes.iter().map(|&v| Pt::Node(v)).collect());
    }
    if !rho.boundary.is_empty() {
        rot.insert(Pt::Outer, rho.boundary.iter().rev().map(|&v| Pt::Node(v)).collect());
    }
    let mut pos: BTreeMap<(Pt, Pt), usize> = BTreeMap::new();
    for (&x, nbrs) in &rot {
        for (i, &y) in nbrs.iter().enumerate() {
            pos.insert((x, y), i);
        }
    }
    for &(x, y) in pos.keys() {
        if !pos.contains_key(&(y, x)) {
            return Err(format!("radial map is not symmetric at {x:?}-{y:?}"));
        }
    }

    let mut comp: BTreeMap<Pt, usize> = BTreeMap::new();
    let mut count = 0;
    for &start in rot.keys() {
        if comp.contains_key(&start) {
            continue;
        }
        let mut stack = vec![start];
        comp.insert(start, count);
        while let Some(x) = stack.pop() {
            for &y in &rot[&x] {
                if let std::collections::btree_map::Entry::Vacant(e) = comp.entry(y) {
                    e.insert(count);
                    stack.push(y);
                }
            }
        }
        count += 1;
    }
    let mut verts = vec![0i64; count];
    let mut darts = vec![0i64; count];
    let mut faces = vec![0i64; count];
    for (x, nbrs) in &rot {
        verts[comp[x]] += 1;
        darts[comp[x]] += nbrs.len() as i64;
    }
    let mut used: BTreeSet<(Pt, Pt)> = BTreeSet::new();
    for &d in pos.keys() {
        if used.contains(&d) {
            continue;
        }
        faces[comp[&d.0]] += 1;
        let mut cur = d;
        while used.insert(cur) {
            let (x, y) = cur;
            let around = &rot[&y];
            let i = pos[&(y, x)];
            cur = (y, around[(i + 1) % around.len()]);
        }
    }
    for k in 0..count {
        let f = if darts[k] == 0 { 1 } else { faces[k] };
        let chi = verts[k] - darts[k] / 2 + f;
        if chi != 2 {
            return Err(format!("radial map component {k} has Euler characteristic {chi}, not 2"));
        }
    }
    Ok(())
}

/// No node and no vertex of a non-vortex cell is red.
pub fn is_blank(rho: &Rendition, g: &AnnotatedGraph) -> bool {
    let red = g.red();
    if rho.nodes().iter().any(|v| red.contains(v)) {
        return false;
    }
    rho.cells.iter().filter(|c| !c.vortex).all(|c| c.vertices().is_disjoint(red))
}

#[cfg(test)]
mod tests;
