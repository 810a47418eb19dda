use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, VecDeque};

pub type Vertex = u32;
pub type VSet = BTreeSet<Vertex>;
pub type Edge = (Vertex, Vertex);

/// Normalizes an undirected edge so the smaller endpoint comes first.
pub fn edge(u: Vertex, v: Vertex) -> Edge {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

/// An undirected simple graph together with a set of red vertices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphRepr", into = "GraphRepr")]
pub struct AnnotatedGraph {
    adj: BTreeMap<Vertex, VSet>,
    red: VSet,
}

impl AnnotatedGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_edges(vertices: impl IntoIterator<Item = Vertex>, edges: &[Edge]) -> Result<Self> {
        let mut g = Self::new();
        for v in vertices {
            g.add_vertex(v);
        }
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_vertex(&mut self, v: Vertex) {
        self.adj.entry(v).or_default();
    }

    /// Adds `uv`, creating missing endpoints. Returns whether the edge is new.
    pub fn add_edge(&mut self, u: Vertex, v: Vertex) -> Result<bool> {
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        self.adj.entry(v).or_default().insert(u);
        Ok(self.adj.entry(u).or_default().insert(v))
    }

    pub fn remove_edge(&mut self, u: Vertex, v: Vertex) -> bool {
        let a = self.adj.get_mut(&u).map(|s| s.remove(&v)).unwrap_or(false);
        if let Some(s) = self.adj.get_mut(&v) {
            s.remove(&u);
        }
        a
    }

    pub fn remove_vertex(&mut self, v: Vertex) {
        if let Some(nb) = self.adj.remove(&v) {
            for u in nb {
                self.adj.get_mut(&u).unwrap().remove(&v);
            }
        }
        self.red.remove(&v);
    }

    pub fn set_red(&mut self, v: Vertex) -> Result<()> {
        if !self.adj.contains_key(&v) {
            return Err(Error::UnknownVertex(v));
        }
        self.red.insert(v);
        Ok(())
    }

    pub fn with_red(mut self, red: impl IntoIterator<Item = Vertex>) -> Result<Self> {
        for v in red {
            self.set_red(v)?;
        }
        Ok(self)
    }

    pub fn clear_red(&mut self) {
        self.red.clear();
    }

    pub fn red(&self) -> &VSet {
        &self.red
    }

    pub fn is_red(&self, v: Vertex) -> bool {
        self.red.contains(&v)
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.adj.contains_key(&v)
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.adj.get(&u).is_some_and(|s| s.contains(&v))
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.adj.values().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.adj.keys().copied()
    }

    pub fn vertex_set(&self) -> VSet {
        self.adj.keys().copied().collect()
    }

    pub fn neighbors(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        self.adj.get(&v).into_iter().flatten().copied()
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj.get(&v).map_or(0, BTreeSet::len)
    }

    /// Edges with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.adj
            .iter()
            .flat_map(|(&u, nb)| nb.range(u + 1..).map(move |&v| (u, v)))
    }

    pub fn edge_set(&self) -> BTreeSet<Edge> {
        self.edges().collect()
    }

    pub fn max_vertex(&self) -> Option<Vertex> {
        self.adj.keys().next_back().copied()
    }

    pub fn check_vertices<'a>(&self, vs: impl IntoIterator<Item = &'a Vertex>) -> Result<()> {
        for &v in vs {
            if !self.contains(v) {
                return Err(Error::UnknownVertex(v));
            }
        }
        Ok(())
    }

    /// Induced subgraph on `keep`; red marks are restricted.
    pub fn induced(&self, keep: &VSet) -> Self {
        let adj = keep
            .iter()
            .filter(|v| self.contains(**v))
            .map(|&v| (v, self.adj[&v].intersection(keep).copied().collect()))
            .collect();
        let red = self.red.intersection(keep).copied().collect();
        Self { adj, red }
    }

    /// Subgraph consisting of the given edges and their endpoints.
    pub fn edge_subgraph(&self, edges: &BTreeSet<Edge>) -> Self {
        let mut h = Self::new();
        for &(u, v) in edges {
            h.add_edge(u, v).expect("edge of a simple graph");
        }
        h.red = self.red.iter().filter(|v| h.contains(**v)).copied().collect();
        h
    }

    pub fn without(&self, removed: &VSet) -> Self {
        let keep = self.vertex_set().difference(removed).copied().collect();
        self.induced(&keep)
    }

    /// Connected components of `G - removed`, each sorted, listed by minimum vertex.
    pub fn components_without(&self, removed: &VSet) -> Vec<VSet> {
        let mut seen: VSet = removed.clone();
        let mut comps = Vec::new();
        for v in self.vertices() {
            if seen.contains(&v) {
                continue;
            }
            let comp = self.reach(v, |u| !removed.contains(&u));
            seen.extend(comp.iter().copied());
            comps.push(comp);
        }
        comps
    }

    pub fn components(&self) -> Vec<VSet> {
        self.components_without(&VSet::new())
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Vertices reachable from `start` through vertices accepted by `allowed`.
    pub fn reach(&self, start: Vertex, allowed: impl Fn(Vertex) -> bool) -> VSet {
        let mut seen = VSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for w in self.neighbors(u) {
                if allowed(w) && seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    /// Whether `set` is nonempty and induces a connected subgraph.
    pub fn is_connected_set(&self, set: &VSet) -> bool {
        match set.iter().next() {
            None => false,
            Some(&s) => self.reach(s, |u| set.contains(&u)).len() == set.len(),
        }
    }

    /// Shortest path from `sources` to `targets` inside `allowed`, ties broken by ascending ids.
    pub fn shortest_path(
        &self,
        sources: &VSet,
        targets: &VSet,
        allowed: impl Fn(Vertex) -> bool,
    ) -> Option<Vec<Vertex>> {
        let mut parent: BTreeMap<Vertex, Option<Vertex>> = BTreeMap::new();
        let mut queue = VecDeque::new();
        for &s in sources {
            if allowed(s) {
                parent.insert(s, None);
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            if targets.contains(&u) {
                let mut path = vec![u];
                let mut cur = u;
                while let Some(Some(p)) = parent.get(&cur) {
                    path.push(*p);
                    cur = *p;
                }
                path.reverse();
                return Some(path);
            }
            for w in self.neighbors(u) {
                if allowed(w) && !parent.contains_key(&w) {
                    parent.insert(w, Some(u));
                    queue.push_back(w);
                }
            }
        }
        None
    }

    /// Relabels vertices to `0..n` in ascending order.
    pub fn compact(&self) -> (Self, Vec<Vertex>) {
        let order: Vec<Vertex> = self.vertices().collect();
        let index: BTreeMap<Vertex, Vertex> =
            order.iter().enumerate().map(|(i, &v)| (v, i as Vertex)).collect();
        let mut h = Self::new();
        for &v in &order {
            h.add_vertex(index[&v]);
        }
        for (u, v) in self.edges() {
            h.add_edge(index[&u], index[&v]).unwrap();
        }
        h.red = self.red.iter().map(|v| index[v]).collect();
        (h, order)
    }

    /// Adjacency bitmasks over the compacted vertex order (requires `n <= 64`).
    pub fn bitmasks(&self) -> (Vec<u64>, Vec<Vertex>) {
        assert!(self.n() <= 64, "bitmask view needs at most 64 vertices");
        let (h, order) = self.compact();
        let masks = (0..h.n() as Vertex)
            .map(|v| h.neighbors(v).fold(0u64, |m, w| m | (1 << w)))
            .collect();
        (masks, order)
    }

    pub fn complete(n: u32) -> Self {
        let mut g = Self::new();
        for v in 1..=n {
            g.add_vertex(v);
            for u in 1..v {
                g.add_edge(u, v).unwrap();
            }
        }
        g
    }

    pub fn path(n: u32) -> Self {
        let mut g = Self::new();
        for v in 1..=n {
            g.add_vertex(v);
            if v > 1 {
                g.add_edge(v - 1, v).unwrap();
            }
        }
        g
    }

    pub fn cycle(n: u32) -> Self {
        let mut g = Self::path(n);
        if n >= 3 {
            g.add_edge(n, 1).unwrap();
        }
        g
    }
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    #[serde(default)]
    red: Vec<Vertex>,
}

impl From<AnnotatedGraph> for GraphRepr {
    fn from(g: AnnotatedGraph) -> Self {
        Self {
            vertices: g.vertices().collect(),
            edges: g.edges().collect(),
            red: g.red.iter().copied().collect(),
        }
    }
}

impl TryFrom<GraphRepr> for AnnotatedGraph {
    type Error = Error;

    fn try_from(r: GraphRepr) -> Result<Self> {
        let mut g = AnnotatedGraph::new();
        for v in r.vertices {
            g.add_vertex(v);
        }
        for (u, v) in r.edges {
            g.check_vertices([&u, &v])?;
            g.add_edge(u, v)?;
        }
        g.with_red(r.red)
    }
}

/// Which side of a separation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SideTag {
    A,
    B,
}

impl SideTag {
    pub fn flip(self) -> Self {
        match self {
            SideTag::A => SideTag::B,
            SideTag::B => SideTag::A,
        }
    }
}

/// A pair `(A, B)` with `A ∪ B = V` and no edge between `A∖B` and `B∖A`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Separation {
    pub a: VSet,
    pub b: VSet,
}

impl Separation {
    pub fn new(a: VSet, b: VSet) -> Self {
        Self { a, b }
    }

    pub fn order(&self) -> usize {
        self.a.intersection(&self.b).count()
    }

    pub fn separator(&self) -> VSet {
        self.a.intersection(&self.b).copied().collect()
    }

    pub fn swapped(&self) -> Self {
        Self { a: self.b.clone(), b: self.a.clone() }
    }

    pub fn side(&self, tag: SideTag) -> &VSet {
        match tag {
            SideTag::A => &self.a,
            SideTag::B => &self.b,
        }
    }

    /// The vertices of `side` not in the other side.
    pub fn strict(&self, tag: SideTag) -> VSet {
        self.side(tag).difference(self.side(tag.flip())).copied().collect()
    }

    pub fn is_valid_in(&self, g: &AnnotatedGraph) -> bool {
        let union: VSet = self.a.union(&self.b).copied().collect();
        if union != g.vertex_set() {
            return false;
        }
        let only_a = self.strict(SideTag::A);
        let only_b = self.strict(SideTag::B);
        !only_a.iter().any(|&u| g.neighbors(u).any(|w| only_b.contains(&w)))
    }

    /// The separation with separator `s` whose `A` side holds every component
    /// of `G - s` accepted by `to_a`.
    pub fn from_separator(g: &AnnotatedGraph, s: &VSet, to_a: impl Fn(&VSet) -> bool) -> Self {
        let mut a = s.clone();
        let mut b = s.clone();
        for comp in g.components_without(s) {
            if to_a(&comp) {
                a.extend(comp);
            } else {
                b.extend(comp);
            }
        }
        Self { a, b }
    }
}

/// Every separation of order below `k`, each listed once as `(A, B)` with
/// the separator plus an arbitrary split of the components of `G - S`.
/// Intended for graphs with a handful of vertices.
pub fn all_separations(g: &AnnotatedGraph, k: usize) -> Vec<Separation> {
    use itertools::Itertools;
    let vs: Vec<Vertex> = g.vertices().collect();
    let mut out = Vec::new();
    for size in 0..k.min(vs.len() + 1) {
        for s in vs.iter().copied().combinations(size) {
            let s: VSet = s.into_iter().collect();
            let comps = g.components_without(&s);
            let c = comps.len();
            assert!(c < 20, "too many components to enumerate");
            for mask in 0u32..(1 << c) {
                let mut a = s.clone();
                let mut b = s.clone();
                for (i, comp) in comps.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        a.extend(comp);
                    } else {
                        b.extend(comp);
                    }
                }
                out.push(Separation { a, b });
            }
        }
    }
    out
}
