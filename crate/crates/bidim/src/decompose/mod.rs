//! Tree decompositions of annotated graphs and their torsos.
//!
//! [`local_to_global`] assembles a rooted decomposition from balanced
//! separators and a local structure oracle; every non-leaf torso comes with
//! near-embedding data that can be rechecked by [`verify_near_embedding`].

mod embedding;
mod global;
mod linear;
mod separator;
#[cfg(test)]
mod tests;

pub use embedding::{vortex_layout, verify_near_embedding, NearEmbedding, VortexData};
pub use global::{
    check_global, local_to_global, paper_breadth, Bounds, BruteOracle, GlobalDecomposition, GlobalOutcome, LocalOracle,
    LocalOutcome, RejectingOracle,
};
pub use linear::{linear_decomposition_from_depth, validate_linear_decomposition, LinearDecomposition};
pub use separator::{balanced_separator, is_linked, Balance, LinkedSetCertificate};

use crate::error::{Error, Result};
use crate::graph::{AnnotatedGraph, VSet, Vertex};
use crate::report::{Kind, ValidityReport};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// A rooted tree decomposition with a distinguished set of leaves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeDecomposition {
    pub bags: Vec<VSet>,
    pub edges: Vec<(usize, usize)>,
    #[serde(default)]
    pub root: usize,
    #[serde(default)]
    pub leaves: BTreeSet<usize>,
}

impl TreeDecomposition {
    pub fn single(bag: VSet) -> Self {
        Self { bags: vec![bag], edges: Vec::new(), root: 0, leaves: BTreeSet::new() }
    }

    /// A path decomposition with the bags in order.
    pub fn path(bags: Vec<VSet>) -> Self {
        let edges = (1..bags.len()).map(|i| (i - 1, i)).collect();
        Self { bags, edges, root: 0, leaves: BTreeSet::new() }
    }

    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bags.is_empty()
    }

    pub fn neighbors(&self, t: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| if a == t { Some(b) } else if b == t { Some(a) } else { None })
            .collect()
    }

    /// Largest intersection of adjacent bags; 0 for a single node.
    pub fn adhesion(&self) -> usize {
        self.edges.iter().map(|&(a, b)| self.bags[a].intersection(&self.bags[b]).count()).max().unwrap_or(0)
    }

    /// Largest bag size minus one.
    pub fn width(&self) -> usize {
        self.bags.iter().map(|b| b.len()).max().unwrap_or(0).saturating_sub(1)
    }

    /// Parent of every node when rooted at `root`.
    pub fn parents(&self) -> Vec<Option<usize>> {
        let mut parent = vec![None; self.len()];
        let mut seen = vec![false; self.len()];
        if self.is_empty() {
            return parent;
        }
        let mut stack = vec![self.root];
        seen[self.root] = true;
        while let Some(t) = stack.pop() {
            for d in self.neighbors(t) {
                if !seen[d] {
                    seen[d] = true;
                    parent[d] = Some(t);
                    stack.push(d);
                }
            }
        }
        parent
    }

    /// Joins `children` under a new root with bag `root_bag`; `extra` adds
    /// leaves directly below the root, marked as members of `L`.
    pub fn graft(root_bag: VSet, children: Vec<TreeDecomposition>, extra: Vec<VSet>) -> Self {
        let mut td = Self::single(root_bag);
        for c in children {
            let off = td.len();
            td.edges.push((0, c.root + off));
            td.edges.extend(c.edges.iter().map(|&(a, b)| (a + off, b + off)));
            td.leaves.extend(c.leaves.iter().map(|l| l + off));
            td.bags.extend(c.bags);
        }
        for bag in extra {
            td.edges.push((0, td.len()));
            td.leaves.insert(td.len());
            td.bags.push(bag);
        }
        td
    }

    /// Vertices in the bags of the component of `T - dt` holding `d`.
    fn far_side(&self, t: usize, d: usize) -> VSet {
        let mut seen = BTreeSet::from([t, d]);
        let mut stack = vec![d];
        let mut out = VSet::new();
        while let Some(x) = stack.pop() {
            out.extend(self.bags[x].iter().copied());
            for y in self.neighbors(x) {
                if seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        out
    }
}

/// Checks the tree shape, vertex and edge cover and the connectivity of
/// every vertex's occurrence; `L` must consist of leaves.
pub fn validate_tree_decomposition(g: &AnnotatedGraph, td: &TreeDecomposition) -> ValidityReport {
    let mut rep = ValidityReport::new();
    let n = td.len();
    if n == 0 {
        rep.push(Kind::NotATree, "no nodes");
        return rep;
    }
    if td.root >= n {
        rep.push(Kind::NotATree, format!("root {} is not a node", td.root));
    }
    if let Some(&(a, b)) = td.edges.iter().find(|&&(a, b)| a >= n || b >= n || a == b) {
        rep.push(Kind::NotATree, format!("edge ({a}, {b}) is malformed"));
        return rep;
    }
    let tree = AnnotatedGraph::from_edges(
        (0..n as u32).collect::<Vec<_>>(),
        &td.edges.iter().map(|&(a, b)| (a as u32, b as u32)).collect::<Vec<_>>(),
    )
    .expect("edges checked");
    if tree.m() != n - 1 || td.edges.len() != n - 1 || !tree.is_connected() {
        rep.push(Kind::NotATree, format!("{n} nodes and {} edges do not form a tree", td.edges.len()));
        return rep;
    }
    let mut occ: BTreeMap<Vertex, Vec<usize>> = BTreeMap::new();
    for (t, bag) in td.bags.iter().enumerate() {
        for &v in bag {
            if !g.contains(v) {
                rep.push(Kind::VertexCover, format!("bag {t} holds unknown vertex {v}"));
            }
            occ.entry(v).or_default().push(t);
        }
    }
    for v in g.vertices() {
        if !occ.contains_key(&v) {
            rep.push(Kind::VertexCover, format!("vertex {v} is in no bag"));
        }
    }
    for (u, v) in g.edges() {
        if !td.bags.iter().any(|b| b.contains(&u) && b.contains(&v)) {
            rep.push(Kind::EdgeCover, format!("edge ({u}, {v}) is in no bag"));
        }
    }
    for (v, nodes) in &occ {
        let set: VSet = nodes.iter().map(|&t| t as u32).collect();
        if !tree.is_connected_set(&set) {
            rep.push(Kind::Interval, format!("the nodes holding {v} are not connected"));
        }
    }
    for &l in &td.leaves {
        if l >= n || td.neighbors(l).len() > 1 || (l == td.root && n > 1) {
            rep.push(Kind::LeafCondition, format!("node {l} of L is not a leaf"));
        }
    }
    rep
}

/// `G[β(t)]` with every adhesion set made a clique, and turned red when
/// the far side of its tree edge holds a red vertex.
pub fn annotated_torso(g: &AnnotatedGraph, td: &TreeDecomposition, t: usize) -> Result<AnnotatedGraph> {
    if t >= td.len() {
        return Err(Error::UnknownNode(t));
    }
    let bag = &td.bags[t];
    g.check_vertices(bag)?;
    let mut h = g.induced(bag);
    for d in td.neighbors(t) {
        let adh: Vec<Vertex> = td.bags[d].intersection(bag).copied().collect();
        for (i, &u) in adh.iter().enumerate() {
            for &v in &adh[i + 1..] {
                h.add_edge(u, v)?;
            }
        }
        if td.far_side(t, d).iter().any(|&v| g.is_red(v)) {
            for &v in &adh {
                h.set_red(v)?;
            }
        }
    }
    Ok(h)
}
