//! Nest trees: nests of cycles hung on a rooted subcubic tree, joined along
//! tree edges by radial linkages.
//!
//! Every nest lists its cycles innermost first. A leaf nest of a tree with
//! cycle order `s` and reserve `s0` has `s + s0 + 1` cycles: the leaf nest
//! proper `C_1..C_s`, the boundary cycle `C_{s+1}` and the reserve. Inner
//! nodes keep exactly `s0` cycles. The linkage stored at a node runs from
//! the outer cycle of its parent to its own inner cycle; the root radial
//! linkage ends on the inner cycle of the root.
//!
//! Disks are cell sets of the rendition, so containment and disjointness
//! are plain set relations.

mod refine;
mod split;
mod tighten;
mod wall;


pub use refine::{refine_nest_tree, MaxTransaction, RefineOutcome, RefineParams, RefineRun, TraceEvent, TransactionSource};
pub use split::{split_leaf, SplitOutcome};
pub use tighten::{
    check_tighter, expose_or_tighten, orthogonalize_radial, regressions, tightness, ExposeOutcome, OrthoStep,
    Orthogonalized, Removed, ShrinkWitness, Tightening,
};
pub use wall::{
    nest_tree_to_surface_wall, validate_extended_wall, ExtendedSurfaceWall, VortexSegment, WallOutcome, WallParams,
};

use crate::error::{Error, Result};
use crate::flow::disjoint_paths;
use crate::graph::{edge, AnnotatedGraph, Edge, VSet, Vertex};
use crate::grids::Path;
use crate::homogenize::runs;
use crate::report::{Kind, ValidityReport};
use crate::rendition::{crop, cycle_disk, restrict, Region, Rendition, Society};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NestNode {
    /// Cycles, innermost first.
    pub nest: Vec<Path>,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// Linkage of the edge from the parent; empty at the root.
    pub linkage: Vec<Path>,
}

/// A nest tree. Nodes sit behind `Arc`s so that derived trees share every
/// node they leave untouched.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NestTree {
    /// Root radial linkage, each path ending on the inner cycle of the root.
    pub radial: Vec<Path>,
    pub nodes: Vec<Arc<NestNode>>,
    pub cycle_order: usize,
    pub linkage_order: usize,
    pub reserve: usize,
}

/// The society inside the boundary cycle of a leaf with its rendition.
#[derive(Debug, Clone)]
pub struct LeafSociety {
    pub society: Society,
    pub rendition: Rendition,
    pub region: Region,
    /// Cell of the full rendition for every cell of the restricted one.
    pub cells: Vec<usize>,
}

impl NestTree {
    /// The one-node tree on a nest, its outermost `reserve` cycles held in reserve.
    pub fn single(nest: Vec<Path>, radial: Vec<Path>, reserve: usize) -> Result<Self> {
        if nest.len() < reserve + 2 {
            return Err(Error::OrderTooSmall { have: nest.len(), need: reserve + 2 });
        }
        let cycle_order = nest.len() - reserve - 1;
        let root = NestNode { nest, parent: None, children: Vec::new(), linkage: Vec::new() };
        Ok(Self { linkage_order: radial.len(), radial, nodes: vec![Arc::new(root)], cycle_order, reserve })
    }

    pub fn node(&self, i: usize) -> &NestNode {
        &self.nodes[i]
    }

    pub fn is_leaf(&self, i: usize) -> bool {
        self.nodes[i].children.is_empty()
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&i| self.is_leaf(i)).collect()
    }

    /// The linkage reaching node `i`: the root radial linkage or the parent edge linkage.
    pub fn radial_for(&self, i: usize) -> &[Path] {
        if i == 0 {
            &self.radial
        } else {
            &self.nodes[i].linkage
        }
    }

    pub fn boundary_cycle(&self, leaf: usize) -> &Path {
        &self.nodes[leaf].nest[self.cycle_order]
    }

    pub fn leaf_nest(&self, leaf: usize) -> &[Path] {
        &self.nodes[leaf].nest[..self.cycle_order]
    }

    pub(crate) fn with_node(&self, i: usize, node: NestNode) -> Self {
        let mut t = self.clone();
        t.nodes[i] = Arc::new(node);
        t
    }

    pub(crate) fn with_radial_for(&self, i: usize, paths: Vec<Path>) -> Self {
        if i == 0 {
            let mut t = self.clone();
            t.radial = paths;
            t
        } else {
            let mut node = self.nodes[i].as_ref().clone();
            node.linkage = paths;
            self.with_node(i, node)
        }
    }

    /// Leaf nests cut down to a smaller cycle order: the inner `s` cycles,
    /// the next one as boundary and the outermost `reserve` cycles.
    pub(crate) fn with_cycle_order(&self, s: usize) -> Self {
        let mut t = self.clone();
        for i in self.leaves() {
            let nest = &self.nodes[i].nest;
            if nest.len() > s + self.reserve + 1 {
                let mut node = self.nodes[i].as_ref().clone();
                let mut kept = nest[..=s].to_vec();
                kept.extend(nest[nest.len() - self.reserve..].iter().cloned());
                node.nest = kept;
                t.nodes[i] = Arc::new(node);
            }
        }
        t.cycle_order = s;
        t
    }

    pub fn leaf_society(&self, g: &AnnotatedGraph, rho: &Rendition, leaf: usize) -> Result<LeafSociety> {
        let region = cycle_disk(rho, self.boundary_cycle(leaf))?;
        let graph = crop(g, rho, &region);
        let rendition = restrict(rho, &region);
        let society = Society::new(graph, region.boundary.clone());
        let cells = region.cells.iter().copied().collect();
        Ok(LeafSociety { society, rendition, region, cells })
    }
}

pub(crate) fn vset(p: &[Vertex]) -> VSet {
    p.iter().copied().collect()
}

/// Suffix of `path` from its last vertex on `cycle`.
pub fn truncation(path: &[Vertex], cycle: &[Vertex]) -> Option<Path> {
    let on = vset(cycle);
    path.iter().rposition(|v| on.contains(v)).map(|i| path[i..].to_vec())
}

pub(crate) fn cycle_edges(c: &[Vertex]) -> BTreeSet<Edge> {
    let k = c.len();
    (0..k).map(|i| edge(c[i], c[(i + 1) % k])).collect()
}

/// Why `path` fails to be an orthogonal radial path from `outer` to the
/// inner cycle of `nest` drawn in the cells `region`, if it does.
fn radial_defect(
    owner: &BTreeMap<Edge, usize>,
    path: &[Vertex],
    outer: &[Vertex],
    nest: &[&Path],
    region: &BTreeSet<usize>,
) -> Option<String> {
    let (Some(&first), Some(&last)) = (path.first(), path.last()) else {
        return Some("empty path".into());
    };
    if !outer.contains(&first) {
        return Some(format!("starts at {first} off the outer cycle"));
    }
    if !nest[0].contains(&last) {
        return Some(format!("ends at {last} off the inner cycle"));
    }
    for w in path.windows(2) {
        match owner.get(&edge(w[0], w[1])) {
            Some(c) if region.contains(c) => {}
            Some(_) => return Some(format!("edge {}-{} leaves the disk", w[0], w[1])),
            None => return Some(format!("edge {}-{} is not drawn", w[0], w[1])),
        }
    }
    for (k, c) in nest.iter().enumerate() {
        let r = runs(path, &vset(c)).len();
        if r != 1 {
            return Some(format!("meets cycle {} in {r} subpaths", k + 1));
        }
    }
    None
}

fn pairwise_disjoint(paths: &[Path]) -> bool {
    let mut seen = VSet::new();
    paths.iter().all(|p| p.iter().all(|&v| seen.insert(v)))
}

/// Checks T1-T6, nest orders and consistency with `z` separately.
pub fn validate_nest_tree(rho: &Rendition, nt: &NestTree, z: &VSet) -> ValidityReport {
    let mut report = ValidityReport::new();
    let (s, s0, t) = (nt.cycle_order, nt.reserve, nt.linkage_order);
    let owner = rho.edge_cells();
    for (i, node) in nt.nodes.iter().enumerate() {
        let want = if nt.is_leaf(i) { s + s0 + 1 } else { s0 };
        if node.nest.len() != want || want == 0 {
            report.push(Kind::NestOrder, format!("node {i} has {} cycles, expected {want}", node.nest.len()));
        }
        let links = nt.radial_for(i).len();
        if links != t {
            report.push(Kind::NestOrder, format!("linkage into node {i} has order {links}, expected {t}"));
        }
        for (k, c) in node.nest.iter().enumerate() {
            let simple = vset(c).len() == c.len() && c.len() >= 3;
            if !simple || cycle_edges(c).iter().any(|e| !owner.contains_key(e)) {
                report.push(Kind::NestOrder, format!("cycle {} of node {i} is not a drawn cycle", k + 1));
            }
        }
    }
    if !report.is_valid() {
        return report;
    }

    let mut inner = Vec::new();
    let mut outer = Vec::new();
    for (i, node) in nt.nodes.iter().enumerate() {
        let disks: Result<Vec<Region>> = node.nest.iter().map(|c| cycle_disk(rho, c)).collect();
        let disks = match disks {
            Ok(d) => d,
            Err(e) => {
                report.push(Kind::NestOrder, format!("node {i}: {e}"));
                return report;
            }
        };
        for k in 1..disks.len() {
            let apart = vset(&node.nest[k]).is_disjoint(&vset(&node.nest[k - 1]));
            if !apart || !disks[k - 1].cells.is_subset(&disks[k].cells) {
                report.push(Kind::NestOrder, format!("cycles {k} and {} of node {i} are not nested", k + 1));
            }
        }
        inner.push(disks[0].clone());
        outer.push(disks[disks.len() - 1].clone());
    }

    let root = &nt.nodes[0];
    let root_nest: Vec<&Path> = root.nest.iter().collect();
    let root_outer = &root.nest[root.nest.len() - 1];
    let mut truncs = Vec::new();
    for (j, p) in nt.radial.iter().enumerate() {
        match truncation(p, root_outer) {
            Some(tr) => {
                if let Some(why) = radial_defect(&owner, &tr, root_outer, &root_nest, &outer[0].cells) {
                    report.push(Kind::T1, format!("root radial path {}: {why}", j + 1));
                }
                truncs.push(tr);
            }
            None => report.push(Kind::T1, format!("root radial path {} misses the outer cycle", j + 1)),
        }
    }
    if !pairwise_disjoint(&truncs) {
        report.push(Kind::T1, "root radial paths intersect");
    }

    for (i, node) in nt.nodes.iter().enumerate() {
        for &c in &node.children {
            if !outer[c].cells.is_subset(&inner[i].cells) {
                report.push(Kind::T2, format!("outer disk of node {c} escapes the inner disk of node {i}"));
            }
            let child = &nt.nodes[c];
            let p_outer = &node.nest[node.nest.len() - 1];
            let c_outer = &child.nest[child.nest.len() - 1];
            let mut both: Vec<&Path> = child.nest.iter().collect();
            both.extend(node.nest.iter());
            for (j, p) in child.linkage.iter().enumerate() {
                if let Some(why) = radial_defect(&owner, p, p_outer, &both, &outer[i].cells) {
                    report.push(Kind::T4, format!("edge {i}-{c} path {}: {why}", j + 1));
                    continue;
                }
                let tr = truncation(p, c_outer).expect("path meets every cycle");
                let own: Vec<&Path> = child.nest.iter().collect();
                if let Some(why) = radial_defect(&owner, &tr, c_outer, &own, &outer[c].cells) {
                    report.push(Kind::T4, format!("edge {i}-{c} path {} truncation: {why}", j + 1));
                }
            }
            if !pairwise_disjoint(&child.linkage) {
                report.push(Kind::T4, format!("paths of edge {i}-{c} intersect"));
            }
        }
        for (a, &c1) in node.children.iter().enumerate() {
            for &c2 in &node.children[a + 1..] {
                let (o1, o2) = (&nt.nodes[c1].nest, &nt.nodes[c2].nest);
                let apart = vset(&o1[o1.len() - 1]).is_disjoint(&vset(&o2[o2.len() - 1]));
                if !apart || !outer[c1].cells.is_disjoint(&outer[c2].cells) {
                    report.push(Kind::T3, format!("outer disks of siblings {c1} and {c2} meet"));
                }
                let l1: VSet = nt.nodes[c1].linkage.iter().flatten().copied().collect();
                if nt.nodes[c2].linkage.iter().flatten().any(|v| l1.contains(v)) {
                    report.push(Kind::T5, format!("linkages into siblings {c1} and {c2} meet"));
                }
            }
        }
    }

    let leaves = nt.leaves();
    for c in rho.vortices() {
        if !leaves.iter().any(|&l| inner[l].cells.contains(&c)) {
            report.push(Kind::T6, format!("vortex cell {c} lies outside every leaf inner disk"));
        }
    }
    let interior = |l: usize| -> VSet {
        let on = vset(&nt.nodes[l].nest[0]);
        inner[l].cells.iter().flat_map(|&c| rho.cells[c].vertices()).filter(|v| !on.contains(v)).collect()
    };
    let holds: Vec<VSet> = leaves.iter().map(|&l| interior(l)).collect();
    for &v in z {
        if !holds.iter().any(|h| h.contains(&v)) {
            report.push(Kind::ZConsistency, format!("vertex {v} lies outside every leaf inner disk"));
        }
    }
    for (k, &l) in leaves.iter().enumerate() {
        let vortex = inner[l].cells.iter().any(|&c| rho.cells[c].vortex);
        if !vortex && holds[k].is_disjoint(z) {
            report.push(Kind::ZConsistency, format!("inner disk of leaf {l} holds neither a vortex nor a vertex of Z"));
        }
    }
    report
}

/// Outcome of [`menger_linkage`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MengerOutcome {
    Linkage(Vec<Path>),
    Cut(VSet),
}

/// `k` vertex-disjoint `X`-`Y` paths, or a vertex cut of size below `k`.
pub fn menger_linkage(g: &AnnotatedGraph, x: &VSet, y: &VSet, k: usize) -> MengerOutcome {
    let link = disjoint_paths(g, x, y, None);
    debug_assert_eq!(link.paths.len(), link.cut.len());
    if link.paths.len() >= k {
        MengerOutcome::Linkage(link.paths.into_iter().take(k).collect())
    } else {
        MengerOutcome::Cut(link.cut)
    }
}

/// `2 + 2ζ(s0 + 1)`: cycle order needed for `ζ` rounds of leaf splitting with reserve `s0`.
pub fn nestrec(s0: usize, zeta: usize) -> usize {
    2 + 2 * zeta * (s0 + 1)
}

/// Order of the input nest for refining towards `ℓ + 1` leaves with reserve `s`.
pub fn nest_bound(s: usize, leaves: usize) -> usize {
    s + 1 + nestrec(s, leaves)
}

/// Order of an annulus wall that links a refined nest tree back into a surface wall.
pub fn wall_bound(r: usize, k: usize, leaves: usize) -> usize {
    4 * k + nest_bound(r + 4 * k * (leaves + 2) * (leaves + 2), leaves)
}

/// Order `2t + 2s0 + 2s + 6` of the transaction that splits a leaf.
pub fn split_order(t: usize, s0: usize, s: usize) -> usize {
    2 * t + 2 * s0 + 2 * s + 6
}

/// Depth threshold for a leaf society at cycle order `s_z`, splitting to `s_next`.
pub fn leaf_depth_threshold(b: usize, d: usize, r: usize, t: usize, s: usize, s_z: usize, s_next: usize) -> usize {
    let inner = r * (r - 1) * split_order(t, s, s_next);
    let p = 2 * s_z + (s_z * (inner + 1) + 1) + 2;
    (b + 1) * (2 * b * d + p) - 1
}

/// Bound on the depth of every leaf society after refining towards `ℓ + 1` leaves.
pub fn leaf_depth_bound(b: usize, d: usize, r: usize, s: usize, t: usize, leaves: usize) -> usize {
    (b + 1) * (2 * b * d + 12 * r * r * s * (t + (leaves + 1) * s))
}

/// Leaf depth bound for walls of order [`wall_bound`].
pub fn wall_depth_bound(r: usize, k: usize, leaves: usize, b: usize, d: usize) -> usize {
    let s = r + 4 * k * (leaves + 2) * (leaves + 2);
    leaf_depth_bound(b, d, r, s, s, leaves)
}
