use super::{cycle_edges, vset, NestTree};
use crate::error::{Error, Result};
use crate::graph::{edge, AnnotatedGraph, Edge, VSet, Vertex};
use crate::grids::Path;
use crate::homogenize::runs;
use crate::rendition::{crop, cycle_disk, is_exposed, Region, Rendition, Transaction};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A vertex or edge of the old crop that the new crop lacks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Removed {
    Vertex(Vertex),
    Edge(Edge),
}

/// Where a tighter tree shrank: node, cycle index (0 = innermost) and the lost element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShrinkWitness {
    pub node: usize,
    pub cycle: usize,
    pub removed: Removed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tightening {
    pub tree: NestTree,
    pub witness: ShrinkWitness,
}

/// Outcome of [`expose_or_tighten`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExposeOutcome {
    Exposed(Transaction),
    Tighter(Tightening),
}

/// One step of [`orthogonalize_radial`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrthoStep {
    /// A cycle moved inward along a radial path; its disk shrank from `before` to `after` cells.
    Tighten { cycle: usize, before: usize, after: usize },
    /// A regression of a path on a cycle was replaced by a stretch of the cycle.
    Reroute { path: usize, cycle: usize, regressions: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orthogonalized {
    pub nest: Vec<Path>,
    pub radial: Vec<Path>,
    pub steps: Vec<OrthoStep>,
}

/// Number of extra subpaths in which the paths meet the cycles.
pub fn regressions(nest: &[Path], paths: &[Path]) -> usize {
    nest.iter()
        .map(|c| {
            let on = vset(c);
            paths.iter().map(|p| runs(p, &on).len().saturating_sub(1)).sum::<usize>()
        })
        .sum()
}

/// A subpath `path[a..=b]` with both ends on cycle `i`, no other vertex on
/// it or on another cycle of the nest, drawn inside the disk of cycle `i`.
fn inward_subpath(
    owner: &BTreeMap<Edge, usize>,
    nest: &[Path],
    i: usize,
    disk: &Region,
    path: &[Vertex],
) -> Option<(usize, usize)> {
    let on = vset(&nest[i]);
    let others: VSet = nest.iter().enumerate().filter(|&(k, _)| k != i).flat_map(|(_, c)| c.iter().copied()).collect();
    let own = cycle_edges(&nest[i]);
    let idx: Vec<usize> = (0..path.len()).filter(|&k| on.contains(&path[k])).collect();
    idx.windows(2).map(|w| (w[0], w[1])).find(|&(a, b)| {
        if b == a + 1 && own.contains(&edge(path[a], path[b])) {
            return false;
        }
        if path[a + 1..b].iter().any(|v| others.contains(v)) {
            return false;
        }
        owner.get(&edge(path[a], path[a + 1])).is_some_and(|c| disk.cells.contains(c))
    })
}

/// Stretches of `cycle` from `x` to `y` in both directions.
pub(crate) fn stretches(cycle: &[Vertex], x: Vertex, y: Vertex) -> Vec<Path> {
    let n = cycle.len();
    let (px, py) = match (cycle.iter().position(|&v| v == x), cycle.iter().position(|&v| v == y)) {
        (Some(a), Some(b)) => (a, b),
        _ => return Vec::new(),
    };
    [1, n - 1]
        .iter()
        .map(|&step| {
            let mut out = vec![cycle[px]];
            let mut k = px;
            while k != py {
                k = (k + step) % n;
                out.push(cycle[k]);
            }
            out
        })
        .collect()
}

/// The cycle through the subpath `sub` and a stretch of cycle `i` whose
/// disk still holds the disk of cycle `i - 1`, if it is strictly smaller.
fn moved_cycle(rho: &Rendition, nest: &[Path], i: usize, sub: &[Vertex], disk: &Region) -> Result<Option<(Path, usize)>> {
    let inner = cycle_disk(rho, &nest[i - 1])?;
    let (x, y) = (sub[0], sub[sub.len() - 1]);
    for back in stretches(&nest[i], y, x) {
        let mut cand: Path = sub.to_vec();
        cand.extend(&back[1..back.len() - 1]);
        let Ok(d) = cycle_disk(rho, &cand) else { continue };
        if inner.cells.is_subset(&d.cells) && d.cells.len() < disk.cells.len() && d.cells.is_subset(&disk.cells) {
            return Ok(Some((cand, d.cells.len())));
        }
    }
    Ok(None)
}

/// Replaces every regression by a stretch of its cycle, innermost cycle first.
pub(crate) fn resolve_regressions(nest: &[Path], paths: &[Path], steps: &mut Vec<OrthoStep>) -> Result<Vec<Path>> {
    let mut paths = paths.to_vec();
    let mut count = regressions(nest, &paths);
    while count > 0 {
        let (j, k, a, b) = nest
            .iter()
            .enumerate()
            .find_map(|(j, c)| {
                let on = vset(c);
                paths.iter().enumerate().find_map(|(k, p)| {
                    let rs = runs(p, &on);
                    (rs.len() >= 2).then(|| (j, k, rs[0].0, rs[rs.len() - 1].1))
                })
            })
            .expect("a regression exists");
        let p = &paths[k];
        let forbid: VSet = paths.iter().enumerate().filter(|&(q, _)| q != k).flat_map(|(_, q)| q.iter().copied()).collect();
        let best = stretches(&nest[j], p[a], p[b])
            .into_iter()
            .filter(|s| s.iter().all(|v| !forbid.contains(v)))
            .min_by_key(|s| s.len())
            .ok_or_else(|| Error::Unresolved(format!("both stretches of cycle {} are blocked", j + 1)))?;
        let mut q = p[..a].to_vec();
        q.extend(best);
        q.extend(&p[b + 1..]);
        paths[k] = q;
        let next = regressions(nest, &paths);
        if next >= count {
            return Err(Error::Unresolved(format!("rerouting on cycle {} did not reduce regressions", j + 1)));
        }
        count = next;
        steps.push(OrthoStep::Reroute { path: k, cycle: j, regressions: count });
    }
    Ok(paths)
}

/// Makes a radial linkage orthogonal to a nest (innermost first).
///
/// Cycles other than the innermost first move inward along subpaths of the
/// linkage that stick into their disk; the remaining regressions are then
/// replaced by stretches of their cycles. Path ends never change.
pub fn orthogonalize_radial(rho: &Rendition, nest: &[Path], radial: &[Path]) -> Result<Orthogonalized> {
    let owner = rho.edge_cells();
    let mut nest = nest.to_vec();
    let mut steps = Vec::new();
    'tighten: loop {
        for i in 1..nest.len() {
            let disk = cycle_disk(rho, &nest[i])?;
            for p in radial {
                let Some((a, b)) = inward_subpath(&owner, &nest, i, &disk, p) else { continue };
                if let Some((c, after)) = moved_cycle(rho, &nest, i, &p[a..=b], &disk)? {
                    steps.push(OrthoStep::Tighten { cycle: i, before: disk.cells.len(), after });
                    nest[i] = c;
                    continue 'tighten;
                }
            }
        }
        break;
    }
    let radial = resolve_regressions(&nest, radial, &mut steps)?;
    Ok(Orthogonalized { nest, radial, steps })
}

pub(crate) fn shrink_witness(g: &AnnotatedGraph, rho: &Rendition, old: &[Vertex], new: &[Vertex]) -> Result<Option<Removed>> {
    let a = crop(g, rho, &cycle_disk(rho, old)?);
    let b = crop(g, rho, &cycle_disk(rho, new)?);
    if !b.vertex_set().is_subset(&a.vertex_set()) || !b.edge_set().is_subset(&a.edge_set()) {
        return Ok(None);
    }
    if let Some(v) = a.vertices().find(|&v| !b.contains(v)) {
        return Ok(Some(Removed::Vertex(v)));
    }
    let lost = a.edges().find(|&(u, v)| !b.has_edge(u, v)).map(Removed::Edge);
    Ok(lost)
}

/// Sum over leaf-nest cycles of the size of their crops.
pub fn tightness(g: &AnnotatedGraph, rho: &Rendition, nt: &NestTree) -> Result<usize> {
    let mut total = 0;
    for l in nt.leaves() {
        for c in &nt.node(l).nest {
            let h = crop(g, rho, &cycle_disk(rho, c)?);
            total += h.n() + h.m();
        }
    }
    Ok(total)
}

/// A witness that `new` is tighter than `old`: same shape and inner nests,
/// every leaf cycle crop contained in the old one and one of them strictly.
pub fn check_tighter(g: &AnnotatedGraph, rho: &Rendition, old: &NestTree, new: &NestTree) -> Result<Option<ShrinkWitness>> {
    let same_shape = old.nodes.len() == new.nodes.len()
        && (old.cycle_order, old.reserve, old.linkage_order) == (new.cycle_order, new.reserve, new.linkage_order)
        && old.nodes.iter().zip(&new.nodes).all(|(a, b)| a.parent == b.parent && a.children == b.children);
    if !same_shape {
        return Ok(None);
    }
    let mut witness = None;
    for (i, (a, b)) in old.nodes.iter().zip(&new.nodes).enumerate() {
        if !old.is_leaf(i) {
            if a.nest != b.nest {
                return Ok(None);
            }
            continue;
        }
        if a.nest.len() != b.nest.len() {
            return Ok(None);
        }
        for (k, (c, d)) in a.nest.iter().zip(&b.nest).enumerate() {
            if c == d {
                continue;
            }
            match shrink_witness(g, rho, c, d)? {
                Some(removed) => {
                    witness.get_or_insert(ShrinkWitness { node: i, cycle: k, removed });
                }
                None => {
                    let (x, y) = (cycle_disk(rho, c)?, cycle_disk(rho, d)?);
                    if !y.cells.is_subset(&x.cells) {
                        return Ok(None);
                    }
                }
            }
        }
    }
    Ok(witness)
}

/// The first `p` paths of `t` crossing into the inner disk of `leaf`, or a
/// tighter tree in which a cycle `C_i`, `2 ≤ i ≤ s + 1`, of the leaf nest
/// moved inward along a non-exposed path. `t` must have order `2s + p + 2`.
pub fn expose_or_tighten(
    g: &AnnotatedGraph,
    rho: &Rendition,
    nt: &NestTree,
    leaf: usize,
    t: &Transaction,
    p: usize,
) -> Result<ExposeOutcome> {
    if leaf >= nt.nodes.len() || !nt.is_leaf(leaf) {
        return Err(Error::ParameterRange(format!("node {leaf} is not a leaf")));
    }
    let s = nt.cycle_order;
    let need = 2 * s + p + 2;
    if t.order() < need {
        return Err(Error::OrderTooSmall { have: t.order(), need });
    }
    let nest = &nt.node(leaf).nest;
    let mut exposed = Vec::new();
    let mut covered = Vec::new();
    for path in &t.paths {
        if is_exposed(g, rho, &nest[0], std::slice::from_ref(path))? {
            exposed.push(path.clone());
        } else {
            covered.push(path);
        }
    }
    if exposed.len() >= p {
        exposed.truncate(p);
        return Ok(ExposeOutcome::Exposed(Transaction::new(exposed)));
    }
    let owner = rho.edge_cells();
    for q in covered {
        for i in 1..=s {
            let disk = cycle_disk(rho, &nest[i])?;
            let Some((a, b)) = inward_subpath(&owner, nest, i, &disk, q) else { continue };
            let Some((c, _)) = moved_cycle(rho, nest, i, &q[a..=b], &disk)? else { continue };
            let removed = shrink_witness(g, rho, &nest[i], &c)?
                .ok_or_else(|| Error::Unresolved("moved cycle does not shrink its crop".into()))?;
            let mut node = nt.node(leaf).clone();
            node.nest[i] = c;
            let radial = resolve_regressions(&node.nest, nt.radial_for(leaf), &mut Vec::new())?;
            let tree = nt.with_node(leaf, node).with_radial_for(leaf, radial);
            let witness = ShrinkWitness { node: leaf, cycle: i, removed };
            return Ok(ExposeOutcome::Tighter(Tightening { tree, witness }));
        }
    }
    Err(Error::Unresolved("no non-exposed path sticks into a leaf cycle".into()))
}
