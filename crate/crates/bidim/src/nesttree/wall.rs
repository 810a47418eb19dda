use super::refine::{refine_nest_tree, RefineOutcome, RefineParams, TraceEvent, TransactionSource};
use super::tighten::resolve_regressions;
use super::{cycle_edges, nest_bound, vset, NestTree};
use crate::error::{Error, Result};
use crate::flow::disjoint_paths;
use crate::graph::{AnnotatedGraph, VSet, Vertex};
use crate::grids::{AnnulusWall, Mesh, Path};
use crate::homogenize::runs;
use crate::report::{Kind, ValidityReport};
use crate::rendition::{crop, cycle_disk, Rendition};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// A leaf nest hung off the base cycles by its rails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VortexSegment {
    /// Cycles, innermost first.
    pub nest: Vec<Path>,
    /// Paths from the outermost base cycle to the inner nest cycle.
    pub rails: Vec<Path>,
    /// Cells of the inner disk of the nest.
    pub disk: BTreeSet<usize>,
    /// Depth of the leaf society when it was certified.
    pub depth: Option<usize>,
}

/// A surface wall in a host graph with vortex segments only: `k` base
/// cycles, innermost first, and per segment a nest of `k` cycles joined
/// to the base by `4k` rails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtendedSurfaceWall {
    pub base_cycles: Vec<Path>,
    pub segments: Vec<VortexSegment>,
}

impl ExtendedSurfaceWall {
    pub fn k(&self) -> usize {
        self.base_cycles.len()
    }

    pub fn signature(&self) -> (usize, usize, usize) {
        (0, 0, self.segments.len())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WallParams {
    pub r: usize,
    pub k: usize,
    pub leaves: usize,
    pub b: usize,
    pub d: usize,
    pub unchecked: bool,
    pub depth_bound: Option<usize>,
    /// Reserve and linkage order used instead of the closed forms when unchecked.
    pub sizes: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WallOutcome {
    RedMesh(Mesh),
    Wall { wall: ExtendedSurfaceWall, tree: NestTree, log: Vec<TraceEvent> },
}

fn drawn_cycle(owner: &BTreeMap<(Vertex, Vertex), usize>, c: &[Vertex]) -> bool {
    c.len() >= 3 && vset(c).len() == c.len() && cycle_edges(c).iter().all(|e| owner.contains_key(e))
}

fn nested(rho: &Rendition, cycles: &[Path], what: &str, report: &mut ValidityReport) -> Vec<BTreeSet<usize>> {
    let disks: Vec<BTreeSet<usize>> =
        cycles.iter().map(|c| cycle_disk(rho, c).map(|d| d.cells).unwrap_or_default()).collect();
    for i in 1..cycles.len() {
        if !vset(&cycles[i]).is_disjoint(&vset(&cycles[i - 1])) || !disks[i - 1].is_subset(&disks[i]) {
            report.push(Kind::Closure, format!("{what} cycles {i} and {} are not nested", i + 1));
        }
    }
    disks
}

/// Checks the base cycles, segment nests, rails, their cyclic order and
/// that every vortex and red vertex sits in a segment disk.
pub fn validate_extended_wall(g: &AnnotatedGraph, rho: &Rendition, w: &ExtendedSurfaceWall) -> ValidityReport {
    let mut report = ValidityReport::new();
    let k = w.k();
    if k == 0 {
        report.push(Kind::Signature, "no base cycles");
        return report;
    }
    let owner = rho.edge_cells();
    let all_cycles = w.base_cycles.iter().chain(w.segments.iter().flat_map(|s| &s.nest));
    for c in all_cycles {
        if !drawn_cycle(&owner, c) || cycle_edges(c).iter().any(|&(u, v)| !g.has_edge(u, v)) {
            report.push(Kind::Closure, "a cycle is not a drawn cycle of the graph");
            return report;
        }
    }
    let base = nested(rho, &w.base_cycles, "base", &mut report);
    let base_ring: VSet = w.base_cycles.iter().flatten().copied().collect();
    let outer = &w.base_cycles[k - 1];
    let outer_pos: BTreeMap<Vertex, usize> = outer.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut seen = VSet::new();
    let mut starts = Vec::new();
    let mut outer_disks = Vec::new();
    for (i, seg) in w.segments.iter().enumerate() {
        if seg.nest.len() != k {
            report.push(Kind::Signature, format!("segment {} has {} nest cycles, expected {k}", i + 1, seg.nest.len()));
            continue;
        }
        if seg.rails.len() != 4 * k {
            report.push(Kind::Signature, format!("segment {} has {} rails, expected {}", i + 1, seg.rails.len(), 4 * k));
        }
        let disks = nested(rho, &seg.nest, &format!("segment {}", i + 1), &mut report);
        if disks[0] != seg.disk {
            report.push(Kind::Closure, format!("segment {} disk is not the inner disk of its nest", i + 1));
        }
        let own: VSet = seg.nest.iter().flatten().copied().collect();
        if !disks[k - 1].is_subset(&base[0]) || !own.is_disjoint(&base_ring) {
            report.push(Kind::Closure, format!("segment {} leaves the inner base disk", i + 1));
        }
        outer_disks.push((disks[k - 1].clone(), own));
        for (j, rail) in seg.rails.iter().enumerate() {
            let name = format!("segment {} rail {}", i + 1, j + 1);
            if rail.windows(2).any(|p| !g.has_edge(p[0], p[1])) {
                report.push(Kind::PathShape, format!("{name} uses a missing edge"));
            }
            if !rail.iter().all(|&v| seen.insert(v)) {
                report.push(Kind::Crossing, format!("{name} meets another rail"));
            }
            match (rail.first().and_then(|v| outer_pos.get(v)), rail.last()) {
                (Some(&p), Some(last)) if seg.nest[0].contains(last) => starts.push((p, i)),
                _ => report.push(Kind::Endpoint, format!("{name} does not join the outer base cycle to the inner nest cycle")),
            }
            for c in w.base_cycles.iter().chain(&seg.nest) {
                let n = runs(rail, &vset(c)).len();
                if n != 1 {
                    report.push(Kind::Crossing, format!("{name} meets a cycle in {n} subpaths"));
                }
            }
        }
    }
    for a in 0..outer_disks.len() {
        for b in a + 1..outer_disks.len() {
            if !outer_disks[a].0.is_disjoint(&outer_disks[b].0) || !outer_disks[a].1.is_disjoint(&outer_disks[b].1) {
                report.push(Kind::T3, format!("segments {} and {} overlap", a + 1, b + 1));
            }
        }
    }
    for (i, seg) in w.segments.iter().enumerate() {
        let others: VSet = outer_disks.iter().enumerate().filter(|&(j, _)| j != i).flat_map(|(_, d)| d.1.iter().copied()).collect();
        if seg.rails.iter().flatten().any(|v| others.contains(v)) {
            report.push(Kind::Crossing, format!("a rail of segment {} crosses another segment", i + 1));
        }
    }
    starts.sort();
    let blocks = starts.windows(2).filter(|p| p[0].1 != p[1].1).count()
        + usize::from(starts.len() > 1 && starts[0].1 != starts[starts.len() - 1].1);
    if w.segments.len() > 1 && blocks != w.segments.len() {
        report.push(Kind::CrossingOrder, "rails of a segment are not consecutive on the outer base cycle");
    }
    let covered: BTreeSet<usize> = w.segments.iter().flat_map(|s| s.disk.iter().copied()).collect();
    for c in rho.vortices() {
        if !covered.contains(&c) {
            report.push(Kind::T6, format!("vortex cell {c} lies outside every segment disk"));
        }
    }
    let inside: VSet = w
        .segments
        .iter()
        .flat_map(|s| {
            let ring = vset(&s.nest[0]);
            s.disk.iter().flat_map(|&c| rho.cells[c].vertices()).filter(move |v| !ring.contains(v)).collect::<Vec<_>>()
        })
        .collect();
    for &v in g.red() {
        if !inside.contains(&v) {
            report.push(Kind::ZConsistency, format!("red vertex {v} lies outside every segment disk"));
        }
    }
    report
}

/// Turns an annulus wall around every vortex and red vertex into a red
/// r-mesh or an extended surface wall over its `k` outermost cycles.
///
/// The inner cycles form a nest refined into a nest tree with radial paths
/// taken from the verticals; the first verticals are held back. Their
/// stretches outside the nest are joined to the inner cycles of the leaves
/// by one flow with `4k` sink copies per leaf.
pub fn nest_tree_to_surface_wall(
    g: &AnnotatedGraph,
    rho: &Rendition,
    w: &AnnulusWall,
    params: &WallParams,
    source: &dyn TransactionSource,
) -> Result<WallOutcome> {
    let WallParams { r, k, leaves, b, d, unchecked, depth_bound, sizes } = *params;
    let n = w.n();
    if k == 0 {
        return Err(Error::ParameterRange("k must be positive".into()));
    }
    let formula = r + 4 * k * (leaves + 2) * (leaves + 2);
    let (s, t) = match (unchecked, sizes) {
        (true, Some(st)) => st,
        _ => (formula, formula),
    };
    let nest_len = if unchecked { n.saturating_sub(k) } else { nest_bound(s, leaves) };
    if !unchecked && n != 4 * k + nest_len {
        return Err(Error::ParameterRange(format!("wall order {n} is not {}", 4 * k + nest_len)));
    }
    if nest_len + k > n || nest_len < 2 {
        return Err(Error::OrderTooSmall { have: n, need: k + 2 });
    }
    let reserved = if unchecked { 4 * k * (leaves + 1) } else { 4 * k * (leaves + 2) * (leaves + 1) };
    if w.m() < reserved + t {
        return Err(Error::OrderTooSmall { have: w.m(), need: reserved + t });
    }
    let report = w.validate(Some(g));
    if !report.is_valid() {
        return Err(Error::InvalidModel(report.to_string()));
    }
    let inner = cycle_disk(rho, &w.cycles[0])?;
    if rho.vortices().any(|c| !inner.cells.contains(&c)) {
        return Err(Error::Precondition("a vortex lies outside the inner wall cycle".into()));
    }
    let ring = vset(&w.cycles[0]);
    let inside: VSet = inner.cells.iter().flat_map(|&c| rho.cells[c].vertices()).filter(|v| !ring.contains(v)).collect();
    if !g.red().is_subset(&inside) {
        return Err(Error::Precondition("a red vertex lies outside the inner wall cycle".into()));
    }

    let nest = &w.cycles[..nest_len];
    let radial: Vec<Path> = w.verticals[reserved..reserved + t].iter().map(|v| v.iter().rev().copied().collect()).collect();
    let rp = RefineParams { r, s, t, leaves, b, d, unchecked, depth_bound };
    let run = refine_nest_tree(g, rho, nest, &radial, &rp, source)?;
    let tree = match run.outcome {
        RefineOutcome::RedMesh(m) => return Ok(WallOutcome::RedMesh(m)),
        RefineOutcome::Tree(tree) => tree,
    };
    let depths: BTreeMap<usize, usize> = run
        .log
        .iter()
        .filter_map(|e| match e {
            TraceEvent::Certified { leaf, depth } => Some((*leaf, *depth)),
            _ => None,
        })
        .collect();

    let cut = &w.cycles[nest_len - 1];
    let cut_set = vset(cut);
    let mut prefixes = Vec::new();
    for v in &w.verticals[..reserved] {
        let out: Path = v.iter().rev().copied().collect();
        let x = out.iter().rposition(|u| cut_set.contains(u)).ok_or_else(|| Error::InvalidModel("a vertical misses a wall cycle".into()))?;
        prefixes.push(out[..=x].to_vec());
    }
    let leaf_ids = tree.leaves();
    if leaf_ids.iter().any(|&l| tree.node(l).nest.len() < k) {
        return Err(Error::OrderTooSmall { have: tree.cycle_order + tree.reserve + 1, need: k });
    }
    let mut h = crop(g, rho, &cycle_disk(rho, cut)?);
    let behind: VSet = prefixes.iter().flat_map(|p| p[..p.len() - 1].iter().copied()).collect();
    h = h.without(&behind);
    for &l in &leaf_ids {
        let c1 = &tree.node(l).nest[0];
        let disk = cycle_disk(rho, c1)?;
        let ring = vset(c1);
        let interior: VSet = crop(g, rho, &disk).vertex_set().into_iter().filter(|v| !ring.contains(v)).collect();
        h = h.without(&interior);
    }
    let mut next = g.max_vertex().map_or(0, |v| v + 1).max(h.max_vertex().map_or(0, |v| v + 1));
    let mut sink_of: BTreeMap<Vertex, usize> = BTreeMap::new();
    for (i, &l) in leaf_ids.iter().enumerate() {
        for _ in 0..4 * k {
            h.add_vertex(next);
            for &v in &tree.node(l).nest[0] {
                if h.contains(v) {
                    h.add_edge(next, v)?;
                }
            }
            sink_of.insert(next, i);
            next += 1;
        }
    }
    let xs: VSet = prefixes.iter().map(|p| p[p.len() - 1]).collect();
    let ys: VSet = sink_of.keys().copied().collect();
    let demand = 4 * k * leaf_ids.len();
    let link = disjoint_paths(&h, &xs, &ys, Some(demand));
    if link.paths.len() < demand {
        return Err(Error::Unresolved(format!("only {} of {demand} rails reach the leaves", link.paths.len())));
    }
    let firsts: Vec<VSet> = leaf_ids.iter().map(|&l| vset(&tree.node(l).nest[0])).collect();
    let mut grouped: Vec<Vec<Path>> = vec![Vec::new(); leaf_ids.len()];
    for p in &link.paths {
        let body = &p[..p.len() - 1];
        let (stop, which) = body
            .iter()
            .enumerate()
            .find_map(|(i, v)| firsts.iter().position(|f| f.contains(v)).map(|j| (i, j)))
            .expect("every rail reaches an inner cycle");
        let pre = prefixes.iter().find(|q| q[q.len() - 1] == body[0]).expect("rail starts at a prefix");
        let mut rail = pre.clone();
        rail.extend(&body[1..=stop]);
        grouped[which].push(rail);
    }
    let mut segments = Vec::new();
    for (i, &l) in leaf_ids.iter().enumerate() {
        if grouped[i].len() < 4 * k {
            return Err(Error::Unresolved(format!("leaf {l} is reached by {} rails", grouped[i].len())));
        }
        grouped[i].truncate(4 * k);
        let seg_nest: Vec<Path> = tree.node(l).nest[..k].to_vec();
        let rails = resolve_regressions(&seg_nest, &grouped[i], &mut Vec::new())?;
        let disk = cycle_disk(rho, &seg_nest[0])?.cells;
        segments.push(VortexSegment { nest: seg_nest, rails, disk, depth: depths.get(&l).copied() });
    }
    let wall = ExtendedSurfaceWall { base_cycles: w.cycles[n - k..].to_vec(), segments };
    let report = validate_extended_wall(g, rho, &wall);
    if !report.is_valid() {
        return Err(Error::Unresolved(format!("linked wall fails its check: {report}")));
    }
    Ok(WallOutcome::Wall { wall, tree, log: run.log })
}
