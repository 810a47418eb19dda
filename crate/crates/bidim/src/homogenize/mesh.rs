use super::{brick_cells, brick_red_table, cells_hit_red, cells_vertices, is_red_mesh, Tag};
use crate::error::{Error, Result};
use crate::graph::{AnnotatedGraph, VSet, Vertex};
use crate::grids::{Crossing, Mesh, Path};
use crate::model::{MinorModel, RedMinorModel};
use crate::oracle::grid_pattern;
use crate::rendition::{is_grounded, sides, trace, Cell, Rendition, Slot, Surface};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Extends a path along `host` from its current end until it reaches the
/// index range `to`, stopping at the first vertex of the range.
fn extend_along(path: &mut Path, host: &[Vertex], to: (usize, usize)) -> Result<()> {
    let cur = *path.last().expect("routes start with a vertex");
    let a = host
        .iter()
        .position(|&v| v == cur)
        .ok_or_else(|| Error::InvalidModel(format!("route left its host path at {cur}")))?;
    if to.0 > a {
        path.extend_from_slice(&host[a + 1..=to.0]);
    } else if to.1 < a {
        path.extend(host[to.1..a].iter().rev());
    }
    Ok(())
}

/// The stretch of horizontal path `row` inside `[lo, hi]` from its last vertex
/// on `first` to its first vertex on `last`, oriented from `first`.
fn segment_between(p: &[Vertex], lo: usize, hi: usize, first: &VSet, last: &VSet) -> Result<Path> {
    let a: Vec<usize> = (lo..=hi).filter(|&k| first.contains(&p[k])).collect();
    let b: Vec<usize> = (lo..=hi).filter(|&k| last.contains(&p[k])).collect();
    let (Some(&amin), Some(&amax), Some(&bmin), Some(&bmax)) = (a.first(), a.last(), b.first(), b.last()) else {
        return Err(Error::InvalidModel("routed path misses a side row".into()));
    };
    if amax < bmin {
        Ok(p[amax..=bmin].to_vec())
    } else if bmax < amin {
        Ok(p[bmax..=amin].iter().rev().copied().collect())
    } else {
        Err(Error::InvalidModel("routed paths interleave on a side row".into()))
    }
}

/// The r-mesh routed through an `(h × w)`-mesh whose bricks between
/// horizontal paths `row` and `row + 1` (1-based) are all red.
///
/// Columns are grouped into `r - 1` blocks of `r`. Vertical path `v` runs
/// down through odd blocks and up through even blocks, turning in nested
/// U-shapes below or above the red row between consecutive blocks.
pub(crate) fn route_red_row(g: &AnnotatedGraph, rho: &Rendition, mesh: &Mesh, r: usize, row: usize) -> Result<Mesh> {
    let (h, w) = (mesh.rows(), mesh.cols());
    if r < 2 || row < r || row + r > h {
        return Err(Error::ParameterRange(format!("red row {row} of a {h}-row mesh cannot host an {r}-mesh")));
    }
    if w < r * (r - 1) {
        return Err(Error::OrderTooSmall { have: w, need: r * (r - 1) });
    }
    let t = mesh.checked_table()?;
    let perimeter = mesh.perimeter();
    for j in 1..w {
        let b = mesh.brick_with(&t, row, j);
        if !cells_hit_red(g, rho, &brick_cells(rho, &b.cycle, &perimeter)?) {
            return Err(Error::PreconditionRedMiss(row, j));
        }
    }
    let m0 = row - 1;
    let col = |i: usize, v: usize| if i % 2 == 1 { (i - 1) * r + v - 1 } else { i * r - v };
    let q = |c: usize, rr: usize, t: &[Vec<Crossing>]| t[rr][c].q;
    let p = |rr: usize, c: usize, t: &[Vec<Crossing>]| t[rr][c].p;
    let mut verticals = Vec::with_capacity(r);
    for v in 1..=r {
        let c1 = col(1, v);
        let mut path = vec![mesh.vertical[c1][q(c1, m0, &t).1]];
        for i in 1..r {
            let c = col(i, v);
            if i == r - 1 {
                let side = if i % 2 == 1 { m0 + 1 } else { m0 };
                extend_along(&mut path, &mesh.vertical[c], q(c, side, &t))?;
                break;
            }
            let turn = if i % 2 == 1 { m0 + 1 + (r - v) } else { m0 + 1 - v };
            extend_along(&mut path, &mesh.vertical[c], q(c, turn, &t))?;
            extend_along(&mut path, &mesh.horizontal[turn], p(turn, col(i + 1, v), &t))?;
        }
        verticals.push(path);
    }
    let first: VSet = verticals[0].iter().copied().collect();
    let last: VSet = verticals[r - 1].iter().copied().collect();
    let side_row = |i: usize| if i % 2 == 1 { m0 + 1 } else { m0 };
    let mut horizontals = Vec::with_capacity(r);
    for k in 0..r {
        let (rr, block) = if k == 0 { (m0, 1) } else { (side_row(k), k) };
        let (ca, cb) = (col(block, 1), col(block, r));
        let (pa, pb) = (p(rr, ca, &t), p(rr, cb, &t));
        let seg = segment_between(&mesh.horizontal[rr], pa.0.min(pb.0), pa.1.max(pb.1), &first, &last)?;
        horizontals.push(seg);
    }
    let out = Mesh::new(horizontals, verticals);
    let report = out.validate(Some(g));
    if !report.is_valid() {
        return Err(Error::InvalidModel(format!("routed mesh: {report}")));
    }
    if !is_red_mesh(g, rho, &out)? {
        return Err(Error::InvalidModel("routed mesh has a blank brick".into()));
    }
    Ok(out)
}

/// A red r-mesh from a grounded `(2(r+1) × r(r-1))`-mesh whose `(r, j)`-bricks
/// are all red, with `r` read off the row count.
pub fn fully_red_mesh(g: &AnnotatedGraph, rho: &Rendition, mesh: &Mesh) -> Result<Mesh> {
    let h = mesh.rows();
    if h < 6 || h % 2 == 1 {
        return Err(Error::ParameterRange(format!("expected 2(r+1) rows with r >= 2, got {h}")));
    }
    let r = h / 2 - 1;
    route_red_row(g, rho, mesh, r, r)
}

/// An all-red `k × k` grid model from a red `(3k-1)`-mesh.
///
/// Branch set `(i, j)` is `H_B` of the brick between paths `3i+1, 3i+2` and
/// `3j+1, 3j+2`, joined to its right neighbour along horizontal path `3i+1`
/// and to its lower neighbour along vertical path `3j+1`.
pub fn red_grid_from_red_mesh(g: &AnnotatedGraph, rho: &Rendition, mesh: &Mesh) -> Result<RedMinorModel> {
    let n = mesh.rows().min(mesh.cols());
    if n < 5 {
        return Err(Error::OrderTooSmall { have: n, need: 5 });
    }
    if !is_red_mesh(g, rho, mesh)? {
        return Err(Error::NotRed("the mesh has a blank brick".into()));
    }
    let k = (n + 1) / 3;
    let t = mesh.checked_table()?;
    let perimeter = mesh.perimeter();
    let mut sets: Vec<Vec<VSet>> = vec![vec![VSet::new(); k]; k];
    let mut claimed = VSet::new();
    for (i, row) in sets.iter_mut().enumerate() {
        for (j, set) in row.iter_mut().enumerate() {
            let b = mesh.brick_with(&t, 3 * i + 1, 3 * j + 1);
            *set = cells_vertices(rho, &brick_cells(rho, &b.cycle, &perimeter)?);
            if !set.is_disjoint(&claimed) {
                return Err(Error::InvalidModel(format!("brick subgraphs overlap at ({i}, {j})")));
            }
            claimed.extend(set.iter().copied());
        }
    }
    for i in 0..k {
        for j in 0..k {
            let mut extra = Vec::new();
            if j + 1 < k {
                let h = &mesh.horizontal[3 * i];
                extra.extend_from_slice(&h[t[3 * i][3 * j + 1].p.1 + 1..t[3 * i][3 * j + 3].p.0]);
            }
            if i + 1 < k {
                let v = &mesh.vertical[3 * j];
                extra.extend_from_slice(&v[t[3 * i + 1][3 * j].q.1 + 1..t[3 * i + 3][3 * j].q.0]);
            }
            sets[i][j].extend(extra.into_iter().filter(|v| !claimed.contains(v)));
        }
    }
    let branch: BTreeMap<Vertex, VSet> = sets
        .into_iter()
        .enumerate()
        .flat_map(|(i, row)| row.into_iter().enumerate().map(move |(j, s)| ((i * k + j + 1) as Vertex, s)))
        .collect();
    let model = RedMinorModel::all_red(MinorModel::new(grid_pattern(k), branch));
    let report = model.verify(g)?;
    if !report.is_valid() {
        return Err(Error::InvalidModel(format!("grid model: {report}")));
    }
    Ok(model)
}

/// Replaces every cell on one side of a grounded cycle by a single vortex
/// whose nodes are the trace nodes.
pub fn collapse_side(rho: &Rendition, cycle: &[Vertex], left: bool) -> Result<Rendition> {
    let tr = trace(rho, cycle, true)?;
    let sd = sides(rho, &tr)?;
    let gone = sd.side(left).clone();
    let mut nodes = tr.nodes();
    if !left {
        nodes.reverse();
    }
    let on: VSet = nodes.iter().copied().collect();
    let mut edges = BTreeSet::new();
    let mut interior = VSet::new();
    for &c in &gone {
        edges.extend(rho.cells[c].edges.iter().copied());
        interior.extend(rho.cells[c].vertices().into_iter().filter(|v| !on.contains(v)));
    }
    let kept: Vec<usize> = (0..rho.cells.len()).filter(|c| !gone.contains(c)).collect();
    let index: BTreeMap<usize, usize> = kept.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let vortex = kept.len();
    let mut cells: Vec<Cell> = kept.iter().map(|&c| rho.cells[c].clone()).collect();
    cells.push(Cell::vortex(nodes, edges, interior));

    let n = tr.steps.len();
    let incoming: BTreeMap<Vertex, (usize, usize)> =
        (0..n).map(|k| (tr.steps[k].to, (tr.steps[k].cell, tr.steps[(k + 1) % n].cell))).collect();
    let renumber = |s: Slot| match s {
        Slot::Cell(c) => Slot::Cell(index[&c]),
        Slot::Outer => Slot::Outer,
    };
    let mut rotation = BTreeMap::new();
    for (&v, rot) in &rho.rotation {
        let out: Vec<bool> = rot.iter().map(|s| matches!(s, Slot::Cell(c) if gone.contains(c))).collect();
        let d = rot.len();
        if !on.contains(&v) {
            if out.iter().all(|&b| !b) {
                rotation.insert(v, rot.iter().map(|&s| renumber(s)).collect());
            } else if out.iter().any(|&b| !b) {
                return Err(Error::Precondition(format!("node {v} off the trace straddles both sides")));
            }
            continue;
        }
        let starts: Vec<usize> = (0..d).filter(|&j| out[j] && !out[(j + d - 1) % d]).collect();
        let new: Vec<Slot> = match starts.as_slice() {
            [] if out.iter().all(|&b| b) => vec![Slot::Cell(vortex)],
            [] => {
                let (cin, cout) = incoming[&v];
                let after = if left { cout } else { cin };
                let at = rot.iter().position(|&s| s == Slot::Cell(after)).expect("trace cells sit at their nodes");
                let mut r: Vec<Slot> = rot.iter().map(|&s| renumber(s)).collect();
                r.insert(at + 1, Slot::Cell(vortex));
                r
            }
            [s] => {
                let mut r = vec![Slot::Cell(vortex)];
                r.extend((0..d).map(|t| (s + t) % d).filter(|&j| !out[j]).map(|j| renumber(rot[j])));
                r
            }
            _ => return Err(Error::Precondition(format!("the collapsed side meets node {v} twice"))),
        };
        rotation.insert(v, new);
    }
    Ok(Rendition { surface: rho.surface, cells, boundary: rho.boundary.clone(), rotation })
}

/// Output of [`homogenize_flat_mesh`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlatHomogenization {
    pub mesh: Mesh,
    pub rendition: Rendition,
    pub tag: Tag,
}

fn check_flat(rho: &Rendition, mesh: &Mesh) -> Result<()> {
    if rho.surface != Surface::Sphere || rho.breadth() != 1 {
        return Err(Error::NotFlat("expected a sphere rendition with exactly one vortex".into()));
    }
    if !is_grounded(rho, &mesh.edge_set()) {
        return Err(Error::NotFlat("the mesh is not grounded".into()));
    }
    let cycle = mesh.perimeter_cycle()?;
    let inner: VSet = mesh.vertex_set().difference(&mesh.perimeter()).copied().collect();
    let tr = trace(rho, &cycle, true)?;
    let sd = sides(rho, &tr)?;
    let holds = |cells: &BTreeSet<usize>| cells.iter().any(|&c| !rho.cells[c].vertices().is_disjoint(&inner));
    let vortex = |cells: &BTreeSet<usize>| cells.iter().any(|&c| rho.cells[c].vortex);
    let clean = match (holds(&sd.left), holds(&sd.right)) {
        (true, false) => !vortex(&sd.left),
        (false, true) => !vortex(&sd.right),
        _ => !vortex(&sd.left) || !vortex(&sd.right),
    };
    if clean {
        Ok(())
    } else {
        Err(Error::NotFlat("the vortex lies inside the mesh perimeter".into()))
    }
}

/// A homogeneous r-submesh of a flat `(r+2)²`-mesh.
///
/// The submesh on paths `α_i = i + (i-1)(r+2)` is scanned brick by brick. If
/// every brick is red, its interior r-submesh is returned with `rho`.
/// Otherwise the first blank brick in row-major order yields an r-submesh
/// strictly inside it, and every cell outside that brick is collapsed into
/// one vortex.
pub fn homogenize_flat_mesh(g: &AnnotatedGraph, rho: &Rendition, mesh: &Mesh, r: usize) -> Result<FlatHomogenization> {
    if r < 2 {
        return Err(Error::ParameterRange(format!("r = {r} is below 2")));
    }
    let need = (r + 2) * (r + 2);
    let have = mesh.rows().min(mesh.cols());
    if have < need {
        return Err(Error::OrderTooSmall { have, need });
    }
    check_flat(rho, mesh)?;
    let alpha: Vec<usize> = (1..=r + 2).map(|i| i + (i - 1) * (r + 2)).collect();
    let macro_mesh = mesh.submesh(&alpha, &alpha)?;
    let table = brick_red_table(g, rho, &macro_mesh)?;
    let blank = (0..=r).flat_map(|i| (0..=r).map(move |j| (i, j))).find(|&(i, j)| !table[i][j]);
    let Some((i, j)) = blank else {
        let sub = mesh.submesh(&alpha[1..=r], &alpha[1..=r])?;
        return Ok(FlatHomogenization { mesh: sub, rendition: rho.clone(), tag: Tag::Red });
    };
    let rows: Vec<usize> = (alpha[i] + 2..=alpha[i] + r + 1).collect();
    let cols: Vec<usize> = (alpha[j] + 2..=alpha[j] + r + 1).collect();
    let sub = mesh.submesh(&rows, &cols)?;
    let brick = macro_mesh.brick(i + 1, j + 1)?;
    let tr = trace(rho, &brick.cycle, true)?;
    let sd = sides(rho, &tr)?;
    let on = brick.vertices();
    let inside_left = sd
        .left
        .iter()
        .any(|&c| rho.cells[c].vertices().iter().any(|v| !on.contains(v) && sub.vertex_set().contains(v)));
    let rendition = collapse_side(rho, &brick.cycle, !inside_left)?;
    Ok(FlatHomogenization { mesh: sub, rendition, tag: Tag::Blank })
}
