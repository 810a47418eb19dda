use super::cells_hit_red;
use super::mesh::route_red_row;
use crate::error::{Error, Result};
use crate::graph::{edge, AnnotatedGraph, VSet, Vertex};
use crate::grids::{Mesh, Path};
use crate::rendition::{
    classify_transaction, container, crop, cycle_disk, is_blank, is_exposed, is_rho_flat, restrict, strip_society,
    strips, validate_rendition, Rendition, Society, Transaction, TransactionKind,
};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// One arm of the transaction dichotomy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransactionArm {
    Blank(Transaction),
    Red(Transaction),
}

/// No strip holds a red vertex.
pub fn is_blank_transaction(s: &Society, t: &Transaction) -> Result<bool> {
    Ok(strips(s, t)?.iter().all(|h| h.red().is_empty()))
}

/// Every strip other than the first and the last holds a red vertex.
pub fn is_red_transaction(s: &Society, t: &Transaction) -> Result<bool> {
    let hs = strips(s, t)?;
    let n = hs.len();
    Ok(hs.iter().enumerate().all(|(i, h)| i == 0 || i + 1 >= n || !h.red().is_empty()))
}

fn check_strip_flat(s: &Society, rho: &Rendition, t: &Transaction, paths: &[Path]) -> Result<()> {
    if classify_transaction(s, t)?.kind != TransactionKind::Planar {
        return Err(Error::NotFlat("the transaction is not planar".into()));
    }
    if !is_rho_flat(rho, paths).map_err(|e| Error::NotFlat(e.to_string()))? {
        return Err(Error::NotFlat("a vortex lies between the outer paths".into()));
    }
    let strip = strip_society(s, t)?;
    let owner = rho.edge_cells();
    let inside = rho.vortex_interior();
    let drawn = strip.graph.edges().all(|e| owner.get(&e).is_some_and(|&c| !rho.cells[c].vortex));
    if !drawn || strip.graph.vertices().any(|v| inside.contains(&v)) {
        return Err(Error::NotFlat("the strip society reaches into a vortex".into()));
    }
    Ok(())
}

/// Splits a flat transaction of order `q·p` into `q` blocks of `p`
/// consecutive paths. The first block whose strips carry no red vertex is
/// returned as a blank transaction; if every block is red, the first paths
/// of the blocks form a red transaction of order `q`.
pub fn homogenize_transaction(s: &Society, rho: &Rendition, t: &Transaction, q: usize, p: usize) -> Result<TransactionArm> {
    if q < 2 || p < 2 {
        return Err(Error::ParameterRange(format!("q = {q} and p = {p} must be at least 2")));
    }
    if t.order() != q * p {
        return Err(Error::OrderMismatch { have: t.order(), q, p });
    }
    let paths = t.natural_paths(s)?;
    check_strip_flat(s, rho, t, &paths)?;
    let red: Vec<bool> = strips(s, t)?.iter().map(|h| !h.red().is_empty()).collect();
    for b in 0..q {
        if red[b * p..b * p + p - 1].iter().all(|&x| !x) {
            return Ok(TransactionArm::Blank(Transaction::new(paths[b * p..(b + 1) * p].to_vec())));
        }
    }
    Ok(TransactionArm::Red(Transaction::new((0..q).map(|b| paths[b * p].clone()).collect())))
}

/// Maximal subpaths of `path` on vertices of `on`, as inclusive index ranges.
pub(crate) fn runs(path: &[Vertex], on: &VSet) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, v) in path.iter().enumerate() {
        match (on.contains(v), start) {
            (true, None) => start = Some(i),
            (false, Some(a)) => {
                out.push((a, i - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(a) = start {
        out.push((a, path.len() - 1));
    }
    out
}

/// The two crossings of every path with every cycle, `[path][cycle]`.
fn crossings(cycles: &[Path], paths: &[Path]) -> Result<Vec<Vec<[(usize, usize); 2]>>> {
    paths
        .iter()
        .enumerate()
        .map(|(j, p)| {
            cycles
                .iter()
                .enumerate()
                .map(|(k, c)| {
                    let on: VSet = c.iter().copied().collect();
                    match runs(p, &on).as_slice() {
                        [a, b] => Ok([*a, *b]),
                        rs => Err(Error::NotOrthogonal(format!(
                            "path {} meets cycle {} in {} subpaths",
                            j + 1,
                            k + 1,
                            rs.len()
                        ))),
                    }
                })
                .collect()
        })
        .collect()
}

/// The shortest stretch of a cycle from a vertex of `from` to a vertex of
/// `to` avoiding `forbid`, with no other vertex of `from` or `to` on it.
pub(crate) fn arc(cycle: &[Vertex], from: &VSet, to: &VSet, forbid: &VSet) -> Option<Path> {
    let n = cycle.len();
    let mut best: Option<Path> = None;
    for s in (0..n).filter(|&s| from.contains(&cycle[s])) {
        for step in [1, n - 1] {
            let (mut start, mut k, mut len) = (s, s, 0);
            for _ in 1..n {
                k = (k + step) % n;
                len += 1;
                let v = cycle[k];
                if forbid.contains(&v) {
                    break;
                }
                if from.contains(&v) {
                    start = k;
                    len = 0;
                    continue;
                }
                if to.contains(&v) {
                    let seg: Path = (0..=len).map(|t| cycle[(start + t * step) % n]).collect();
                    if best.as_ref().is_none_or(|b| seg.len() < b.len()) {
                        best = Some(seg);
                    }
                    break;
                }
            }
        }
    }
    best
}

/// The `(2c × m)`-mesh formed by `c` nest cycles (outermost first) and `m`
/// paths crossing each of them twice, in natural order.
///
/// Rows are the arcs of the cycles between the first and last path on the
/// entry side, outermost first, followed by the arcs on the exit side,
/// innermost first. Columns are the paths between their outer crossings.
pub fn nest_mesh(g: &AnnotatedGraph, cycles: &[Path], paths: &[Path]) -> Result<Mesh> {
    let c = cycles.len();
    let m = paths.len();
    if c == 0 || m < 2 {
        return Err(Error::ParameterRange(format!("{c} cycles and {m} paths cannot form a mesh")));
    }
    let x = crossings(cycles, paths)?;
    let vertical: Vec<Path> = paths.iter().zip(&x).map(|(p, xs)| p[xs[0][0].1..=xs[0][1].0].to_vec()).collect();
    let vfirst: VSet = vertical[0].iter().copied().collect();
    let vlast: VSet = vertical[m - 1].iter().copied().collect();
    let mut horizontal = Vec::with_capacity(2 * c);
    let order: Vec<(usize, usize)> = (0..c).map(|k| (k, 0)).chain((0..c).rev().map(|k| (k, 1))).collect();
    for (k, side) in order {
        let range_set = |j: usize, sd: usize| -> VSet {
            let (a, b) = x[j][k][sd];
            paths[j][a..=b].iter().copied().collect()
        };
        let from: VSet = range_set(0, side).intersection(&vfirst).copied().collect();
        let to: VSet = range_set(m - 1, side).intersection(&vlast).copied().collect();
        let forbid: VSet = (0..m).flat_map(|j| range_set(j, 1 - side)).collect();
        let row = arc(&cycles[k], &from, &to, &forbid)
            .ok_or_else(|| Error::NotOrthogonal(format!("cycle {} has no arc joining the outer paths", k + 1)))?;
        horizontal.push(row);
    }
    let mesh = Mesh::new(horizontal, vertical);
    let report = mesh.validate(Some(g));
    if !report.is_valid() {
        return Err(Error::NotOrthogonal(format!("nest and paths do not form a mesh: {report}")));
    }
    Ok(mesh)
}

/// A red r-mesh from a red exposed transaction through a nest of order
/// `r + 2` (innermost cycle first) around the vortex of a blank cylindrical
/// rendition. `rho_strip` is a vortex-free rendition of the strip society.
///
/// Every third path is kept; the mesh on the outer `r + 1` cycles and those
/// paths has its middle row of bricks red and is routed into an r-mesh.
pub fn red_mesh_from_red_transaction(
    s: &Society,
    rho: &Rendition,
    nest: &[Path],
    t: &Transaction,
    rho_strip: &Rendition,
    r: usize,
) -> Result<Mesh> {
    if r < 2 {
        return Err(Error::ParameterRange(format!("r = {r} is below 2")));
    }
    if nest.len() < r + 2 {
        return Err(Error::OrderTooSmall { have: nest.len(), need: r + 2 });
    }
    let rp = r * (r - 1);
    let need = 3 * rp - 2;
    if t.order() < need {
        return Err(Error::OrderTooSmall { have: t.order(), need });
    }
    let g = &s.graph;
    if !is_blank(rho, g) {
        return Err(Error::Precondition("the cylindrical rendition is not blank".into()));
    }
    let paths = t.natural_paths(s)?;
    crossings(&nest[..r + 2], &paths)?;
    if !is_exposed(g, rho, &nest[0], &paths)? {
        return Err(Error::NotExposed("a path avoids the inner disk".into()));
    }
    let hs = strips(s, t)?;
    if let Some(m) = (0..rp - 1).find(|&m| hs[3 * m + 1].red().is_empty()) {
        return Err(Error::NotRed(format!("strip {} holds no red vertex", 3 * m + 2)));
    }
    let strip = strip_society(s, t)?;
    if rho_strip.breadth() > 0 || !validate_rendition(&strip.graph, rho_strip).is_valid() {
        return Err(Error::Precondition("the strip rendition is not a vortex-free rendition of the strip society".into()));
    }
    let kept: Vec<Path> = (0..rp).map(|m| paths[3 * m].clone()).collect();
    let cycles: Vec<Path> = nest[1..r + 2].iter().rev().cloned().collect();
    let mesh = nest_mesh(&strip.graph, &cycles, &kept)?;
    route_red_row(&strip.graph, rho_strip, &mesh, r, r + 1)
}

fn avoids_vortices(rho: &Rendition, paths: &[Path]) -> bool {
    let owner = rho.edge_cells();
    let inside = rho.vortex_interior();
    paths.iter().all(|p| {
        p.iter().all(|v| !inside.contains(v))
            && p.windows(2).all(|w| owner.get(&edge(w[0], w[1])).is_some_and(|&c| !rho.cells[c].vortex))
    }) && is_rho_flat(rho, paths).unwrap_or(false)
}

/// A ρ-flat sub-transaction of order `p` from a transaction of order at
/// least `(b+1)(2bd+p)`, for a rendition of breadth at most `b` and depth
/// at most `d`.
///
/// The paths are cut into `b + 1` blocks of `2bd + p`; the middle `p` paths
/// of the first block whose container holds no vortex are returned.
pub fn select_flat_transaction(
    s: &Society,
    rho: &Rendition,
    t: &Transaction,
    p: usize,
    b: usize,
    d: usize,
) -> Result<Transaction> {
    if p == 0 {
        return Err(Error::ParameterRange("p must be positive".into()));
    }
    if rho.breadth() > b {
        return Err(Error::Precondition(format!("rendition breadth {} exceeds {b}", rho.breadth())));
    }
    let depth = rho.depth(&s.graph);
    if depth > d {
        return Err(Error::Precondition(format!("rendition depth {depth} exceeds {d}")));
    }
    let block = 2 * b * d + p;
    let need = (b + 1) * block;
    if t.order() < need {
        return Err(Error::OrderTooSmall { have: t.order(), need });
    }
    let paths = t.natural_paths(s)?;
    (0..=b)
        .map(|i| &paths[i * block + b * d..i * block + b * d + p])
        .find(|cand| avoids_vortices(rho, cand))
        .map(|cand| Transaction::new(cand.to_vec()))
        .ok_or_else(|| Error::Precondition("no block is free of vortices".into()))
}

/// No cell between the outer paths or carrying an edge of them holds a red vertex.
pub fn is_r_blank(g: &AnnotatedGraph, rho: &Rendition, paths: &[Path]) -> Result<bool> {
    let (first, last) = (&paths[0], &paths[paths.len() - 1]);
    let mut cells = container(rho, first, last)?;
    cells.extend(carrying(rho, [first, last]));
    Ok(!cells_hit_red(g, rho, &cells))
}

fn carrying<'a>(rho: &Rendition, paths: impl IntoIterator<Item = &'a Path>) -> BTreeSet<usize> {
    let owner = rho.edge_cells();
    paths
        .into_iter()
        .flat_map(|p| p.windows(2).filter_map(|w| owner.get(&edge(w[0], w[1])).copied()).collect::<Vec<_>>())
        .collect()
}

/// Outcome of [`blank_or_red_orthogonal`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrthogonalOutcome {
    RedMesh(Mesh),
    Blank(Transaction),
}

/// A red r-mesh or an R-blank transaction of order `p` from a flat, exposed
/// transaction of order `r(r-1)·p` orthogonal to a nest of order `r + 1`
/// (innermost cycle first) that holds every red vertex in its inner disk.
pub fn blank_or_red_orthogonal(
    s: &Society,
    rho: &Rendition,
    nest: &[Path],
    t: &Transaction,
    r: usize,
    p: usize,
) -> Result<OrthogonalOutcome> {
    if r < 2 || p < 2 {
        return Err(Error::ParameterRange(format!("r = {r} and p = {p} must be at least 2")));
    }
    let rp = r * (r - 1);
    if t.order() != rp * p {
        return Err(Error::OrderMismatch { have: t.order(), q: rp, p });
    }
    if nest.len() < r + 1 {
        return Err(Error::OrderTooSmall { have: nest.len(), need: r + 1 });
    }
    let g = &s.graph;
    let disk = cycle_disk(rho, &nest[0])?;
    let inner = crop(g, rho, &disk).vertex_set();
    if !g.red().is_subset(&inner) {
        return Err(Error::Precondition("the nest is not R-consistent".into()));
    }
    let paths = t.natural_paths(s)?;
    if !is_rho_flat(rho, &paths).map_err(|e| Error::NotFlat(e.to_string()))? {
        return Err(Error::NotFlat("a vortex lies between the outer paths".into()));
    }
    if !is_exposed(g, rho, &nest[0], &paths)? {
        return Err(Error::NotExposed("a path avoids the inner disk".into()));
    }
    let x = crossings(&nest[..r + 1], &paths)?;
    let inside: Vec<Path> = paths.iter().zip(&x).map(|(pa, xs)| pa[xs[0][0].1..=xs[0][1].0].to_vec()).collect();
    let rho1 = restrict(rho, &disk);
    for b in 0..rp {
        let (first, last) = (&inside[b * p], &inside[b * p + p - 1]);
        let mut cells = container(&rho1, first, last)?;
        cells.extend(carrying(&rho1, [first, last]));
        if !cells_hit_red(g, &rho1, &cells) {
            return Ok(OrthogonalOutcome::Blank(Transaction::new(paths[b * p..(b + 1) * p].to_vec())));
        }
    }
    let kept: Vec<Path> = (0..rp).map(|b| paths[b * p].clone()).collect();
    let cycles: Vec<Path> = nest[..r + 1].iter().rev().cloned().collect();
    let mesh = nest_mesh(g, &cycles, &kept)?;
    Ok(OrthogonalOutcome::RedMesh(route_red_row(g, rho, &mesh, r, r + 1)?))
}
