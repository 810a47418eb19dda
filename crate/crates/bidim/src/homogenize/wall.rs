use super::mesh::{homogenize_flat_mesh, route_red_row};
use super::arc;
use super::Tag;
use crate::error::{Error, Result};
use crate::graph::{AnnotatedGraph, Separation, VSet, Vertex};
use crate::grids::{Mesh, Path, SegmentKind, SurfaceWall};
use crate::model::{red_clique_or_separation, CliqueOutcome, MinorModel, RedMinorModel};
use crate::rendition::{crop, cycle_disk_avoiding, validate_rendition, Rendition};
use serde::{Deserialize, Serialize};

/// A red r-mesh from a surface wall of order `r(r-1)` with signature
/// `(0, 0, r(r-1) - 1)` whose vortex segments each enclose a red vertex
/// inside their inner nest cycle.
///
/// The mesh rows are `r + 1` verticals on either side of the middle of the
/// wall segment. Column `j` follows the `j`-th base cycle and detours over
/// the nest of every vortex segment `S_i` with `i ≥ j`, so that the inner
/// disk of `S_j` falls into brick `(r + 1, j)`.
pub fn red_mesh_from_surface_wall(g: &AnnotatedGraph, rho: &Rendition, wall: &SurfaceWall, r: usize) -> Result<Mesh> {
    if r < 2 {
        return Err(Error::ParameterRange(format!("r = {r} is below 2")));
    }
    let n = wall.n;
    if n != r * (r - 1) {
        return Err(Error::ParameterRange(format!("wall order {n} is not r(r-1) for r = {r}")));
    }
    if wall.signature != (0, 0, n - 1) {
        return Err(Error::Precondition(format!("signature {:?} is not (0, 0, {})", wall.signature, n - 1)));
    }
    let report = wall.validate(Some(g));
    if !report.is_valid() {
        return Err(Error::InvalidModel(report.to_string()));
    }
    let simple: VSet = wall.simple_cycle().into_iter().collect();
    let w0 = wall.segments.iter().position(|s| s.kind == SegmentKind::Wall).expect("validated wall segment");
    let segs: Vec<_> = wall.segments[w0..].iter().chain(&wall.segments[..w0]).collect();
    let vortex: Vec<_> = segs.iter().filter(|s| s.kind == SegmentKind::Vortex).collect();
    for (i, s) in vortex.iter().enumerate() {
        let disk = cycle_disk_avoiding(rho, &s.nest()[0], &simple)?;
        if crop(g, rho, &disk).red().is_empty() {
            return Err(Error::MissingRedWitness(i + 1));
        }
    }

    let wv = segs[0].verticals();
    let mut horizontal: Vec<Path> = (0..=r).map(|i| wv[2 * n + i].clone()).collect();
    horizontal.extend((0..=r).map(|i| wv[2 * n - r - 1 + i].clone()));
    let first: VSet = horizontal[0].iter().copied().collect();
    let last: VSet = horizontal[2 * r + 1].iter().copied().collect();

    let broken = |what: &str| Error::InvalidModel(format!("surface wall routing failed at {what}"));
    let mut vertical = Vec::with_capacity(n);
    for j in 1..=n {
        let row: Vec<Vertex> = segs.iter().flat_map(|s| s.base[j - 1].iter().copied()).collect();
        let len = row.len();
        let mut pos = row.iter().rposition(|v| first.contains(v)).ok_or_else(|| broken("the first row"))?;
        let mut q = vec![row[pos]];
        let advance = |q: &mut Path, mut pos: usize, stop: &dyn Fn(Vertex) -> bool| {
            while !stop(row[pos]) {
                pos = (pos + 1) % len;
                q.push(row[pos]);
            }
            pos
        };
        for s in vortex.iter().skip(j - 1) {
            let rails = s.rails();
            let (up, down) = (&rails[j - 1], &rails[4 * n - j]);
            let on_row: VSet = s.base[j - 1].iter().copied().collect();
            pos = advance(&mut q, pos, &|v| on_row.contains(&v) && up.contains(&v));
            let cycle = &s.inner.as_ref().expect("vortex segment")[j - 1];
            let on_cycle: VSet = cycle.iter().copied().collect();
            let mut k = up.iter().position(|&v| v == row[pos]).ok_or_else(|| broken("a rail"))?;
            while !on_cycle.contains(&up[k]) {
                k -= 1;
                q.push(up[k]);
            }
            let target: VSet = down.iter().copied().filter(|v| on_cycle.contains(v)).collect();
            let forbid: VSet =
                rails[j..4 * n - j].iter().flatten().copied().filter(|v| on_cycle.contains(v)).collect();
            let a = arc(cycle, &VSet::from([up[k]]), &target, &forbid).ok_or_else(|| broken("a nest cycle"))?;
            q.extend(&a[1..]);
            let mut k = down.iter().position(|&v| v == a[a.len() - 1]).expect("arc ends on the rail");
            while !on_row.contains(&down[k]) {
                k += 1;
                q.push(down[k]);
            }
            pos = row.iter().position(|&v| v == down[k]).expect("rail meets the row");
        }
        advance(&mut q, pos, &|v| last.contains(&v));
        vertical.push(q);
    }

    let mesh = Mesh::new(horizontal, vertical);
    let report = mesh.validate(Some(g));
    if !report.is_valid() {
        return Err(Error::InvalidModel(report.to_string()));
    }
    route_red_row(g, rho, &mesh, r, r + 1)
}

/// What a flat-mesh oracle may return for a `(t, r)` query.
#[derive(Debug, Clone)]
pub enum FlatMeshAnswer {
    /// A model of a clique on at least `3t/2 + t` vertices.
    Clique(MinorModel),
    /// An apex set, a `(r+2)²`-submesh avoiding it and a rendition of the
    /// graph minus the apex set in which the submesh is flat.
    Flat { mesh: Mesh, apex: VSet, rendition: Rendition },
}

/// Source of clique minors or flat submeshes for [`red_flat_wall`].
pub trait FlatMeshOracle {
    fn find(&self, g: &AnnotatedGraph, mesh: &Mesh, t: usize, r: usize) -> Result<FlatMeshAnswer>;
}

impl<F> FlatMeshOracle for F
where
    F: Fn(&AnnotatedGraph, &Mesh, usize, usize) -> Result<FlatMeshAnswer>,
{
    fn find(&self, g: &AnnotatedGraph, mesh: &Mesh, t: usize, r: usize) -> Result<FlatMeshAnswer> {
        self(g, mesh, t, r)
    }
}

/// Answers with the leading `(r+2)²`-submesh, no apex vertices and a fixed
/// rendition of the whole graph.
#[derive(Debug, Clone)]
pub struct RenditionOracle {
    pub rendition: Rendition,
}

impl FlatMeshOracle for RenditionOracle {
    fn find(&self, _g: &AnnotatedGraph, mesh: &Mesh, _t: usize, r: usize) -> Result<FlatMeshAnswer> {
        let k = (r + 2) * (r + 2);
        let idx: Vec<usize> = (1..=k).collect();
        Ok(FlatMeshAnswer::Flat { mesh: mesh.submesh(&idx, &idx)?, apex: VSet::new(), rendition: self.rendition.clone() })
    }
}

/// Outcome of [`red_flat_wall`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FlatWallOutcome {
    Separation(Separation),
    RedClique(RedMinorModel),
    Mesh { mesh: Mesh, apex: VSet, tag: Tag, rendition: Rendition },
}

/// Queries `oracle` on a large mesh and turns its answer into a red clique,
/// a separation cutting the red set off from the mesh majority, or a
/// homogeneous flat r-mesh in the graph minus fewer than `9t²` apex vertices.
pub fn red_flat_wall(
    g: &AnnotatedGraph,
    mesh: &Mesh,
    t: usize,
    r: usize,
    oracle: &dyn FlatMeshOracle,
) -> Result<FlatWallOutcome> {
    if t == 0 || r < 2 {
        return Err(Error::ParameterRange(format!("t = {t} must be positive and r = {r} at least 2")));
    }
    let fail = |e: Error| Error::OracleFailure(e.to_string());
    match oracle.find(g, mesh, t, r).map_err(fail)? {
        FlatMeshAnswer::Clique(model) => Ok(match red_clique_or_separation(g, &model, t).map_err(fail)? {
            CliqueOutcome::RedClique(m) => FlatWallOutcome::RedClique(m),
            CliqueOutcome::Separation(s) => FlatWallOutcome::Separation(s),
        }),
        FlatMeshAnswer::Flat { mesh: sub, apex, rendition } => {
            if apex.len() >= 9 * t * t {
                return Err(Error::OracleFailure(format!("{} apex vertices for t = {t}", apex.len())));
            }
            let order = (r + 2) * (r + 2);
            if sub.rows().min(sub.cols()) < order {
                return Err(Error::OracleFailure(format!("submesh is smaller than {order}")));
            }
            let h = g.without(&apex);
            let report = sub.validate(Some(&h));
            if !report.is_valid() {
                return Err(Error::OracleFailure(format!("submesh: {report}")));
            }
            let report = validate_rendition(&h, &rendition);
            if !report.is_valid() {
                return Err(Error::OracleFailure(format!("rendition: {report}")));
            }
            let out = homogenize_flat_mesh(&h, &rendition, &sub, r).map_err(fail)?;
            Ok(FlatWallOutcome::Mesh { mesh: out.mesh, apex, tag: out.tag, rendition: out.rendition })
        }
    }
}
