use super::linear::{cyclic_agree, linear_decomposition_from_depth, validate_linear_decomposition, LinearDecomposition};
use crate::error::Result;
use crate::graph::{AnnotatedGraph, VSet, Vertex};
use crate::report::{Kind, ValidityReport};
use crate::rendition::{society_depth, validate_rendition, Cell, Rendition, Slot, Society, Surface};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// A vortex cell of the rendition with a path decomposition along its boundary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VortexData {
    pub cell: usize,
    pub decomposition: LinearDecomposition,
}

/// Apex set, a rendition of the rest in the plane or sphere, and a path
/// decomposition for each vortex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NearEmbedding {
    pub apex: VSet,
    pub rendition: Rendition,
    pub vortices: Vec<VortexData>,
}

impl NearEmbedding {
    /// Euler genus of the surface; renditions here live in the disk or sphere.
    pub fn genus(&self) -> usize {
        0
    }

    /// Largest path-decomposition width over the vortices.
    pub fn width(&self) -> usize {
        self.vortices.iter().map(|v| v.decomposition.width().saturating_sub(1)).max().unwrap_or(0)
    }
}

/// Checks every clause of a `k`-near embedding of `g` together with the
/// red condition: red vertices lie in the apex set or a vortex interior.
pub fn verify_near_embedding(g: &AnnotatedGraph, ne: &NearEmbedding, k: usize) -> ValidityReport {
    let mut rep = ValidityReport::new();
    let rho = &ne.rendition;
    if let Some(v) = ne.apex.iter().find(|&&v| !g.contains(v)) {
        rep.push(Kind::ApexBound, format!("apex vertex {v} is not in the graph"));
    }
    if ne.apex.len() > k {
        rep.push(Kind::ApexBound, format!("{} apex vertices exceed {k}", ne.apex.len()));
    }
    let rest = g.without(&ne.apex);
    for v in validate_rendition(&rest, rho).violations {
        rep.push(Kind::Embedding, v.to_string());
    }
    let cells: BTreeSet<usize> = rho.vortices().collect();
    if cells.len() > k {
        rep.push(Kind::VortexCount, format!("{} vortices exceed {k}", cells.len()));
    }
    let listed: Vec<usize> = ne.vortices.iter().map(|v| v.cell).collect();
    let distinct: BTreeSet<usize> = listed.iter().copied().collect();
    if distinct != cells || listed.len() != distinct.len() {
        rep.push(Kind::VortexBoundary, format!("decompositions given for cells {listed:?}, vortices are {cells:?}"));
    }
    for vd in &ne.vortices {
        let Some(cell) = rho.cells.get(vd.cell).filter(|c| c.vortex) else { continue };
        let ld = &vd.decomposition;
        let face: VSet = cell.nodes.iter().copied().collect();
        let path: VSet = ld.boundary.iter().copied().collect();
        if face != path {
            rep.push(Kind::VortexBoundary, format!("vortex {} decomposition is indexed by {path:?}, not {face:?}", vd.cell));
        } else if !cyclic_agree(&ld.boundary, &cell.nodes) {
            rep.push(Kind::CyclicOrder, format!("vortex {} decomposition leaves the cyclic order", vd.cell));
        }
        let soc = rho.vortex_society(&rest, vd.cell);
        for v in validate_linear_decomposition(&soc, ld).violations {
            if v.kind != Kind::CyclicOrder {
                rep.push(v.kind, format!("vortex {}: {}", vd.cell, v.detail));
            }
        }
        if ld.width().saturating_sub(1) > k {
            rep.push(Kind::Width, format!("vortex {} has width {} above {k}", vd.cell, ld.width() - 1));
        }
    }
    if ne.genus() > k {
        rep.push(Kind::Embedding, format!("genus {} exceeds {k}", ne.genus()));
    }
    let interior = rho.vortex_interior();
    for &v in g.red() {
        if !ne.apex.contains(&v) && !interior.contains(&v) {
            rep.push(Kind::RedCondition, format!("red vertex {v} is neither apex nor inside a vortex"));
        }
    }
    rep
}

/// A near embedding with one vortex holding everything: the non-red
/// vertices form its boundary and the red ones its interior. When nothing
/// would be drawn the whole graph becomes the apex set.
pub fn vortex_layout(g: &AnnotatedGraph) -> Result<NearEmbedding> {
    let omega: Vec<Vertex> = g.vertices().filter(|&v| !g.is_red(v)).collect();
    if omega.is_empty() || (g.m() == 0 && g.red().is_empty()) {
        let rendition = Rendition { surface: Surface::Sphere, cells: Vec::new(), boundary: Vec::new(), rotation: BTreeMap::new() };
        return Ok(NearEmbedding { apex: g.vertex_set(), rendition, vortices: Vec::new() });
    }
    let cell = Cell::vortex(omega.clone(), g.edges(), g.red().clone());
    let rotation = omega.iter().map(|&v| (v, vec![Slot::Cell(0)])).collect();
    let rendition = Rendition { surface: Surface::Sphere, cells: vec![cell], boundary: Vec::new(), rotation };
    let soc = Society::new(g.clone(), omega);
    let decomposition = linear_decomposition_from_depth(&soc, society_depth(&soc))?;
    Ok(NearEmbedding { apex: VSet::new(), rendition, vortices: vec![VortexData { cell: 0, decomposition }] })
}
