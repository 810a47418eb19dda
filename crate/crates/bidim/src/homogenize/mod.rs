//! Red/blank dichotomies for meshes and transactions, and the routines that
//! route red meshes and red grid minors out of red structures.
//!
//! A brick `B` of a mesh drawn in a rendition owns the subgraph `H_B`: the
//! cells carrying edges of `B` together with every cell on the side of its
//! trace away from the mesh perimeter. The brick is red when `H_B` holds a
//! red vertex.

mod mesh;
mod transaction;
mod wall;

pub use mesh::{collapse_side, fully_red_mesh, homogenize_flat_mesh, red_grid_from_red_mesh, FlatHomogenization};
pub use transaction::{
    blank_or_red_orthogonal, homogenize_transaction, is_blank_transaction, is_r_blank, is_red_transaction,
    nest_mesh, red_mesh_from_red_transaction, select_flat_transaction, OrthogonalOutcome, TransactionArm,
};
pub(crate) use transaction::{arc, runs};
pub use wall::{red_flat_wall, red_mesh_from_surface_wall, FlatMeshAnswer, FlatMeshOracle, FlatWallOutcome, RenditionOracle};

use crate::error::Result;
use crate::graph::{edge, AnnotatedGraph, VSet, Vertex};
use crate::grids::Mesh;
use crate::rendition::{sides, trace, Rendition, Surface};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;


#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tag {
    Red,
    Blank,
}

/// Cells of `H_B` for the brick cycle `cycle`; `outside` marks vertices that
/// lie beyond the brick, such as the rest of the mesh perimeter.
pub(crate) fn brick_cells(rho: &Rendition, cycle: &[Vertex], outside: &VSet) -> Result<BTreeSet<usize>> {
    let tr = trace(rho, cycle, true)?;
    let sd = sides(rho, &tr)?;
    let on: VSet = cycle.iter().copied().collect();
    let touches = |cells: &BTreeSet<usize>| {
        cells.iter().any(|&c| rho.cells[c].vertices().iter().any(|v| outside.contains(v) && !on.contains(v)))
    };
    let vortex = |cells: &BTreeSet<usize>| cells.iter().any(|&c| rho.cells[c].vortex);
    let left = match (touches(&sd.left), touches(&sd.right)) {
        (false, true) => true,
        (true, false) => false,
        _ => match (rho.surface, sd.outer_left) {
            (Surface::Disk, Some(o)) => !o,
            _ => match (vortex(&sd.left), vortex(&sd.right)) {
                (false, true) => true,
                (true, false) => false,
                _ => sd.left.len() <= sd.right.len(),
            },
        },
    };
    let mut cells = sd.side(left).clone();
    let owner = rho.edge_cells();
    let k = cycle.len();
    cells.extend((0..k).filter_map(|i| owner.get(&edge(cycle[i], cycle[(i + 1) % k])).copied()));
    Ok(cells)
}

pub(crate) fn cells_hit_red(g: &AnnotatedGraph, rho: &Rendition, cells: &BTreeSet<usize>) -> bool {
    cells.iter().any(|&c| rho.cells[c].vertices().iter().any(|&v| g.is_red(v)))
}

pub(crate) fn cells_vertices(rho: &Rendition, cells: &BTreeSet<usize>) -> VSet {
    cells.iter().flat_map(|&c| rho.cells[c].vertices()).collect()
}

/// `H_B` for the `(i, j)`-brick (1-based).
pub fn brick_subgraph(g: &AnnotatedGraph, rho: &Rendition, mesh: &Mesh, i: usize, j: usize) -> Result<AnnotatedGraph> {
    let b = mesh.brick(i, j)?;
    let cells = brick_cells(rho, &b.cycle, &mesh.perimeter())?;
    Ok(rho.sigma(g, cells))
}

/// Whether `H_B` is red, indexed `[i - 1][j - 1]`.
pub fn brick_red_table(g: &AnnotatedGraph, rho: &Rendition, mesh: &Mesh) -> Result<Vec<Vec<bool>>> {
    let t = mesh.checked_table()?;
    let perimeter = mesh.perimeter();
    (1..mesh.rows())
        .map(|i| {
            (1..mesh.cols())
                .map(|j| {
                    let b = mesh.brick_with(&t, i, j);
                    Ok(cells_hit_red(g, rho, &brick_cells(rho, &b.cycle, &perimeter)?))
                })
                .collect()
        })
        .collect()
}

pub fn is_red_mesh(g: &AnnotatedGraph, rho: &Rendition, mesh: &Mesh) -> Result<bool> {
    Ok(brick_red_table(g, rho, mesh)?.iter().flatten().all(|&b| b))
}

pub fn is_blank_mesh(g: &AnnotatedGraph, rho: &Rendition, mesh: &Mesh) -> Result<bool> {
    Ok(brick_red_table(g, rho, mesh)?.iter().flatten().all(|&b| !b))
}

/// The tag of a homogeneous mesh, `None` when it has red and blank bricks.
pub fn homogeneity(g: &AnnotatedGraph, rho: &Rendition, mesh: &Mesh) -> Result<Option<Tag>> {
    let table = brick_red_table(g, rho, mesh)?;
    let all = |want: bool| table.iter().flatten().all(|&b| b == want);
    Ok(if all(true) {
        Some(Tag::Red)
    } else if all(false) {
        Some(Tag::Blank)
    } else {
        None
    })
}
