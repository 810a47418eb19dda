use super::embedding::{verify_near_embedding, vortex_layout, NearEmbedding};
use super::separator::{balanced_separator, Balance};
use super::{annotated_torso, validate_tree_decomposition, TreeDecomposition};
use crate::error::{Error, Result};
use crate::graph::{AnnotatedGraph, VSet, Vertex};
use crate::model::RedMinorModel;
use crate::oracle::has_red_grid_minor;
use crate::report::{Kind, ValidityReport};
use crate::rendition::validate_rendition;
use itertools::Itertools;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, VecDeque};

/// Size parameters of the assembly.
///
/// The asymptotic closed forms for `link`, `apex` and `width` are far beyond
/// any graph this crate can handle; [`Bounds::desk`] gives small values.
/// Only `breadth` has an explicit closed form, see [`paper_breadth`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    /// Balanced separators have at most `link` vertices; `|X| ≤ 3·link + 1`.
    pub link: usize,
    pub apex: usize,
    pub width: usize,
    pub breadth: usize,
}

/// `3/2 · (k²(3k² − 1) − 6k + 10)`.
pub fn paper_breadth(k: usize) -> usize {
    3 * (k * k * (3 * k * k - 1) + 10 - 6 * k) / 2
}

impl Bounds {
    pub fn desk(k: usize) -> Self {
        Self { link: k.saturating_sub(1).max(1), apex: 2 * k, width: 2 * k, breadth: paper_breadth(k.max(1)) }
    }

    pub fn x_bound(&self) -> usize {
        3 * self.link + 1
    }

    pub fn adhesion_bound(&self) -> usize {
        3 * self.link + self.apex + self.width + 3
    }

    pub fn apex_set_bound(&self) -> usize {
        3 * self.link + self.apex + 1
    }

    pub fn vortex_width_bound(&self) -> usize {
        2 * self.link + self.width + 1
    }

    /// The single parameter handed to [`verify_near_embedding`] for torsos.
    pub fn near_bound(&self) -> usize {
        self.apex_set_bound().max(self.vortex_width_bound()).max(self.breadth)
    }
}

/// Answer of a local structure oracle for a linked set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LocalOutcome {
    /// A separator of order at most `k² − 1` whose big side holds no red vertex.
    RedFree(VSet),
    RedGrid(RedMinorModel),
    /// A layout of the whole graph with red vertices only in the apex set or vortex interiors.
    Layout(NearEmbedding),
}

pub trait LocalOracle {
    fn local(&self, g: &AnnotatedGraph, x: &VSet, k: usize, bounds: &Bounds) -> Result<LocalOutcome>;
}

/// Exhaustive oracle for small graphs: a red grid if one exists, else a
/// red-free big side behind a small separator, else a one-vortex layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BruteOracle {
    pub cap: usize,
}

impl LocalOracle for BruteOracle {
    fn local(&self, g: &AnnotatedGraph, x: &VSet, k: usize, bounds: &Bounds) -> Result<LocalOutcome> {
        if let Some(m) = has_red_grid_minor(g, k, self.cap)? {
            return Ok(LocalOutcome::RedGrid(m));
        }
        let limit = (k * k).saturating_sub(1).min(bounds.link);
        let vs: Vec<Vertex> = g.vertices().collect();
        for size in 0..=limit.min(vs.len()) {
            for s in vs.iter().copied().combinations(size) {
                let s: VSet = s.into_iter().collect();
                if let Some(big) = big_component(g, x, &s) {
                    if big.iter().all(|&v| !g.is_red(v)) {
                        return Ok(LocalOutcome::RedFree(s));
                    }
                }
            }
        }
        Ok(LocalOutcome::Layout(vortex_layout(g)?))
    }
}

/// Declines every query.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RejectingOracle;

impl LocalOracle for RejectingOracle {
    fn local(&self, _: &AnnotatedGraph, _: &VSet, _: usize, _: &Bounds) -> Result<LocalOutcome> {
        Err(Error::OracleFailure("the local structure oracle declined".into()))
    }
}

/// The component of `G - S` holding more than two thirds of `x`.
fn big_component(g: &AnnotatedGraph, x: &VSet, s: &VSet) -> Option<VSet> {
    g.components_without(s).into_iter().find(|c| 3 * c.intersection(x).count() > 2 * x.len())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlobalDecomposition {
    pub td: TreeDecomposition,
    /// Near-embedding data of the annotated torso at every node outside `L`.
    pub embeddings: BTreeMap<usize, NearEmbedding>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GlobalOutcome {
    RedGrid(RedMinorModel),
    Decomposition(GlobalDecomposition),
}

enum Rec {
    Grid(RedMinorModel),
    Td(TreeDecomposition),
}

struct Driver<'a> {
    k: usize,
    bounds: Bounds,
    oracle: &'a dyn LocalOracle,
}

impl Driver<'_> {
    fn solve(&self, g: &AnnotatedGraph, mut x: VSet) -> Result<Rec> {
        let full = self.bounds.x_bound();
        if g.n() < full {
            return Ok(Rec::Td(TreeDecomposition::single(g.vertex_set())));
        }
        let spare: Vec<Vertex> = g.vertices().filter(|v| !x.contains(v)).take(full.saturating_sub(x.len())).collect();
        x.extend(spare);
        let measure = (g.n(), g.n() - x.len());
        match balanced_separator(g, &x, self.bounds.link)? {
            Balance::Separator(sep) => self.split(g, &x, &sep, measure),
            Balance::Linked(_) => match self.oracle.local(g, &x, self.k, &self.bounds)? {
                LocalOutcome::RedGrid(m) => {
                    let rep = m.verify(g)?;
                    if !rep.is_valid() {
                        return Err(Error::OracleFailure(format!("oracle grid is not a red minor: {rep}")));
                    }
                    Ok(Rec::Grid(m))
                }
                LocalOutcome::RedFree(sep) => self.red_free(g, &x, &sep, measure),
                LocalOutcome::Layout(ne) => self.layout(g, &x, &ne, measure),
            },
        }
    }

    fn recurse(&self, h: &AnnotatedGraph, xh: VSet, parent: (usize, usize)) -> Result<Rec> {
        if (h.n(), h.n() - xh.len()) >= parent {
            return Err(Error::Unresolved("a recursive piece does not shrink".into()));
        }
        self.solve(h, xh)
    }

    /// Separator case: one child per component of `G - S`. Separator
    /// vertices next to a red component elsewhere are red in the child.
    fn split(&self, g: &AnnotatedGraph, x: &VSet, sep: &VSet, measure: (usize, usize)) -> Result<Rec> {
        let comps = g.components_without(sep);
        let mut children = Vec::new();
        for (i, c) in comps.iter().enumerate() {
            let vs: VSet = c.union(sep).copied().collect();
            let mut h = g.induced(&vs);
            for &v in sep {
                let feeds = comps
                    .iter()
                    .enumerate()
                    .any(|(j, d)| j != i && d.iter().any(|&w| g.is_red(w)) && d.iter().any(|&w| g.has_edge(v, w)));
                if feeds {
                    h.set_red(v)?;
                }
            }
            let xh: VSet = sep.iter().chain(c.intersection(x)).copied().collect();
            match self.recurse(&h, xh, measure)? {
                Rec::Grid(m) => return lift(g, &vs, m).map(Rec::Grid),
                Rec::Td(td) => children.push(td),
            }
        }
        let root: VSet = x.union(sep).copied().collect();
        Ok(Rec::Td(TreeDecomposition::graft(root, children, Vec::new())))
    }

    /// The big side is red-free and becomes a leaf of `L`.
    fn red_free(&self, g: &AnnotatedGraph, x: &VSet, sep: &VSet, measure: (usize, usize)) -> Result<Rec> {
        if sep.len() > self.bounds.link {
            return Err(Error::OracleFailure(format!("separator of {} vertices exceeds link {}", sep.len(), self.bounds.link)));
        }
        let big = big_component(g, x, sep)
            .filter(|b| b.iter().all(|&v| !g.is_red(v)))
            .ok_or_else(|| Error::OracleFailure("separator has no red-free big side".into()))?;
        let mut children = Vec::new();
        for c in g.components_without(sep).into_iter().filter(|c| *c != big) {
            let vs: VSet = c.union(sep).copied().collect();
            let xh: VSet = sep.iter().chain(c.intersection(x)).copied().collect();
            match self.recurse(&g.induced(&vs), xh, measure)? {
                Rec::Grid(m) => return Ok(Rec::Grid(m)),
                Rec::Td(td) => children.push(td),
            }
        }
        let root: VSet = x.union(sep).copied().collect();
        let leaf: VSet = big.iter().chain(&root).copied().collect();
        Ok(Rec::Td(TreeDecomposition::graft(root, children, vec![leaf])))
    }

    /// One child per non-vortex cell and per vortex bag. Pieces that would
    /// not shrink or whose boundary is too large are absorbed by the root.
    fn layout(&self, g: &AnnotatedGraph, x: &VSet, ne: &NearEmbedding, measure: (usize, usize)) -> Result<Rec> {
        let a = &ne.apex;
        let rho = &ne.rendition;
        let rest = g.without(a);
        let rep = validate_rendition(&rest, rho);
        if !rep.is_valid() {
            return Err(Error::OracleFailure(format!("layout is not a rendition: {rep}")));
        }
        let mut root: VSet = rho.nodes().iter().chain(a).chain(x).copied().collect();
        let mut pieces: Vec<VSet> = Vec::new();
        for (i, cell) in rho.cells.iter().enumerate() {
            if cell.vortex {
                let vd = ne
                    .vortices
                    .iter()
                    .find(|v| v.cell == i)
                    .ok_or_else(|| Error::OracleFailure(format!("vortex {i} has no decomposition")))?;
                for adh in vd.decomposition.adhesion_sets() {
                    root.extend(adh);
                }
                pieces.extend(vd.decomposition.bags.iter().map(|y| y.union(a).copied().collect::<VSet>()));
            } else {
                pieces.push(cell.vertices().union(a).copied().collect());
            }
        }
        loop {
            let grow = pieces.iter().find(|p| {
                !p.is_subset(&root) && (p.len() >= g.n() || p.intersection(&root).count() > self.bounds.x_bound())
            });
            match grow {
                Some(p) => root.extend(p.iter().copied()),
                None => break,
            }
        }
        let mut children = Vec::new();
        for p in pieces.iter().filter(|p| !p.is_subset(&root)) {
            let xh: VSet = p.intersection(&root).copied().collect();
            match self.recurse(&g.induced(p), xh, measure)? {
                Rec::Grid(m) => return Ok(Rec::Grid(m)),
                Rec::Td(td) => children.push(td),
            }
        }
        Ok(Rec::Td(TreeDecomposition::graft(root, children, Vec::new())))
    }
}

/// Extends branch sets that relied on a red mark copied onto a separator
/// vertex by a path outside `inside` to a red vertex of `g`.
fn lift(g: &AnnotatedGraph, inside: &VSet, mut m: RedMinorModel) -> Result<RedMinorModel> {
    let mut used: VSet = m.base.support();
    for p in m.red_pattern.clone() {
        let set = m.base.branch.get(&p).cloned().unwrap_or_default();
        if set.iter().any(|&v| g.is_red(v)) {
            continue;
        }
        let mut prev: BTreeMap<Vertex, Vertex> = BTreeMap::new();
        let mut queue: VecDeque<Vertex> = set.iter().copied().collect();
        let mut hit = None;
        while let Some(u) = queue.pop_front() {
            if g.is_red(u) {
                hit = Some(u);
                break;
            }
            for w in g.neighbors(u) {
                if !inside.contains(&w) && !used.contains(&w) && !prev.contains_key(&w) {
                    prev.insert(w, u);
                    queue.push_back(w);
                }
            }
        }
        let mut cur = hit.ok_or_else(|| Error::Unresolved(format!("branch set {p} cannot reach a red vertex")))?;
        let branch = m.base.branch.get_mut(&p).expect("red pattern vertex has a branch set");
        while !branch.contains(&cur) {
            branch.insert(cur);
            used.insert(cur);
            cur = prev[&cur];
        }
    }
    Ok(m)
}

/// The two outcomes of the local-to-global assembly: a red `k × k` grid
/// minor, or a rooted decomposition with `x` in the root bag whose non-`L`
/// torsos carry near-embedding data.
///
/// Principal cases: fewer than `3·link + 1` vertices give one bag, and a
/// small `x` is padded. Then a balanced separator splits the graph, or the
/// oracle is asked about the linked set.
pub fn local_to_global(
    g: &AnnotatedGraph,
    k: usize,
    x: &VSet,
    oracle: &dyn LocalOracle,
    bounds: &Bounds,
) -> Result<GlobalOutcome> {
    g.check_vertices(x)?;
    if x.len() > bounds.x_bound() {
        return Err(Error::SizeBound { size: x.len(), bound: bounds.x_bound() });
    }
    let driver = Driver { k, bounds: *bounds, oracle };
    match driver.solve(g, x.clone())? {
        Rec::Grid(m) => Ok(GlobalOutcome::RedGrid(m)),
        Rec::Td(td) => {
            let mut embeddings = BTreeMap::new();
            for t in (0..td.len()).filter(|t| !td.leaves.contains(t)) {
                embeddings.insert(t, vortex_layout(&annotated_torso(g, &td, t)?)?);
            }
            Ok(GlobalOutcome::Decomposition(GlobalDecomposition { td, embeddings }))
        }
    }
}

/// Rechecks a decomposition outcome: tree-decomposition axioms, `x` in the
/// root bag, the adhesion bound, the leaf condition on `L` and the near
/// embedding of every other torso.
pub fn check_global(g: &AnnotatedGraph, x: &VSet, out: &GlobalDecomposition, bounds: &Bounds) -> Result<ValidityReport> {
    let td = &out.td;
    let mut rep = validate_tree_decomposition(g, td);
    if !rep.is_valid() {
        return Ok(rep);
    }
    if !x.is_subset(&td.bags[td.root]) {
        rep.push(Kind::BoundaryBag, "x is not contained in the root bag");
    }
    if td.adhesion() > bounds.adhesion_bound() {
        rep.push(Kind::Adhesion, format!("adhesion {} exceeds {}", td.adhesion(), bounds.adhesion_bound()));
    }
    for t in 0..td.len() {
        if td.leaves.contains(&t) {
            let nb = td.neighbors(t);
            let ok = match nb[..] {
                [d] => td.bags[t].iter().filter(|v| g.is_red(**v)).all(|v| td.bags[d].contains(v)),
                [] => td.bags[t].iter().all(|&v| !g.is_red(v)),
                _ => false,
            };
            if !ok {
                rep.push(Kind::LeafCondition, format!("leaf {t} holds a red vertex missing from its neighbour"));
            }
            continue;
        }
        let Some(ne) = out.embeddings.get(&t) else {
            rep.push(Kind::Embedding, format!("node {t} has no near embedding"));
            continue;
        };
        let torso = annotated_torso(g, td, t)?;
        for v in verify_near_embedding(&torso, ne, bounds.near_bound()).violations {
            rep.push(v.kind, format!("node {t}: {}", v.detail));
        }
    }
    Ok(rep)
}
