use crate::error::{Error, Result};
use crate::flow;
use crate::graph::{AnnotatedGraph, Separation, SideTag, VSet, Vertex};
use crate::report::{Kind, ValidityReport};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Branch sets witnessing `pattern` as a minor of a host graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinorModel {
    pub pattern: AnnotatedGraph,
    pub branch: BTreeMap<Vertex, VSet>,
}

/// A minor model whose `red_pattern` branch sets must meet the red set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RedMinorModel {
    pub base: MinorModel,
    pub red_pattern: VSet,
}

impl MinorModel {
    pub fn new(pattern: AnnotatedGraph, branch: BTreeMap<Vertex, VSet>) -> Self {
        Self { pattern, branch }
    }

    /// The model of `pattern` in itself with singleton branch sets.
    pub fn identity(pattern: &AnnotatedGraph) -> Self {
        let branch = pattern.vertices().map(|v| (v, VSet::from([v]))).collect();
        Self { pattern: pattern.without_red(), branch }
    }

    pub fn order(&self) -> usize {
        self.pattern.n()
    }

    pub fn support(&self) -> VSet {
        self.branch.values().flatten().copied().collect()
    }

    /// Checks disjointness, connectivity, and realization of every pattern edge.
    pub fn verify(&self, g: &AnnotatedGraph) -> Result<ValidityReport> {
        for set in self.branch.values() {
            g.check_vertices(set)?;
        }
        let mut report = ValidityReport::new();
        let pv = self.pattern.vertex_set();
        let keys: VSet = self.branch.keys().copied().collect();
        if pv != keys {
            report.push(
                Kind::PatternMismatch,
                format!("branch keys {keys:?} differ from pattern vertices {pv:?}"),
            );
        }
        let mut owner: BTreeMap<Vertex, Vertex> = BTreeMap::new();
        for (&x, set) in &self.branch {
            if set.is_empty() {
                report.push(Kind::EmptyBranch, format!("branch set of {x} is empty"));
                continue;
            }
            for &v in set {
                if let Some(&y) = owner.get(&v) {
                    report.push(Kind::Overlap, format!("vertex {v} lies in the branch sets of {y} and {x}"));
                } else {
                    owner.insert(v, x);
                }
            }
            if !g.is_connected_set(set) {
                report.push(Kind::Disconnected, format!("branch set of {x} is disconnected"));
            }
        }
        for (x, y) in self.pattern.edges() {
            let (Some(bx), Some(by)) = (self.branch.get(&x), self.branch.get(&y)) else {
                continue;
            };
            if !bx.iter().any(|&u| g.neighbors(u).any(|w| by.contains(&w))) {
                report.push(Kind::MissingEdge, format!("no edge realizes pattern edge {x}-{y}"));
            }
        }
        Ok(report)
    }

    /// The side `X` of `sep` such that some branch set lies in `X ∖ Y`.
    pub fn majority(&self, sep: &Separation) -> Result<SideTag> {
        let order = sep.order();
        if order >= self.order() {
            return Err(Error::OrderTooLarge { order, bound: self.order() });
        }
        for tag in [SideTag::B, SideTag::A] {
            let strict = sep.strict(tag);
            if self.branch.values().any(|s| !s.is_empty() && s.is_subset(&strict)) {
                return Ok(tag);
            }
        }
        unreachable!("a separation of order below |V(H)| always has a majority side")
    }
}

impl RedMinorModel {
    pub fn all_red(base: MinorModel) -> Self {
        let red_pattern = base.pattern.vertex_set();
        Self { base, red_pattern }
    }

    pub fn verify(&self, g: &AnnotatedGraph) -> Result<ValidityReport> {
        let mut report = self.base.verify(g)?;
        for &x in &self.red_pattern {
            match self.base.branch.get(&x) {
                Some(set) if set.iter().any(|v| g.is_red(*v)) => {}
                Some(_) => report.push(Kind::RedMiss, format!("branch set of {x} holds no red vertex")),
                None => report.push(Kind::RedMiss, format!("red pattern vertex {x} has no branch set")),
            }
        }
        Ok(report)
    }
}

impl AnnotatedGraph {
    pub fn without_red(&self) -> Self {
        let mut h = self.clone();
        h.clear_red();
        h
    }
}

pub fn verify_minor_model(g: &AnnotatedGraph, m: &MinorModel) -> Result<ValidityReport> {
    m.verify(g)
}

pub fn verify_red_minor_model(g: &AnnotatedGraph, m: &RedMinorModel) -> Result<ValidityReport> {
    m.verify(g)
}

pub fn separation_majority(sep: &Separation, m: &MinorModel) -> Result<SideTag> {
    m.majority(sep)
}

/// Outcome of [`red_clique_or_separation`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum CliqueOutcome {
    RedClique(RedMinorModel),
    Separation(Separation),
}

/// Smallest clique order for which [`red_clique_or_separation`] is guaranteed to succeed.
pub fn red_clique_bound(t: usize) -> usize {
    3 * t / 2 + t
}

/// Given a `K_k` model `m`, finds an all-red `K_t` model whose branch sets
/// each contain a branch set of `m`, or a separation `(A, B)` of order at
/// most `t - 1` whose `B` side is the `m`-majority side and carries no red
/// vertex outside `A`.
///
/// The model is built from disjoint paths that run from red vertices into
/// distinct branch sets of `m`, computed in the graph where every branch
/// set is contracted to a unit-capacity node. When fewer than `t` such paths
/// exist, the minimum cut between the red set and the model is tried as the
/// separator, followed by per-branch-set cuts.
pub fn red_clique_or_separation(g: &AnnotatedGraph, m: &MinorModel, t: usize) -> Result<CliqueOutcome> {
    let k = m.order();
    if t == 0 || k < red_clique_bound(t) {
        return Err(Error::ParameterRange(format!(
            "clique order {k} is below {} for t = {t}",
            red_clique_bound(t)
        )));
    }
    let report = m.verify(g)?;
    if !report.is_valid() {
        return Err(Error::InvalidModel(report.to_string()));
    }
    let pv = m.pattern.vertex_set();
    let complete = pv.iter().all(|&x| pv.iter().all(|&y| x == y || m.pattern.has_edge(x, y)));
    if !complete {
        return Err(Error::InvalidModel("pattern is not a clique".into()));
    }

    if let Some(model) = contracted_linkage(g, m, t) {
        return Ok(CliqueOutcome::RedClique(model));
    }

    let support = m.support();
    let red = g.red().clone();
    let candidates = std::iter::once(flow::disjoint_paths(g, &red, &support, Some(t)))
        .chain(m.branch.values().map(|set| {
            flow::max_flow(g, &red, set, |v| if set.contains(&v) { flow::INF } else { 1 }, Some(t))
        }));
    for link in candidates {
        if link.paths.len() >= t {
            continue;
        }
        let sep = Separation::from_separator(g, &link.cut, |comp| comp.iter().any(|v| red.contains(v)));
        if m.majority(&sep)? == SideTag::B && sep.strict(SideTag::B).is_disjoint(&red) {
            return Ok(CliqueOutcome::Separation(sep));
        }
    }
    Err(Error::Unresolved(format!(
        "neither {t} red paths into distinct branch sets nor a red-free cut of order below {t}"
    )))
}

/// Disjoint paths from red vertices to `t` distinct branch sets, where a path
/// may pass through a branch set and then absorbs it.
fn contracted_linkage(g: &AnnotatedGraph, m: &MinorModel, t: usize) -> Option<RedMinorModel> {
    let mut owner: BTreeMap<Vertex, Vertex> = BTreeMap::new();
    for (&x, set) in &m.branch {
        for &v in set {
            owner.insert(v, x);
        }
    }
    let offset = g.max_vertex().unwrap_or(0) + 1;
    let node = |v: Vertex| owner.get(&v).map_or(v, |&x| offset + x);
    let mut h = AnnotatedGraph::new();
    for v in g.vertices() {
        h.add_vertex(node(v));
    }
    for (u, v) in g.edges() {
        let (a, b) = (node(u), node(v));
        if a != b {
            h.add_edge(a, b).unwrap();
        }
    }
    let sources: VSet = g.red().iter().map(|&v| node(v)).collect();
    let sinks: VSet = m.branch.keys().map(|&x| offset + x).collect();
    let link = flow::disjoint_paths(&h, &sources, &sinks, Some(t));
    if link.paths.len() < t {
        return None;
    }
    let mut branch = BTreeMap::new();
    for (i, path) in link.paths.iter().enumerate() {
        let mut set = VSet::new();
        for &p in path {
            if sinks.contains(&p) {
                set.extend(m.branch[&(p - offset)].iter().copied());
            } else {
                set.insert(p);
            }
        }
        branch.insert(i as Vertex + 1, set);
    }
    let pattern = AnnotatedGraph::complete(t as u32);
    Some(RedMinorModel::all_red(MinorModel::new(pattern, branch)))
}
