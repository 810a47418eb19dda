use crate::error::{Error, Result};
use crate::flow::disjoint_paths;
use crate::graph::{VSet, Vertex};
use crate::report::{Kind, ValidityReport};
use crate::rendition::{society_depth, Society};
use serde::{Deserialize, Serialize};

/// Bags `X_1, …, X_n` indexed by the boundary vertices `v_1, …, v_n` of a society.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearDecomposition {
    pub boundary: Vec<Vertex>,
    pub bags: Vec<VSet>,
}

impl LinearDecomposition {
    pub fn adhesion(&self) -> usize {
        self.bags.windows(2).map(|w| w[0].intersection(&w[1]).count()).max().unwrap_or(0)
    }

    /// Largest bag size.
    pub fn width(&self) -> usize {
        self.bags.iter().map(|b| b.len()).max().unwrap_or(0)
    }

    /// Intersections of consecutive bags.
    pub fn adhesion_sets(&self) -> Vec<VSet> {
        self.bags.windows(2).map(|w| w[0].intersection(&w[1]).copied().collect()).collect()
    }
}

/// Same cyclic sequence up to rotation and reflection.
pub(crate) fn cyclic_agree(a: &[Vertex], b: &[Vertex]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    let n = a.len();
    let Some(start) = b.iter().position(|&v| v == a[0]) else { return false };
    let fwd = (0..n).all(|i| a[i] == b[(start + i) % n]);
    let bwd = (0..n).all(|i| a[i] == b[(start + n - i) % n]);
    fwd || bwd
}

/// Checks the boundary labelling against `Ω`, `v_i ∈ X_i`, vertex and edge
/// cover and the interval property.
pub fn validate_linear_decomposition(s: &Society, ld: &LinearDecomposition) -> ValidityReport {
    let mut rep = ValidityReport::new();
    if ld.boundary.len() != ld.bags.len() {
        rep.push(Kind::BoundaryBag, format!("{} boundary vertices but {} bags", ld.boundary.len(), ld.bags.len()));
        return rep;
    }
    let pos: Vec<Option<usize>> = ld.boundary.iter().map(|&v| s.position(v)).collect();
    let in_order = pos.iter().all(|p| p.is_some()) && {
        let ps: Vec<usize> = pos.iter().flatten().copied().collect();
        let n = ps.len();
        let descents = (0..n).filter(|&i| ps[i] > ps[(i + 1) % n]).count();
        ps.len() == s.omega.len() && descents <= 1
    };
    if !in_order {
        rep.push(Kind::CyclicOrder, "boundary labelling does not follow the society's cyclic order");
    }
    for (i, (v, bag)) in ld.boundary.iter().zip(&ld.bags).enumerate() {
        if !bag.contains(v) {
            rep.push(Kind::BoundaryBag, format!("bag {i} misses its boundary vertex {v}"));
        }
    }
    for v in s.graph.vertices() {
        let at: Vec<usize> = (0..ld.bags.len()).filter(|&i| ld.bags[i].contains(&v)).collect();
        match (at.first(), at.last()) {
            (None, _) | (_, None) => rep.push(Kind::VertexCover, format!("vertex {v} is in no bag")),
            (Some(&a), Some(&b)) if b - a + 1 != at.len() => {
                rep.push(Kind::Interval, format!("the bags holding {v} are not consecutive"))
            }
            _ => {}
        }
    }
    for (u, v) in s.graph.edges() {
        if !ld.bags.iter().any(|b| b.contains(&u) && b.contains(&v)) {
            rep.push(Kind::EdgeCover, format!("edge ({u}, {v}) is in no bag"));
        }
    }
    for (i, bag) in ld.bags.iter().enumerate() {
        if let Some(v) = bag.iter().find(|&&v| !s.graph.contains(v)) {
            rep.push(Kind::VertexCover, format!("bag {i} holds unknown vertex {v}"));
        }
    }
    rep
}

/// A linear decomposition of adhesion at most `k` of a society of depth at most `k`.
///
/// For every split of `Ω` into a prefix `v_1..v_i` and the suffix, the
/// minimum cut closest to the prefix gives a separation `(L_i, R_i)`; these
/// are nested, and `X_i = L_i ∩ R_{i-1}`.
pub fn linear_decomposition_from_depth(s: &Society, k: usize) -> Result<LinearDecomposition> {
    s.validate()?;
    let depth = society_depth(s);
    if depth > k {
        return Err(Error::DepthExceeded { depth, k });
    }
    let g = &s.graph;
    let all = g.vertex_set();
    let n = s.omega.len();
    if n == 0 {
        return Err(Error::ParameterRange("society has an empty boundary".into()));
    }
    let mut left: Vec<VSet> = Vec::with_capacity(n + 1);
    let mut right: Vec<VSet> = Vec::with_capacity(n + 1);
    left.push(VSet::new());
    right.push(all.clone());
    for i in 1..n {
        let pre: VSet = s.omega[..i].iter().copied().collect();
        let suf: VSet = s.omega[i..].iter().copied().collect();
        let cut = disjoint_paths(g, &pre, &suf, None).cut;
        let start: Vec<Vertex> = pre.difference(&cut).copied().collect();
        let mut l = cut.clone();
        for v in start {
            l.extend(g.reach(v, |w| !cut.contains(&w)));
        }
        let strict: VSet = l.difference(&cut).copied().collect();
        let mut r: VSet = all.difference(&strict).copied().collect();
        l.extend(left[i - 1].iter().copied());
        r.retain(|v| right[i - 1].contains(v));
        left.push(l);
        right.push(r);
    }
    left.push(all.clone());
    let bags: Vec<VSet> = (1..=n).map(|i| left[i].intersection(&right[i - 1]).copied().collect()).collect();
    let ld = LinearDecomposition { boundary: s.omega.clone(), bags };
    let rep = validate_linear_decomposition(s, &ld);
    if !rep.is_valid() || ld.adhesion() > k {
        return Err(Error::Unresolved(format!("linear decomposition of adhesion {} fails: {rep}", ld.adhesion())));
    }
    Ok(ld)
}
