use crate::error::{Error, Result};
use crate::flow::{max_flow, INF};
use crate::graph::{AnnotatedGraph, VSet, Vertex};
use itertools::Itertools;
use serde::{Deserialize, Serialize};

/// Evidence that no small balanced separator exists for `x`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkedSetCertificate {
    pub x: VSet,
    pub k: usize,
    /// Balance ratio as numerator and denominator.
    pub alpha: (usize, usize),
    /// Number of tripartitions of `x` ruled out.
    pub tripartitions: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Balance {
    Separator(VSet),
    Linked(LinkedSetCertificate),
}

fn balanced(g: &AnnotatedGraph, x: &VSet, s: &VSet, (num, den): (usize, usize)) -> bool {
    g.components_without(s).iter().all(|c| c.intersection(x).count() * den <= num * x.len())
}

/// A 2/3-balanced separator of size at most `k` for `x`, or a certificate
/// that `x` is (k, 2/3)-linked.
///
/// Tripartitions `(A, S, B)` of `x` with `|S| ≤ k` and `A`, `B` within
/// the balance bound are tried in lexicographic order; for each, a minimum
/// vertex cut between `A` and `B` in `G - S` completes the separator.
pub fn balanced_separator(g: &AnnotatedGraph, x: &VSet, k: usize) -> Result<Balance> {
    g.check_vertices(x)?;
    if x.len() > 3 * k + 1 {
        return Err(Error::SizeBound { size: x.len(), bound: 3 * k + 1 });
    }
    let xs: Vec<Vertex> = x.iter().copied().collect();
    let bound = 2 * xs.len() / 3;
    let mut tried = 0;
    for labels in std::iter::repeat_n(0..3u8, xs.len()).multi_cartesian_product() {
        let part = |l: u8| -> VSet { xs.iter().zip(&labels).filter(|(_, &m)| m == l).map(|(&v, _)| v).collect() };
        let (a, s, b) = (part(0), part(1), part(2));
        if s.len() > k || a.len() > bound || b.len() > bound {
            continue;
        }
        tried += 1;
        let budget = k - s.len();
        let h = g.without(&s);
        let ends: VSet = a.union(&b).copied().collect();
        let link = max_flow(&h, &a, &b, |v| if ends.contains(&v) { INF } else { 1 }, Some(budget + 1));
        if link.paths.len() > budget {
            continue;
        }
        let sep: VSet = s.union(&link.cut).copied().collect();
        if balanced(g, x, &sep, (2, 3)) {
            return Ok(Balance::Separator(sep));
        }
    }
    if xs.is_empty() {
        return Ok(Balance::Separator(VSet::new()));
    }
    Ok(Balance::Linked(LinkedSetCertificate { x: x.clone(), k, alpha: (2, 3), tripartitions: tried }))
}

/// Whether no set of at most `k` vertices is an `alpha`-balanced separator
/// for `x`, by exhaustion over all such sets.
pub fn is_linked(g: &AnnotatedGraph, x: &VSet, k: usize, alpha: (usize, usize), cap: usize) -> Result<bool> {
    if g.n() > cap {
        return Err(Error::CapExceeded { n: g.n(), cap });
    }
    g.check_vertices(x)?;
    if x.is_empty() {
        return Ok(false);
    }
    let vs: Vec<Vertex> = g.vertices().collect();
    for size in 0..=k.min(vs.len()) {
        for s in vs.iter().copied().combinations(size) {
            if balanced(g, x, &s.into_iter().collect(), alpha) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
