//! Vertex-capacitated max-flow for disjoint paths and minimum vertex cuts.

use crate::graph::{AnnotatedGraph, VSet, Vertex};
use std::collections::{BTreeMap, VecDeque};

/// Capacity standing in for "cannot be cut".
pub const INF: u32 = u32::MAX / 4;

struct Net {
    to: Vec<usize>,
    cap: Vec<u32>,
    head: Vec<Vec<usize>>,
}

impl Net {
    fn new(n: usize) -> Self {
        Self { to: Vec::new(), cap: Vec::new(), head: vec![Vec::new(); n] }
    }

    fn arc(&mut self, a: usize, b: usize, c: u32) {
        self.head[a].push(self.to.len());
        self.to.push(b);
        self.cap.push(c);
        self.head[b].push(self.to.len());
        self.to.push(a);
        self.cap.push(0);
    }

    fn augment(&mut self, s: usize, t: usize) -> bool {
        let mut prev = vec![usize::MAX; self.head.len()];
        let mut seen = vec![false; self.head.len()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.head[u] {
                let w = self.to[e];
                if self.cap[e] > 0 && !seen[w] {
                    seen[w] = true;
                    prev[w] = e;
                    if w == t {
                        let mut cur = t;
                        while cur != s {
                            let e = prev[cur];
                            self.cap[e] -= 1;
                            self.cap[e ^ 1] += 1;
                            cur = self.to[e ^ 1];
                        }
                        return true;
                    }
                    queue.push_back(w);
                }
            }
        }
        false
    }

    fn reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.head.len()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.head[u] {
                let w = self.to[e];
                if self.cap[e] > 0 && !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen
    }
}

/// Result of a max-flow run between two vertex sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Linkage {
    /// Disjoint `X`-`Y` paths, each listed from its `X` end.
    pub paths: Vec<Vec<Vertex>>,
    /// A minimum vertex cut; equals the number of paths unless a limit stopped the search.
    pub cut: VSet,
}

/// Maximum set of vertex-disjoint `sources`-`sinks` paths in `g`, stopping
/// once `limit` paths are found. Vertices with `capacity(v) == 0` are
/// forbidden. Paths are disjoint when every capacity is at most one; `INF`
/// marks a vertex that may not appear in the cut.
pub fn max_flow(
    g: &AnnotatedGraph,
    sources: &VSet,
    sinks: &VSet,
    capacity: impl Fn(Vertex) -> u32,
    limit: Option<usize>,
) -> Linkage {
    let order: Vec<Vertex> = g.vertices().collect();
    let index: BTreeMap<Vertex, usize> = order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let n = order.len();
    let (s, t) = (2 * n, 2 * n + 1);
    let mut net = Net::new(2 * n + 2);
    for (i, &v) in order.iter().enumerate() {
        net.arc(2 * i, 2 * i + 1, capacity(v));
    }
    for (u, v) in g.edges() {
        let (a, b) = (index[&u], index[&v]);
        net.arc(2 * a + 1, 2 * b, INF);
        net.arc(2 * b + 1, 2 * a, INF);
    }
    for v in sources.iter().filter_map(|v| index.get(v)) {
        net.arc(s, 2 * v, INF);
    }
    for v in sinks.iter().filter_map(|v| index.get(v)) {
        net.arc(2 * v + 1, t, INF);
    }
    let mut value = 0;
    while limit.is_none_or(|l| value < l) && net.augment(s, t) {
        value += 1;
    }
    let reach = net.reachable(s);
    let cut: VSet = (0..n)
        .filter(|&i| reach[2 * i] && !reach[2 * i + 1])
        .map(|i| order[i])
        .collect();

    // Flow decomposition: follow arcs carrying flow, consuming one unit per walk.
    let mut flow: BTreeMap<(usize, usize), u32> = BTreeMap::new();
    for e in (0..net.to.len()).step_by(2) {
        let used = net.cap[e ^ 1];
        if used > 0 {
            *flow.entry((net.to[e ^ 1], net.to[e])).or_default() += used;
        }
    }
    let mut paths = Vec::new();
    for _ in 0..value {
        let mut walk = vec![s];
        let mut cur = s;
        while cur != t {
            let next = flow
                .range((cur, 0)..(cur + 1, 0))
                .find(|(_, &f)| f > 0)
                .map(|(&(_, b), _)| b)
                .expect("flow conservation");
            *flow.get_mut(&(cur, next)).unwrap() -= 1;
            if let Some(pos) = walk.iter().position(|&x| x == next) {
                walk.truncate(pos + 1);
            } else {
                walk.push(next);
            }
            cur = next;
        }
        let mut path: Vec<Vertex> = walk
            .iter()
            .filter(|&&x| x < 2 * n && x % 2 == 0)
            .map(|&x| order[x / 2])
            .collect();
        if let Some(last_src) = path.iter().rposition(|v| sources.contains(v)) {
            path.drain(..last_src);
        }
        if let Some(first_sink) = path.iter().position(|v| sinks.contains(v)) {
            path.truncate(first_sink + 1);
        }
        paths.push(path);
    }
    paths.sort();
    Linkage { paths, cut }
}

/// Maximum linkage of vertex-disjoint `X`-`Y` paths with unit capacities.
pub fn disjoint_paths(g: &AnnotatedGraph, x: &VSet, y: &VSet, limit: Option<usize>) -> Linkage {
    max_flow(g, x, y, |_| 1, limit)
}

/// Disjoint paths avoiding `forbidden`.
pub fn disjoint_paths_avoiding(
    g: &AnnotatedGraph,
    x: &VSet,
    y: &VSet,
    forbidden: &VSet,
    limit: Option<usize>,
) -> Linkage {
    max_flow(g, x, y, |v| u32::from(!forbidden.contains(&v)), limit)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_sets_give_trivial_paths() {
        let g = AnnotatedGraph::path(4);
        let x = VSet::from([1, 3]);
        let l = disjoint_paths(&g, &x, &x, None);
        assert_eq!(l.paths, vec![vec![1], vec![3]]);
        assert_eq!(l.cut, x);
    }

    #[test]
    fn disconnected_sets_have_empty_cut() {
        let mut g = AnnotatedGraph::path(2);
        g.add_edge(3, 4).unwrap();
        let l = disjoint_paths(&g, &VSet::from([1]), &VSet::from([4]), None);
        assert!(l.paths.is_empty());
        assert!(l.cut.is_empty());
    }

    #[test]
    fn cycle_has_two_disjoint_paths() {
        let g = AnnotatedGraph::cycle(6);
        let l = disjoint_paths(&g, &VSet::from([1, 2]), &VSet::from([4, 5]), None);
        assert_eq!(l.paths.len(), 2);
        assert_eq!(l.cut.len(), 2);
    }

    #[test]
    fn star_center_is_the_cut() {
        let g = AnnotatedGraph::from_edges([], &[(1, 2), (1, 3), (1, 4), (1, 5)]).unwrap();
        let l = disjoint_paths(&g, &VSet::from([2, 3]), &VSet::from([4, 5]), None);
        assert_eq!(l.paths.len(), 1);
        assert_eq!(l.cut, VSet::from([1]));
    }
}
