use crate::error::{Error, Result};
use crate::flow::disjoint_paths;
use crate::graph::{edge, AnnotatedGraph, Edge, VSet, Vertex};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// A graph with a cyclic order on some of its vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Society {
    pub graph: AnnotatedGraph,
    pub omega: Vec<Vertex>,
}

impl Society {
    pub fn new(graph: AnnotatedGraph, omega: Vec<Vertex>) -> Self {
        Self { graph, omega }
    }

    pub fn validate(&self) -> Result<()> {
        self.graph.check_vertices(&self.omega)?;
        let distinct: VSet = self.omega.iter().copied().collect();
        if distinct.len() != self.omega.len() {
            return Err(Error::Precondition("boundary order repeats a vertex".into()));
        }
        Ok(())
    }

    pub fn omega_set(&self) -> VSet {
        self.omega.iter().copied().collect()
    }

    pub fn position(&self, v: Vertex) -> Option<usize> {
        self.omega.iter().position(|&x| x == v)
    }

    /// The society with the boundary order reversed.
    pub fn reversed(&self) -> Self {
        Self::new(self.graph.clone(), self.omega.iter().rev().copied().collect())
    }

    /// Boundary vertices from position `a` going forward for `len` steps.
    fn interval(&self, a: usize, len: usize) -> Vec<Vertex> {
        let w = self.omega.len();
        (0..len).map(|t| self.omega[(a + t) % w]).collect()
    }
}

/// A family of disjoint boundary-to-boundary paths, each listed from end to end.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transaction {
    pub paths: Vec<Vec<Vertex>>,
}

/// The minimal segments `x` and `y` joined by a transaction, each in boundary order.
/// `order` lists path indices by their endpoint in `x`; `paths` are the
/// paths reoriented to start in `x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EndSegments {
    pub x: Vec<Vertex>,
    pub y: Vec<Vertex>,
    pub order: Vec<usize>,
    pub paths: Vec<Vec<Vertex>>,
}

impl Transaction {
    pub fn new(paths: Vec<Vec<Vertex>>) -> Self {
        Self { paths }
    }

    pub fn order(&self) -> usize {
        self.paths.len()
    }

    /// Checks disjointness and that every path is a boundary path of `s` in `s.graph`.
    pub fn check(&self, s: &Society) -> Result<()> {
        let bad = |m: String| Err(Error::NotATransaction(m));
        if self.paths.is_empty() {
            return bad("no paths".into());
        }
        let omega = s.omega_set();
        let mut used = VSet::new();
        for (i, p) in self.paths.iter().enumerate() {
            if p.len() < 2 {
                return bad(format!("path {i} has no edge"));
            }
            for w in p.windows(2) {
                if !s.graph.has_edge(w[0], w[1]) {
                    return bad(format!("path {i} uses a non-edge {:?}", (w[0], w[1])));
                }
            }
            for &v in p {
                if !used.insert(v) {
                    return bad(format!("vertex {v} is used twice"));
                }
            }
            if !omega.contains(&p[0]) || !omega.contains(&p[p.len() - 1]) {
                return bad(format!("path {i} does not end on the boundary"));
            }
            if p[1..p.len() - 1].iter().any(|v| omega.contains(v)) {
                return bad(format!("path {i} meets the boundary internally"));
            }
        }
        Ok(())
    }

    /// The end segments and the natural order of the paths.
    pub fn end_segments(&self, s: &Society) -> Result<EndSegments> {
        self.check(s)?;
        let n = self.paths.len();
        let w = s.omega.len();
        let mut ends: Vec<(usize, usize)> = Vec::new();
        for (i, p) in self.paths.iter().enumerate() {
            ends.push((s.position(p[0]).unwrap(), i));
            ends.push((s.position(p[p.len() - 1]).unwrap(), i));
        }
        ends.sort();
        for start in 0..2 * n {
            let run: Vec<(usize, usize)> = (0..n).map(|t| ends[(start + t) % (2 * n)]).collect();
            let ids: BTreeSet<usize> = run.iter().map(|e| e.1).collect();
            if ids.len() != n {
                continue;
            }
            let rest: Vec<(usize, usize)> = (n..2 * n).map(|t| ends[(start + t) % (2 * n)]).collect();
            let seg = |r: &[(usize, usize)]| {
                let (a, b) = (r[0].0, r[r.len() - 1].0);
                s.interval(a, (b + w - a) % w + 1)
            };
            let xset: VSet = run.iter().map(|e| s.omega[e.0]).collect();
            let paths = self
                .paths
                .iter()
                .map(|p| if xset.contains(&p[0]) { p.clone() } else { p.iter().rev().copied().collect() })
                .collect();
            return Ok(EndSegments {
                x: seg(&run),
                y: seg(&rest),
                order: run.iter().map(|e| e.1).collect(),
                paths,
            });
        }
        Err(Error::NotATransaction("no two disjoint segments separate the endpoints".into()))
    }

    /// The paths in natural order, each running from `X` to `Y`.
    pub fn natural_paths(&self, s: &Society) -> Result<Vec<Vec<Vertex>>> {
        let es = self.end_segments(s)?;
        Ok(es.order.iter().map(|&i| es.paths[i].clone()).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransactionKind {
    Planar,
    Crosscap,
    Neither,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub monotone: bool,
    pub kind: TransactionKind,
    /// A split into two planar halves whose segments alternate around the boundary.
    pub handle: Option<(Vec<usize>, Vec<usize>)>,
}

/// Indices of `y` endpoints in boundary order, labelled by the natural order.
fn y_labels(s: &Society, es: &EndSegments) -> Vec<usize> {
    let label: BTreeMap<usize, usize> = es.order.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let mut ys: Vec<(usize, usize)> = es
        .order
        .iter()
        .map(|&i| {
            let p = &es.paths[i];
            let off = (s.position(p[p.len() - 1]).unwrap() + s.omega.len() - s.position(es.y[0]).unwrap())
                % s.omega.len();
            (off, label[&i])
        })
        .collect();
    ys.sort();
    ys.into_iter().map(|(_, l)| l).collect()
}

fn planar_split(s: &Society, paths: &[Vec<Vertex>]) -> Option<bool> {
    let es = Transaction::new(paths.to_vec()).end_segments(s).ok()?;
    let ys = y_labels(s, &es);
    Some(ys.iter().rev().copied().eq(0..ys.len()))
}

/// Classifies by the cyclic order of the endpoints on the boundary.
pub fn classify_transaction(s: &Society, t: &Transaction) -> Result<Classification> {
    let es = t.end_segments(s)?;
    let ys = y_labels(s, &es);
    let n = ys.len();
    let increasing = ys.iter().copied().eq(0..n);
    let decreasing = ys.iter().rev().copied().eq(0..n);
    let kind = if decreasing {
        TransactionKind::Planar
    } else if increasing {
        TransactionKind::Crosscap
    } else {
        TransactionKind::Neither
    };
    let mut handle = None;
    if t.order() % 2 == 0 && t.order() >= 2 {
        let h = t.order() / 2;
        let mut ends: Vec<(usize, usize)> = Vec::new();
        for (i, p) in t.paths.iter().enumerate() {
            ends.push((s.position(p[0]).unwrap(), i));
            ends.push((s.position(p[p.len() - 1]).unwrap(), i));
        }
        ends.sort();
        let m = ends.len();
        for start in 0..m {
            let run = |k: usize| -> BTreeSet<usize> { (0..h).map(|t| ends[(start + k * h + t) % m].1).collect() };
            let (r1, q1, r2, q2) = (run(0), run(1), run(2), run(3));
            if r1.len() != h || q1.len() != h || r1 != r2 || q1 != q2 || !r1.is_disjoint(&q1) {
                continue;
            }
            let pick = |ids: &BTreeSet<usize>| ids.iter().map(|&i| t.paths[i].clone()).collect::<Vec<_>>();
            if planar_split(s, &pick(&r1)) == Some(true) && planar_split(s, &pick(&q1)) == Some(true) {
                let (a, b): (Vec<usize>, Vec<usize>) = (r1.into_iter().collect(), q1.into_iter().collect());
                handle = Some(if a[0] < b[0] { (a, b) } else { (b, a) });
                break;
            }
        }
    }
    Ok(Classification { monotone: increasing || decreasing, kind, handle })
}

/// A transaction of maximum order, found by max-flow between complementary boundary intervals.
pub fn max_transaction(s: &Society) -> Transaction {
    let w = s.omega.len();
    let mut best = Transaction::new(Vec::new());
    if w < 2 {
        return best;
    }
    let omega = s.omega_set();
    for len in 1..=w / 2 {
        for a in 0..w {
            let xs: VSet = s.interval(a, len).into_iter().collect();
            let ys: VSet = omega.difference(&xs).copied().collect();
            let link = disjoint_paths(&s.graph, &xs, &ys, None);
            if link.paths.len() > best.order() {
                best = Transaction::new(link.paths);
            }
        }
    }
    best
}

/// The maximum order of a transaction.
pub fn society_depth(s: &Society) -> usize {
    max_transaction(s).order()
}

struct StripFrame {
    paths: Vec<Vec<Vertex>>,
    x: Vec<Vertex>,
    y: Vec<Vertex>,
    bridges: Vec<(VSet, BTreeSet<Edge>)>,
}

fn strip_frame(s: &Society, t: &Transaction) -> Result<StripFrame> {
    let cls = classify_transaction(s, t)?;
    if !cls.monotone {
        return Err(Error::NotMonotone);
    }
    let es = t.end_segments(s)?;
    let paths: Vec<Vec<Vertex>> = es.order.iter().map(|&i| es.paths[i].clone()).collect();
    let mut hv: VSet = s.omega_set();
    let mut he: BTreeSet<Edge> = BTreeSet::new();
    for p in &paths {
        hv.extend(p.iter().copied());
        he.extend(p.windows(2).map(|w| edge(w[0], w[1])));
    }
    let mut bridges = Vec::new();
    for (u, v) in s.graph.edges() {
        if hv.contains(&u) && hv.contains(&v) && !he.contains(&(u, v)) {
            bridges.push((VSet::from([u, v]), BTreeSet::from([(u, v)])));
        }
    }
    for comp in s.graph.components_without(&hv) {
        let mut vs = comp.clone();
        let mut es = BTreeSet::new();
        for &c in &comp {
            for w in s.graph.neighbors(c) {
                if !comp.contains(&w) || c < w {
                    es.insert(edge(c, w));
                    vs.insert(w);
                }
            }
        }
        bridges.push((vs, es));
    }
    Ok(StripFrame { paths, x: es.x, y: es.y, bridges })
}

impl StripFrame {
    /// The bridge with attachments outside `keep` deleted.
    fn trimmed(&self, hv: &VSet, b: usize, keep: &VSet) -> (VSet, BTreeSet<Edge>) {
        let (vs, es) = &self.bridges[b];
        let drop: VSet = vs.iter().filter(|v| hv.contains(v) && !keep.contains(v)).copied().collect();
        let vs = vs.difference(&drop).copied().collect();
        let es = es.iter().filter(|(u, v)| !drop.contains(u) && !drop.contains(v)).copied().collect();
        (vs, es)
    }

    fn attachments(&self, hv: &VSet, b: usize) -> VSet {
        self.bridges[b].0.intersection(hv).copied().collect()
    }

    fn h_vertices(&self, s: &Society) -> VSet {
        let mut hv = s.omega_set();
        for p in &self.paths {
            hv.extend(p.iter().copied());
        }
        hv
    }

    fn keep(&self) -> VSet {
        let mut k: VSet = self.x.iter().chain(&self.y).copied().collect();
        for p in &self.paths {
            k.extend(p.iter().copied());
        }
        k
    }

    fn outer(&self) -> VSet {
        let n = self.paths.len();
        self.paths[0].iter().chain(&self.paths[n - 1]).copied().collect()
    }

    /// The part of segment `seg` from the endpoint of path `i` to that of path `i + 1`.
    fn sub_segment(&self, seg: &[Vertex], i: usize, at_start: bool) -> Vec<Vertex> {
        let end = |p: &Vec<Vertex>| if at_start { p[0] } else { p[p.len() - 1] };
        let a = seg.iter().position(|&v| v == end(&self.paths[i])).unwrap();
        let b = seg.iter().position(|&v| v == end(&self.paths[i + 1])).unwrap();
        seg[a.min(b)..=a.max(b)].to_vec()
    }
}

fn assemble(
    vertices: impl IntoIterator<Item = Vertex>,
    edges: impl IntoIterator<Item = Edge>,
    g: &AnnotatedGraph,
) -> AnnotatedGraph {
    let mut h = AnnotatedGraph::new();
    for v in vertices {
        h.add_vertex(v);
    }
    for (u, v) in edges {
        h.add_edge(u, v).expect("graph edges carry no loops");
    }
    let red: Vec<Vertex> = h.vertices().filter(|&v| g.is_red(v)).collect();
    h.with_red(red).expect("vertices exist")
}

impl StripFrame {
    fn strip(&self, s: &Society, i: usize) -> AnnotatedGraph {
        let (pi, pj) = (&self.paths[i - 1], &self.paths[i]);
        let xi = self.sub_segment(&self.x, i - 1, true);
        let yi = self.sub_segment(&self.y, i - 1, false);
        let hv = self.h_vertices(s);
        let keep = self.keep();
        let outer = self.outer();
        let zone: VSet = xi
            .iter()
            .chain(&yi)
            .chain(pi)
            .chain(pj)
            .copied()
            .filter(|v| !outer.contains(v))
            .collect();
        let mut vs: VSet = pi.iter().chain(pj).chain(&xi).chain(&yi).copied().collect();
        let mut es: BTreeSet<Edge> = pi.windows(2).chain(pj.windows(2)).map(|w| edge(w[0], w[1])).collect();
        for b in 0..self.bridges.len() {
            if !self.attachments(&hv, b).is_disjoint(&zone) {
                let (bv, be) = self.trimmed(&hv, b, &keep);
                vs.extend(bv);
                es.extend(be);
            }
        }
        assemble(vs, es, &s.graph)
    }
}

/// The `i`-th strip (1-based) of a monotone transaction.
pub fn strip(s: &Society, t: &Transaction, i: usize) -> Result<AnnotatedGraph> {
    let f = strip_frame(s, t)?;
    let n = f.paths.len();
    if i == 0 || i >= n {
        return Err(Error::OutOfRange(format!("strip {i} of a transaction of order {n}")));
    }
    Ok(f.strip(s, i))
}

/// All strips of a monotone transaction, the `i`-th at index `i - 1`.
pub fn strips(s: &Society, t: &Transaction) -> Result<Vec<AnnotatedGraph>> {
    let f = strip_frame(s, t)?;
    Ok((1..f.paths.len()).map(|i| f.strip(s, i)).collect())
}

/// The strip society: the paths, both end segments and the bridges reaching
/// inside the transaction, bounded by `x` forward then `y` backward.
pub fn strip_society(s: &Society, t: &Transaction) -> Result<Society> {
    let f = strip_frame(s, t)?;
    let hv = f.h_vertices(s);
    let keep = f.keep();
    let outer = f.outer();
    let zone: VSet = keep.difference(&outer).copied().collect();
    let mut vs = keep.clone();
    let mut es: BTreeSet<Edge> = f.paths.iter().flat_map(|p| p.windows(2).map(|w| edge(w[0], w[1]))).collect();
    for b in 0..f.bridges.len() {
        if !f.attachments(&hv, b).is_disjoint(&zone) {
            let (bv, be) = f.trimmed(&hv, b, &keep);
            vs.extend(bv);
            es.extend(be);
        }
    }
    let n = f.paths.len();
    let x_first = f.paths[0][0];
    let mut x = f.x.clone();
    if x[0] != x_first {
        x.reverse();
    }
    let y_last = *f.paths[n - 1].last().unwrap();
    let mut y = f.y.clone();
    if y[0] != y_last {
        y.reverse();
    }
    x.extend(y);
    Ok(Society::new(assemble(vs, es, &s.graph), x))
}
