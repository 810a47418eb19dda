use super::{Rendition, Slot, Surface};
use crate::error::{Error, Result};
use crate::graph::{edge, AnnotatedGraph, Edge, VSet, Vertex};
use std::collections::{BTreeMap, BTreeSet};

/// One maximal stretch of a walk inside a single cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceStep {
    pub cell: usize,
    pub from: Vertex,
    pub to: Vertex,
    /// Whether the cell lies to the left of the direction of travel.
    pub left: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub closed: bool,
    pub steps: Vec<TraceStep>,
}

impl Trace {
    /// Nodes on the trace in walking order.
    pub fn nodes(&self) -> Vec<Vertex> {
        let mut ns: Vec<Vertex> = self.steps.iter().map(|s| s.from).collect();
        if !self.closed {
            ns.extend(self.steps.last().map(|s| s.to));
        }
        ns
    }

    pub fn cells(&self) -> BTreeSet<usize> {
        self.steps.iter().map(|s| s.cell).collect()
    }
}

/// The cells on either side of a trace.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Sides {
    pub left: BTreeSet<usize>,
    pub right: BTreeSet<usize>,
    /// Side of the outer face for closed traces in the disk.
    pub outer_left: Option<bool>,
}

impl Sides {
    pub fn side(&self, left: bool) -> &BTreeSet<usize> {
        if left {
            &self.left
        } else {
            &self.right
        }
    }

    pub fn side_of(&self, c: usize) -> Option<bool> {
        if self.left.contains(&c) {
            Some(true)
        } else if self.right.contains(&c) {
            Some(false)
        } else {
            None
        }
    }
}

/// A disk bounded by a trace: its cells and its boundary nodes in counterclockwise order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    pub cells: BTreeSet<usize>,
    pub boundary: Vec<Vertex>,
}

/// The trace of a path (`closed = false`) or cycle (`closed = true`) given by its vertex sequence.
pub fn trace(rho: &Rendition, walk: &[Vertex], closed: bool) -> Result<Trace> {
    let k = walk.len();
    if k < 2 || (closed && k < 3) {
        return Err(Error::NotGrounded("walk too short".into()));
    }
    let owner = rho.edge_cells();
    let count = if closed { k } else { k - 1 };
    let mut cells = Vec::with_capacity(count);
    for i in 0..count {
        let e = edge(walk[i], walk[(i + 1) % k]);
        match owner.get(&e) {
            None => return Err(Error::NotGrounded(format!("edge {e:?} is not drawn"))),
            Some(&c) if rho.cells[c].vortex => {
                return Err(Error::NotGrounded(format!("edge {e:?} lies in vortex {c}")))
            }
            Some(&c) => cells.push(c),
        }
    }
    let mut offset = 0;
    if closed {
        match (0..count).find(|&i| cells[i] != cells[(i + count - 1) % count]) {
            None => return Err(Error::NotGrounded("cycle lies in a single cell".into())),
            Some(i) => offset = i,
        }
    }
    let at = |i: usize| walk[(i + offset) % k];
    let cell_at = |i: usize| cells[(i + offset) % count];
    let mut steps = Vec::new();
    let mut i = 0;
    while i < count {
        let c = cell_at(i);
        let mut j = i;
        while j + 1 < count && cell_at(j + 1) == c {
            j += 1;
        }
        let (from, to) = (at(i), at(j + 1));
        let cell = &rho.cells[c];
        let (fi, ti) = match (cell.node_index(from), cell.node_index(to)) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                return Err(Error::NotGrounded(format!(
                    "walk enters or leaves cell {c} away from its nodes"
                )))
            }
        };
        let left = match cell.nodes.len() {
            2 => (fi == 0) == cell.tie,
            3 => ti == (fi + 1) % 3,
            _ => return Err(Error::NotGrounded(format!("cell {c} has a single node"))),
        };
        steps.push(TraceStep { cell: c, from, to, left });
        i = j + 1;
    }
    if !closed && (!rho.is_node(walk[0]) || !rho.is_node(walk[k - 1])) {
        return Err(Error::NotGrounded("path endpoint is not a node".into()));
    }
    Ok(Trace { closed, steps })
}

/// Splits the cells of `rho` by the trace. Path traces must end on the
/// boundary and are closed through the outer face.
pub fn sides(rho: &Rendition, tr: &Trace) -> Result<Sides> {
    let incon = || Error::Precondition("trace sides are inconsistent".into());
    let mut side: BTreeMap<usize, bool> = BTreeMap::new();
    let mut outer: Option<bool> = None;
    let assign = |c: Option<usize>, s: bool, side: &mut BTreeMap<usize, bool>, outer: &mut Option<bool>| {
        let prev = match c {
            Some(c) => side.insert(c, s),
            None => outer.replace(s),
        };
        if prev.is_some_and(|p| p != s) {
            Err(incon())
        } else {
            Ok(())
        }
    };
    for st in &tr.steps {
        assign(Some(st.cell), st.left, &mut side, &mut outer)?;
    }

    // (node, incoming position, outgoing position) on a 3d-step circle per node.
    let n = tr.steps.len();
    let mut visits: Vec<(Vertex, Slot, bool, Slot, bool)> = Vec::new();
    for i in 0..n {
        let st = tr.steps[i];
        if i + 1 < n || tr.closed {
            let nx = tr.steps[(i + 1) % n];
            visits.push((st.to, Slot::Cell(st.cell), st.left, Slot::Cell(nx.cell), nx.left));
        }
    }
    if !tr.closed {
        let (first, last) = (tr.steps[0], tr.steps[n - 1]);
        visits.push((first.from, Slot::Outer, false, Slot::Cell(first.cell), first.left));
        visits.push((last.to, Slot::Cell(last.cell), last.left, Slot::Outer, false));
    }
    let on_trace: VSet = visits.iter().map(|v| v.0).collect();
    for &(v, sin, lin, sout, lout) in &visits {
        let rot = &rho.rotation[&v];
        let d = 3 * rot.len() as i64;
        let idx = |s: Slot| -> Result<i64> {
            rot.iter()
                .position(|&x| x == s)
                .map(|p| 3 * p as i64)
                .ok_or_else(|| Error::NotGrounded(format!("slot {s:?} missing at node {v}")))
        };
        let pos = |s: Slot, l: bool, outgoing: bool| -> Result<i64> {
            let base = idx(s)?;
            Ok(match s {
                Slot::Outer => base,
                _ if l == outgoing => base - 1,
                _ => base + 1,
            })
        };
        let pout = pos(sout, lout, true)?;
        let pin = pos(sin, lin, false)?;
        let span = (pin - pout).rem_euclid(d);
        for (j, &s) in rot.iter().enumerate() {
            if s == Slot::Outer && !tr.closed {
                continue;
            }
            let left = (3 * j as i64 - pout).rem_euclid(d) < span;
            let c = match s {
                Slot::Cell(c) => Some(c),
                Slot::Outer => None,
            };
            assign(c, left, &mut side, &mut outer)?;
        }
    }

    // Propagate through nodes off the trace; the outer face joins boundary nodes for cycles.
    const OUT: usize = usize::MAX;
    let mut parent: BTreeMap<usize, usize> = BTreeMap::new();
    fn find(p: &mut BTreeMap<usize, usize>, x: usize) -> usize {
        let up = *p.entry(x).or_insert(x);
        if up == x {
            return x;
        }
        let r = find(p, up);
        p.insert(x, r);
        r
    }
    for (&v, rot) in &rho.rotation {
        if on_trace.contains(&v) {
            continue;
        }
        let mut members = rot.iter().filter_map(|s| match s {
            Slot::Cell(c) => Some(*c),
            Slot::Outer if tr.closed => Some(OUT),
            Slot::Outer => None,
        });
        if let Some(first) = members.next() {
            for m in members {
                let (a, b) = (find(&mut parent, first), find(&mut parent, m));
                parent.insert(a, b);
            }
        }
    }
    let mut class_side: BTreeMap<usize, bool> = BTreeMap::new();
    let known: Vec<(usize, bool)> = side
        .iter()
        .map(|(&c, &s)| (c, s))
        .chain(outer.map(|s| (OUT, s)))
        .collect();
    for (c, s) in known {
        let r = find(&mut parent, c);
        if class_side.insert(r, s).is_some_and(|p| p != s) {
            return Err(incon());
        }
    }
    let mut res = Sides::default();
    for c in 0..rho.cells.len() {
        let r = find(&mut parent, c);
        if class_side.get(&r).copied().unwrap_or(false) {
            res.left.insert(c);
        } else {
            res.right.insert(c);
        }
    }
    if tr.closed && !rho.boundary.is_empty() {
        let r = find(&mut parent, OUT);
        res.outer_left = class_side.get(&r).copied();
    }
    Ok(res)
}

/// One side of a trace as a region, its boundary counterclockwise around it.
pub fn side_region(tr: &Trace, sd: &Sides, left: bool) -> Region {
    let mut boundary = tr.nodes();
    if !left {
        boundary.reverse();
    }
    Region { cells: sd.side(left).clone(), boundary }
}

/// The disk bounded by a grounded cycle: the side away from the boundary
/// in the disk, the smaller side on the sphere.
pub fn cycle_disk(rho: &Rendition, cycle: &[Vertex]) -> Result<Region> {
    let tr = trace(rho, cycle, true)?;
    let sd = sides(rho, &tr)?;
    let left = match (rho.surface, sd.outer_left) {
        (Surface::Disk, Some(o)) => !o,
        _ => sd.left.len() <= sd.right.len(),
    };
    Ok(side_region(&tr, &sd, left))
}

/// The side of a grounded cycle containing no vertex of `avoid` other than trace nodes.
pub fn cycle_disk_avoiding(rho: &Rendition, cycle: &[Vertex], avoid: &VSet) -> Result<Region> {
    let tr = trace(rho, cycle, true)?;
    let sd = sides(rho, &tr)?;
    let on: VSet = tr.nodes().into_iter().collect();
    let touches = |cells: &BTreeSet<usize>| {
        cells.iter().any(|&c| rho.cells[c].vertices().iter().any(|v| avoid.contains(v) && !on.contains(v)))
    };
    let left = match (touches(&sd.left), touches(&sd.right)) {
        (false, true) => true,
        (true, false) => false,
        _ => sd.left.len() <= sd.right.len(),
    };
    Ok(side_region(&tr, &sd, left))
}

/// The subgraph drawn in a region, with the red vertices of `g`.
pub fn crop(g: &AnnotatedGraph, rho: &Rendition, region: &Region) -> AnnotatedGraph {
    let mut h = rho.sigma(g, region.cells.iter().copied());
    for &v in &region.boundary {
        h.add_vertex(v);
        if g.is_red(v) {
            h.set_red(v).expect("vertex exists");
        }
    }
    h
}

/// The restriction of `rho` to a region, renumbering cells in ascending order.
pub fn restrict(rho: &Rendition, region: &Region) -> Rendition {
    let index: BTreeMap<usize, usize> = region.cells.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let cells = region.cells.iter().map(|&c| rho.cells[c].clone()).collect();
    let on: VSet = region.boundary.iter().copied().collect();
    let mut rotation = BTreeMap::new();
    for (&v, rot) in &rho.rotation {
        let inside: Vec<bool> = rot.iter().map(|s| matches!(s, Slot::Cell(c) if index.contains_key(c))).collect();
        if on.contains(&v) {
            // The kept slots form one cyclic interval; the outer face fills the gap.
            let d = rot.len();
            let start = (0..d).find(|&j| inside[j] && !inside[(j + d - 1) % d]).unwrap_or(0);
            let mut r: Vec<Slot> = (0..d)
                .map(|t| (start + t) % d)
                .filter(|&j| inside[j])
                .map(|j| match rot[j] {
                    Slot::Cell(c) => Slot::Cell(index[&c]),
                    Slot::Outer => Slot::Outer,
                })
                .collect();
            r.push(Slot::Outer);
            rotation.insert(v, r);
        } else if inside.iter().any(|&b| b) {
            let r = rot
                .iter()
                .filter_map(|s| match s {
                    Slot::Cell(c) => index.get(c).map(|&i| Slot::Cell(i)),
                    Slot::Outer => None,
                })
                .collect();
            rotation.insert(v, r);
        }
    }
    Rendition { surface: Surface::Disk, cells, boundary: region.boundary.clone(), rotation }
}

/// A subgraph is grounded when all its edges lie in non-vortex cells, none
/// of its vertices is drawn inside a vortex, and no cycle stays in one cell.
pub fn is_grounded(rho: &Rendition, edges: &BTreeSet<Edge>) -> bool {
    let owner = rho.edge_cells();
    let inside = rho.vortex_interior();
    let mut per_cell: BTreeMap<usize, Vec<Edge>> = BTreeMap::new();
    for &e in edges {
        match owner.get(&edge(e.0, e.1)) {
            Some(&c) if !rho.cells[c].vortex => per_cell.entry(c).or_default().push(edge(e.0, e.1)),
            _ => return false,
        }
        if inside.contains(&e.0) || inside.contains(&e.1) {
            return false;
        }
    }
    per_cell.values().all(|es| {
        let mut parent: BTreeMap<Vertex, Vertex> = BTreeMap::new();
        fn find(p: &mut BTreeMap<Vertex, Vertex>, x: Vertex) -> Vertex {
            let up = *p.entry(x).or_insert(x);
            if up == x {
                return x;
            }
            let r = find(p, up);
            p.insert(x, r);
            r
        }
        es.iter().all(|&(u, v)| {
            let (a, b) = (find(&mut parent, u), find(&mut parent, v));
            parent.insert(a, b);
            a != b
        })
    })
}

/// The cells between the traces of two disjoint boundary-to-boundary paths.
pub fn container(rho: &Rendition, first: &[Vertex], last: &[Vertex]) -> Result<BTreeSet<usize>> {
    let (t1, tn) = (trace(rho, first, false)?, trace(rho, last, false)?);
    let (s1, sn) = (sides(rho, &t1)?, sides(rho, &tn)?);
    let toward = |sd: &Sides, other: &Trace| -> Result<bool> {
        let c = other.steps[0].cell;
        sd.side_of(c).ok_or_else(|| Error::Precondition("paths share a cell".into()))
    };
    let (a, b) = (toward(&s1, &tn)?, toward(&sn, &t1)?);
    Ok(s1.side(a).intersection(sn.side(b)).copied().collect())
}

/// No vortex lies in the container of the outer two paths.
pub fn is_rho_flat(rho: &Rendition, paths: &[Vec<Vertex>]) -> Result<bool> {
    if paths.len() < 2 {
        let owner = rho.edge_cells();
        return Ok(paths.iter().all(|p| {
            p.windows(2).all(|w| owner.get(&edge(w[0], w[1])).is_some_and(|&c| !rho.cells[c].vortex))
        }));
    }
    let cont = container(rho, &paths[0], &paths[paths.len() - 1])?;
    Ok(cont.iter().all(|&c| !rho.cells[c].vortex))
}

/// Every path has an edge off the inner cycle inside the crop of the inner-cycle disk.
pub fn is_exposed(g: &AnnotatedGraph, rho: &Rendition, inner: &[Vertex], paths: &[Vec<Vertex>]) -> Result<bool> {
    let disk = cycle_disk(rho, inner)?;
    let h = crop(g, rho, &disk);
    let k = inner.len();
    let cyc: BTreeSet<Edge> = (0..k).map(|i| edge(inner[i], inner[(i + 1) % k])).collect();
    Ok(paths.iter().all(|p| {
        p.windows(2).any(|w| {
            let e = edge(w[0], w[1]);
            !cyc.contains(&e) && h.has_edge(e.0, e.1)
        })
    }))
}

/// The two parts of the inner-cycle disk outside the container of the
/// outer two paths: beyond the first path and beyond the last path.
pub fn residual_vortices(
    rho: &Rendition,
    inner: &[Vertex],
    first: &[Vertex],
    last: &[Vertex],
) -> Result<(BTreeSet<usize>, BTreeSet<usize>)> {
    let disk = cycle_disk(rho, inner)?;
    let (t1, tn) = (trace(rho, first, false)?, trace(rho, last, false)?);
    let (s1, sn) = (sides(rho, &t1)?, sides(rho, &tn)?);
    let a = s1.side_of(tn.steps[0].cell).ok_or_else(|| Error::Precondition("paths share a cell".into()))?;
    let b = sn.side_of(t1.steps[0].cell).ok_or_else(|| Error::Precondition("paths share a cell".into()))?;
    let beyond_first = disk.cells.intersection(s1.side(!a)).copied().collect();
    let beyond_last = disk.cells.intersection(sn.side(!b)).copied().collect();
    Ok((beyond_first, beyond_last))
}
