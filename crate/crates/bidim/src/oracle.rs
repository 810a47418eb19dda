//! Exhaustive ground truth for small graphs.
//!
//! Everything here is exponential and guarded by a vertex cap. The searches
//! run on adjacency bitmasks over the compacted vertex order.

use crate::error::{Error, Result};
use crate::graph::{AnnotatedGraph, VSet, Vertex};
use crate::grids::make_grid;
use crate::model::{MinorModel, RedMinorModel};
use crate::rendition::{Society, Transaction};
use std::collections::{BTreeMap, BTreeSet};

pub const DEFAULT_CAP: usize = 12;

fn check_cap(g: &AnnotatedGraph, cap: usize) -> Result<()> {
    if g.n() > cap || g.n() > 64 {
        return Err(Error::CapExceeded { n: g.n(), cap: cap.min(64) });
    }
    Ok(())
}

/// The `k × k` grid with vertex `(i, j)` numbered `(i−1)k + j`.
pub fn grid_pattern(k: usize) -> AnnotatedGraph {
    match k {
        0 => AnnotatedGraph::new(),
        1 => AnnotatedGraph::from_edges([1], &[]).unwrap(),
        _ => make_grid(k, k).expect("k >= 2").graph(),
    }
}

fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            return None;
        }
        let i = m.trailing_zeros() as usize;
        m &= m - 1;
        Some(i)
    })
}

fn nbhd(adj: &[u64], s: u64) -> u64 {
    bits(s).fold(0, |acc, v| acc | adj[v])
}

/// Enumerates connected vertex sets inside `allowed`, each once, until `f` returns true.
fn connected_sets(adj: &[u64], allowed: u64, f: &mut dyn FnMut(u64) -> bool) -> bool {
    fn extend(adj: &[u64], allowed: u64, s: u64, mut ext: u64, above: u64, f: &mut dyn FnMut(u64) -> bool) -> bool {
        if f(s) {
            return true;
        }
        let closed = s | nbhd(adj, s);
        while ext != 0 {
            let w = ext.trailing_zeros() as usize;
            ext &= ext - 1;
            let fresh = adj[w] & allowed & above & !closed;
            if extend(adj, allowed, s | (1 << w), ext | fresh, above, f) {
                return true;
            }
        }
        false
    }
    for v in bits(allowed) {
        let above = !((2u64 << v) - 1);
        if extend(adj, allowed, 1 << v, adj[v] & allowed & above, above, f) {
            return true;
        }
    }
    false
}

struct GridSearch<'a> {
    adj: &'a [u64],
    red: u64,
    full: u64,
    k: usize,
    sets: Vec<u64>,
}

impl GridSearch<'_> {
    fn place(&mut self, t: usize, used: u64) -> bool {
        let k = self.k;
        if t == k * k {
            return true;
        }
        if ((self.red & !used).count_ones() as usize) < k * k - t {
            return false;
        }
        let mut need = Vec::new();
        if t % k > 0 {
            need.push(nbhd(self.adj, self.sets[t - 1]));
        }
        if t >= k {
            need.push(nbhd(self.adj, self.sets[t - k]));
        }
        let free = self.full & !used;
        let (adj, red) = (self.adj, self.red);
        let mut found = None;
        let mut try_set = |s: u64| -> bool {
            if s & red == 0 || need.iter().any(|&nb| nb & s == 0) {
                return false;
            }
            self.sets.push(s);
            if self.place(t + 1, used | s) {
                found = Some(s);
                return true;
            }
            self.sets.pop();
            false
        };
        connected_sets(adj, free, &mut try_set);
        found.is_some()
    }
}

/// An all-red `k × k`-grid red minor model, if one exists.
pub fn has_red_grid_minor(g: &AnnotatedGraph, k: usize, cap: usize) -> Result<Option<RedMinorModel>> {
    check_cap(g, cap)?;
    let pattern = grid_pattern(k);
    if k == 0 {
        return Ok(Some(RedMinorModel::all_red(MinorModel::new(pattern, BTreeMap::new()))));
    }
    if g.red().len() < k * k {
        return Ok(None);
    }
    let (adj, order) = g.bitmasks();
    let red = order.iter().enumerate().filter(|(_, v)| g.is_red(**v)).fold(0u64, |m, (i, _)| m | (1 << i));
    let full = if order.len() == 64 { u64::MAX } else { (1u64 << order.len()) - 1 };
    let mut search = GridSearch { adj: &adj, red, full, k, sets: Vec::new() };
    if !search.place(0, 0) {
        return Ok(None);
    }
    let branch = search
        .sets
        .iter()
        .enumerate()
        .map(|(t, &s)| (t as Vertex + 1, bits(s).map(|i| order[i]).collect::<VSet>()))
        .collect();
    Ok(Some(RedMinorModel::all_red(MinorModel::new(pattern, branch))))
}

/// The largest `k <= k_max` with an all-red `k × k`-grid red minor, and its model.
pub fn bidimensionality_witness(
    g: &AnnotatedGraph,
    k_max: usize,
    cap: usize,
) -> Result<(usize, Option<RedMinorModel>)> {
    check_cap(g, cap)?;
    let mut best = (0, None);
    for k in 1..=k_max {
        match has_red_grid_minor(g, k, cap)? {
            Some(m) => best = (k, Some(m)),
            None => break,
        }
    }
    Ok(best)
}

pub fn exact_bidimensionality(g: &AnnotatedGraph, k_max: usize, cap: usize) -> Result<usize> {
    bidimensionality_witness(g, k_max, cap).map(|b| b.0)
}

/// Treewidth by the subset recursion over elimination orderings.
pub fn exact_treewidth(g: &AnnotatedGraph, cap: usize) -> Result<usize> {
    check_cap(g, cap)?;
    let n = g.n();
    if n == 0 {
        return Ok(0);
    }
    let (adj, _) = g.bitmasks();
    let size = 1usize << n;
    let mut tw = vec![u8::MAX; size];
    tw[0] = 0;
    for s in 1..size as u64 {
        let mut best = u8::MAX;
        for v in bits(s) {
            let rest = s & !(1 << v);
            let mut comp = 1u64 << v;
            loop {
                let grow = nbhd(&adj, comp) & rest & !comp;
                if grow == 0 {
                    break;
                }
                comp |= grow;
            }
            let q = (nbhd(&adj, comp) & !s).count_ones() as u8;
            best = best.min(tw[rest as usize].max(q));
        }
        tw[s as usize] = best;
    }
    Ok(tw[size - 1] as usize)
}

/// Every family of `k` disjoint `X`-`Y` paths. A path starts in `X`, ends in
/// `Y` and meets `X ∪ Y` nowhere else; a vertex of `X ∩ Y` is a path by itself.
pub fn all_disjoint_path_systems(
    g: &AnnotatedGraph,
    x: &VSet,
    y: &VSet,
    k: usize,
    cap: usize,
) -> Result<Vec<Vec<Vec<Vertex>>>> {
    check_cap(g, cap)?;
    let ends: VSet = x.union(y).copied().collect();
    let mut paths: Vec<Vec<Vertex>> = Vec::new();
    for &s in x {
        if y.contains(&s) {
            paths.push(vec![s]);
            continue;
        }
        let mut stack = vec![s];
        simple_paths(g, &mut stack, &|v| y.contains(&v), &|v| !ends.contains(&v), &mut paths);
    }
    paths.sort();
    let mut out = Vec::new();
    choose_disjoint(&paths, 0, k, &mut Vec::new(), &mut VSet::new(), &mut out);
    Ok(out)
}

fn simple_paths(
    g: &AnnotatedGraph,
    stack: &mut Vec<Vertex>,
    is_end: &dyn Fn(Vertex) -> bool,
    can_pass: &dyn Fn(Vertex) -> bool,
    out: &mut Vec<Vec<Vertex>>,
) {
    let u = *stack.last().unwrap();
    for w in g.neighbors(u).collect::<Vec<_>>() {
        if stack.contains(&w) {
            continue;
        }
        if is_end(w) {
            let mut p = stack.clone();
            p.push(w);
            out.push(p);
        } else if can_pass(w) {
            stack.push(w);
            simple_paths(g, stack, is_end, can_pass, out);
            stack.pop();
        }
    }
}

fn choose_disjoint(
    paths: &[Vec<Vertex>],
    from: usize,
    k: usize,
    cur: &mut Vec<Vec<Vertex>>,
    used: &mut VSet,
    out: &mut Vec<Vec<Vec<Vertex>>>,
) {
    if cur.len() == k {
        out.push(cur.clone());
        return;
    }
    for i in from..paths.len() {
        if paths[i].iter().any(|v| used.contains(v)) {
            continue;
        }
        used.extend(paths[i].iter().copied());
        cur.push(paths[i].clone());
        choose_disjoint(paths, i + 1, k, cur, used, out);
        cur.pop();
        for v in &paths[i] {
            used.remove(v);
        }
    }
}

/// Size of a maximum family of disjoint `X`-`Y` paths, by enumeration.
pub fn brute_linkage_order(g: &AnnotatedGraph, x: &VSet, y: &VSet, cap: usize) -> Result<usize> {
    let mut k = 0;
    while !all_disjoint_path_systems(g, x, y, k + 1, cap)?.is_empty() {
        k += 1;
    }
    Ok(k)
}

/// Maximum transaction order by enumerating boundary paths and their disjoint families.
pub fn brute_society_depth(s: &Society, cap: usize) -> Result<usize> {
    check_cap(&s.graph, cap)?;
    let omega = s.omega_set();
    let mut paths = Vec::new();
    for &a in &omega {
        let mut stack = vec![a];
        simple_paths(&s.graph, &mut stack, &|v| omega.contains(&v), &|v| !omega.contains(&v), &mut paths);
    }
    paths.retain(|p| p[0] < p[p.len() - 1]);
    fn grow(s: &Society, paths: &[Vec<Vertex>], from: usize, cur: &mut Vec<Vec<Vertex>>, used: &mut VSet) -> usize {
        let mut best = cur.len();
        for i in from..paths.len() {
            if paths[i].iter().any(|v| used.contains(v)) {
                continue;
            }
            cur.push(paths[i].clone());
            if Transaction::new(cur.clone()).end_segments(s).is_ok() {
                used.extend(paths[i].iter().copied());
                best = best.max(grow(s, paths, i + 1, cur, used));
                for v in &paths[i] {
                    used.remove(v);
                }
            }
            cur.pop();
        }
        best
    }
    Ok(grow(s, &paths, 0, &mut Vec::new(), &mut VSet::new()))
}

/// Canonical code of a graph on `n <= 8` vertices with an optional colour
/// bit per vertex: the least adjacency word over orderings that respect a
/// refined degree colouring.
fn canonical(adj: &[u8], colour: u8) -> u64 {
    let n = adj.len();
    let mut col: Vec<u64> = (0..n).map(|v| ((colour >> v & 1) as u64) << 32 | adj[v].count_ones() as u64).collect();
    for _ in 0..n {
        let next: Vec<u64> = (0..n)
            .map(|v| {
                let mut nb: Vec<u64> = (0..n).filter(|&w| adj[v] >> w & 1 == 1).map(|w| col[w]).collect();
                nb.sort();
                let mut h = col[v].wrapping_mul(0x9E37_79B9_7F4A_7C15);
                for c in nb {
                    h = h.rotate_left(7) ^ c.wrapping_mul(0xC2B2_AE3D_27D4_EB4F);
                }
                h
            })
            .collect();
        let distinct = |c: &[u64]| c.iter().collect::<BTreeSet<_>>().len();
        if distinct(&next) == distinct(&col) {
            break;
        }
        col = next;
    }
    let mut classes: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for v in 0..n {
        classes.entry(col[v]).or_default().push(v);
    }
    let groups: Vec<Vec<usize>> = classes.into_values().collect();
    let mut best = u64::MAX;
    let mut perm: Vec<usize> = Vec::with_capacity(n);
    fn rec(groups: &[Vec<usize>], gi: usize, perm: &mut Vec<usize>, adj: &[u8], colour: u8, best: &mut u64) {
        if gi == groups.len() {
            let n = perm.len();
            let mut code = 0u64;
            for a in 0..n {
                code = code << 1 | (colour >> perm[a] & 1) as u64;
            }
            for a in 0..n {
                for b in a + 1..n {
                    code = code << 1 | (adj[perm[a]] >> perm[b] & 1) as u64;
                }
            }
            *best = (*best).min(code);
            return;
        }
        let grp = &groups[gi];
        let mut idx: Vec<usize> = grp.clone();
        permute(&mut idx, 0, &mut |p| {
            perm.extend_from_slice(p);
            rec(groups, gi + 1, perm, adj, colour, best);
            perm.truncate(perm.len() - p.len());
        });
    }
    fn permute(v: &mut Vec<usize>, i: usize, f: &mut dyn FnMut(&[usize])) {
        if i == v.len() {
            f(v);
            return;
        }
        for j in i..v.len() {
            v.swap(i, j);
            permute(v, i + 1, f);
            v.swap(i, j);
        }
    }
    rec(&groups, 0, &mut perm, adj, colour, &mut best);
    (n as u64) << 58 ^ best
}

fn to_graph(adj: &[u8], red: u8) -> AnnotatedGraph {
    let mut g = AnnotatedGraph::new();
    for v in 0..adj.len() {
        g.add_vertex(v as Vertex + 1);
        for w in v + 1..adj.len() {
            if adj[v] >> w & 1 == 1 {
                g.add_edge(v as Vertex + 1, w as Vertex + 1).unwrap();
            }
        }
    }
    let reds: Vec<Vertex> = (0..adj.len()).filter(|&v| red >> v & 1 == 1).map(|v| v as Vertex + 1).collect();
    g.with_red(reds).unwrap()
}

/// All graphs on exactly `n <= 8` vertices up to isomorphism, on vertex ids `1..=n`.
pub fn graphs_up_to_iso(n: usize) -> Vec<AnnotatedGraph> {
    assert!(n <= 8, "enumeration supports at most 8 vertices");
    let mut level: Vec<Vec<u8>> = vec![vec![]];
    for size in 0..n {
        let mut seen = BTreeSet::new();
        let mut next = Vec::new();
        for adj in &level {
            for sub in 0u16..(1 << size) {
                let mut a = adj.clone();
                a.push(sub as u8);
                for v in bits(sub as u64) {
                    a[v] |= 1 << size;
                }
                if seen.insert(canonical(&a, 0)) {
                    next.push(a);
                }
            }
        }
        level = next;
    }
    level.iter().map(|a| to_graph(a, 0)).collect()
}

/// Connected graphs on exactly `n` vertices up to isomorphism.
pub fn connected_graphs_up_to_iso(n: usize) -> Vec<AnnotatedGraph> {
    graphs_up_to_iso(n).into_iter().filter(|g| g.is_connected()).collect()
}

/// All red sets of `g` up to automorphisms of `g`.
pub fn red_sets_up_to_iso(g: &AnnotatedGraph) -> Vec<AnnotatedGraph> {
    let (adj, _) = g.bitmasks();
    let adj: Vec<u8> = adj.iter().map(|&m| m as u8).collect();
    let n = adj.len();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for red in 0u16..(1 << n) {
        if seen.insert(canonical(&adj, red as u8)) {
            out.push(to_graph(&adj, red as u8));
        }
    }
    out
}
