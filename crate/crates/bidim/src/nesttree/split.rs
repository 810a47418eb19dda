use super::tighten::{resolve_regressions, shrink_witness, stretches};
use super::{menger_linkage, orthogonalize_radial, split_order, vset, MengerOutcome, NestNode, NestTree, Tightening};
use super::{check_tighter, ShrinkWitness};
use crate::error::{Error, Result};
use crate::graph::{AnnotatedGraph, VSet, Vertex};
use crate::grids::Path;
use crate::homogenize::{is_r_blank, runs};
use crate::rendition::{cycle_disk, is_exposed, is_rho_flat, residual_vortices, Rendition, Transaction};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::sync::Arc;

/// Outcome of [`split_leaf`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitOutcome {
    Split(NestTree),
    Tighter(Tightening),
}

/// The cycle formed by the part of `path` inside `cycle` and the stretch of
/// `cycle` between its crossings that avoids `avoid`.
fn cycle_through(cycle: &[Vertex], path: &[Vertex], avoid: &VSet) -> Result<Path> {
    let rs = runs(path, &vset(cycle));
    let [(_, a), (b, _)] = rs[..] else {
        return Err(Error::NotOrthogonal(format!("path meets a cycle in {} subpaths", rs.len())));
    };
    stretches(cycle, path[b], path[a])
        .into_iter()
        .find(|st| st[1..st.len() - 1].iter().all(|v| !avoid.contains(v)))
        .map(|st| {
            let mut c = path[a..=b].to_vec();
            c.extend(&st[1..st.len() - 1]);
            c
        })
        .ok_or_else(|| Error::Unresolved("both stretches of a cycle meet the far side".into()))
}

fn holding(rho: &Rendition, c: Path, cells: &BTreeSet<usize>) -> Result<Path> {
    if cycle_disk(rho, &c)?.cells.is_superset(cells) {
        Ok(c)
    } else {
        Err(Error::Unresolved("rebuilt cycle misses its residual vortex".into()))
    }
}

fn union(paths: &[Path]) -> VSet {
    paths.iter().flatten().copied().collect()
}

/// Splits a leaf along an R-blank, flat, exposed transaction orthogonal to
/// its leaf nest, or returns a strictly tighter tree.
///
/// The tree must have cycle order `2s0 + s + 2`; the split tree has cycle
/// order `s`. The first `2t + 2s0 + 2s + 6` paths of the transaction in
/// natural order are used. When both residual vortices hold a vortex or a
/// red vertex the leaf gets two children whose nests combine the leaf
/// cycles with the middle paths; otherwise the leaf nest is cut down to the
/// promising side.
pub fn split_leaf(
    g: &AnnotatedGraph,
    rho: &Rendition,
    nt: &NestTree,
    leaf: usize,
    tr: &Transaction,
    s: usize,
) -> Result<SplitOutcome> {
    if leaf >= nt.nodes.len() || !nt.is_leaf(leaf) {
        return Err(Error::ParameterRange(format!("node {leaf} is not a leaf")));
    }
    let (t, s0, big) = (nt.linkage_order, nt.reserve, nt.cycle_order);
    if s == 0 || big != 2 * s0 + s + 2 {
        return Err(Error::ParameterRange(format!("cycle order {big} is not 2*{s0} + {s} + 2")));
    }
    let p = split_order(t, s0, s);
    if tr.order() < p {
        return Err(Error::OrderTooSmall { have: tr.order(), need: p });
    }
    let ls = nt.leaf_society(g, rho, leaf)?;
    let (rho1, g1) = (&ls.rendition, &ls.society.graph);
    let nest = &nt.node(leaf).nest;
    if !rho1.cells.iter().any(|c| c.vortex) && g1.red().is_empty() {
        return Err(Error::Precondition("leaf society holds neither a vortex nor a red vertex".into()));
    }
    tr.check(&ls.society)?;
    let mut paths = tr.natural_paths(&ls.society)?;
    paths.truncate(p);
    if !is_rho_flat(rho1, &paths)? {
        return Err(Error::NotFlat("a vortex lies between the outer paths".into()));
    }
    if !is_exposed(g1, rho1, &nest[0], &paths)? {
        return Err(Error::NotExposed("a path avoids the inner disk".into()));
    }
    for (j, path) in paths.iter().enumerate() {
        for (k, c) in nest[..big].iter().enumerate() {
            let n = runs(path, &vset(c)).len();
            if n != 2 {
                return Err(Error::NotOrthogonal(format!("path {} meets cycle {} in {n} subpaths", j + 1, k + 1)));
            }
        }
    }
    if !is_r_blank(g1, rho1, &paths)? {
        return Err(Error::Precondition("transaction is not R-blank".into()));
    }
    let (mut d1, mut d2) = residual_vortices(rho1, &nest[0], &paths[0], &paths[p - 1])?;
    let promising = |d: &BTreeSet<usize>| {
        d.iter().any(|&c| rho1.cells[c].vortex || rho1.cells[c].vertices().iter().any(|&v| g1.is_red(v)))
    };
    let (pr1, pr2) = (promising(&d1), promising(&d2));
    if !pr1 && !pr2 {
        return Err(Error::Precondition("neither residual vortex holds a vortex or a red vertex".into()));
    }
    if !pr1 {
        paths.reverse();
        std::mem::swap(&mut d1, &mut d2);
    }
    let full = |d: &BTreeSet<usize>| -> BTreeSet<usize> { d.iter().map(|&c| ls.cells[c]).collect() };
    let (d1, d2) = (full(&d1), full(&d2));
    let t1 = &paths[1..=t];
    let s1 = &paths[t + 1..=t + s0 + s + 2];
    let s2 = &paths[t + s0 + s + 3..=t + 2 * s0 + 2 * s + 4];
    let t2 = &paths[t + 2 * s0 + 2 * s + 5..2 * t + 2 * s0 + 2 * s + 5];

    if pr1 && pr2 {
        let kept: Vec<Path> = nest[s0 + s + 2..2 * s0 + s + 2].to_vec();
        let cut = vset(&kept[0]);
        let r_l = nt
            .radial_for(leaf)
            .iter()
            .map(|r| r.iter().position(|v| cut.contains(v)).map(|i| r[..=i].to_vec()))
            .collect::<Option<Vec<Path>>>()
            .ok_or_else(|| Error::InvalidModel("a radial path misses the kept nest".into()))?;
        let outer = vset(&kept[s0 - 1]);
        let inner = vset(&nest[0]);
        let trim = |ts: &[Path]| -> Result<Vec<Path>> {
            ts.iter()
                .map(|p| {
                    let f = p.iter().position(|v| inner.contains(v))?;
                    let e = p[..f].iter().rposition(|v| outer.contains(v))?;
                    Some(p[e..=f].to_vec())
                })
                .collect::<Option<Vec<Path>>>()
                .ok_or_else(|| Error::InvalidModel("a side path misses the kept nest".into()))
        };
        let (avoid1, avoid2) = (union(s2), union(s1));
        let mut c1 = Vec::new();
        let mut c2 = Vec::new();
        for j in 1..=s0 + s + 1 {
            c1.push(holding(rho, cycle_through(&nest[j - 1], &paths[t + j], &avoid1)?, &d1)?);
            c2.push(holding(rho, cycle_through(&nest[j - 1], &paths[t + 2 * s0 + 2 * s + 5 - j], &avoid2)?, &d2)?);
        }
        let n = nt.nodes.len();
        let mut tree = nt.clone();
        let mut node = nt.node(leaf).clone();
        node.nest = kept;
        node.children = vec![n, n + 1];
        tree = tree.with_node(leaf, node).with_radial_for(leaf, r_l);
        for (c, ts) in [(c1, trim(t1)?), (c2, trim(t2)?)] {
            tree.nodes.push(Arc::new(NestNode { nest: c, parent: Some(leaf), children: Vec::new(), linkage: ts }));
        }
        return Ok(SplitOutcome::Split(tree.with_cycle_order(s)));
    }

    let avoid = union(t2);
    let mut fresh = Vec::new();
    for i in 1..=big + 1 {
        fresh.push(holding(rho, cycle_through(&nest[i - 1], &paths[t + i], &avoid)?, &d1)?);
    }
    fresh.extend(nest[big + 1..].iter().cloned());

    let boundary = vset(&nest[big]);
    let mut prefixes = Vec::new();
    for r in nt.radial_for(leaf) {
        let x = r
            .iter()
            .rposition(|v| boundary.contains(v))
            .ok_or_else(|| Error::InvalidModel("a radial path misses the boundary cycle".into()))?;
        prefixes.push(r[..=x].to_vec());
    }
    let starts: VSet = prefixes.iter().map(|p| p[p.len() - 1]).collect();
    let outside: VSet = prefixes.iter().flat_map(|p| p[..p.len() - 1].iter().copied()).collect();
    let h = g1.without(&outside);
    let links = match menger_linkage(&h, &starts, &vset(&fresh[0]), t) {
        MengerOutcome::Linkage(ls) => ls,
        MengerOutcome::Cut(cut) => {
            return Err(Error::Unresolved(format!("only {} paths reach the tighter nest", cut.len())));
        }
    };
    let radial: Vec<Path> = prefixes
        .iter()
        .map(|pre| {
            let x = pre[pre.len() - 1];
            let l = links.iter().find(|l| l[0] == x).expect("every start is used");
            let mut q = pre.clone();
            q.extend(&l[1..]);
            q
        })
        .collect();
    let ortho = orthogonalize_radial(rho, &fresh, &radial)?;
    let radial = resolve_regressions(&ortho.nest, &ortho.radial, &mut Vec::new())?;
    let mut node = nt.node(leaf).clone();
    node.nest = ortho.nest;
    let tree = nt.with_node(leaf, node).with_radial_for(leaf, radial);
    let removed = shrink_witness(g, rho, &nest[big], &tree.node(leaf).nest[big])?
        .ok_or_else(|| Error::Unresolved("boundary cycle did not shrink".into()))?;
    if check_tighter(g, rho, nt, &tree)?.is_none() {
        return Err(Error::Unresolved("rebuilt nest is not tighter".into()));
    }
    let witness = ShrinkWitness { node: leaf, cycle: big, removed };
    Ok(SplitOutcome::Tighter(Tightening { tree, witness }))
}
