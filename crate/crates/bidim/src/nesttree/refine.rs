use super::{
    expose_or_tighten, leaf_depth_threshold, nest_bound, split_leaf, split_order, tightness, validate_nest_tree, vset,
    ExposeOutcome, NestTree, SplitOutcome, Tightening,
};
use crate::error::{Error, Result};
use crate::graph::{AnnotatedGraph, VSet};
use crate::grids::{Mesh, Path};
use crate::homogenize::{blank_or_red_orthogonal, runs, select_flat_transaction, OrthogonalOutcome};
use crate::report::Kind;
use crate::rendition::{cycle_disk, is_exposed, is_rho_flat, max_transaction, Rendition, Society, Transaction};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

/// Source of a transaction of maximum order in a leaf society.
pub trait TransactionSource {
    fn transaction(&self, s: &Society, rho: &Rendition) -> Result<Transaction>;
}

/// Computes a maximum transaction by flows.
#[derive(Debug, Clone, Copy, Default)]
pub struct MaxTransaction;

impl TransactionSource for MaxTransaction {
    fn transaction(&self, s: &Society, _rho: &Rendition) -> Result<Transaction> {
        Ok(max_transaction(s))
    }
}

impl<F> TransactionSource for F
where
    F: Fn(&Society, &Rendition) -> Result<Transaction>,
{
    fn transaction(&self, s: &Society, rho: &Rendition) -> Result<Transaction> {
        self(s, rho)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefineParams {
    pub r: usize,
    /// Reserve of the tree.
    pub s: usize,
    /// Linkage order.
    pub t: usize,
    /// Target number of splits.
    pub leaves: usize,
    /// Breadth and depth bounds of the rendition.
    pub b: usize,
    pub d: usize,
    /// Skip the size preconditions.
    pub unchecked: bool,
    /// Leaf society depth at or below which a leaf is final; defaults to the closed-form threshold.
    pub depth_bound: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RefineOutcome {
    RedMesh(Mesh),
    Tree(NestTree),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "lowercase")]
pub enum TraceEvent {
    Certified { leaf: usize, depth: usize },
    Vacant { leaf: usize },
    Tighten { leaf: usize, cycle: usize, before: usize, after: usize },
    Split { leaf: usize, leaves: usize, cycle_order: usize },
    Red { leaf: usize },
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Certified { leaf, depth } => write!(f, "certified leaf={leaf} depth={depth}"),
            Self::Vacant { leaf } => write!(f, "vacant leaf={leaf}"),
            Self::Tighten { leaf, cycle, before, after } => {
                write!(f, "tighten leaf={leaf} cycle={cycle} measure={before}->{after}")
            }
            Self::Split { leaf, leaves, cycle_order } => {
                write!(f, "split leaf={leaf} leaves={leaves} cycle_order={cycle_order}")
            }
            Self::Red { leaf } => write!(f, "red leaf={leaf}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefineRun {
    pub outcome: RefineOutcome,
    pub log: Vec<TraceEvent>,
}

fn check_params(g: &AnnotatedGraph, rho: &Rendition, nest: &[Path], radial: &[Path], p: &RefineParams) -> Result<()> {
    if p.unchecked {
        return Ok(());
    }
    if !(p.s >= p.t && p.t > p.r && p.r >= 3) {
        return Err(Error::ParameterRange(format!("need s >= t >= r + 1 >= 4, got s = {}, t = {}, r = {}", p.s, p.t, p.r)));
    }
    let need = nest_bound(p.s, p.leaves);
    if nest.len() != need {
        return Err(Error::ParameterRange(format!("nest order {} is not {need}", nest.len())));
    }
    if radial.len() != p.t {
        return Err(Error::ParameterRange(format!("radial order {} is not {}", radial.len(), p.t)));
    }
    if rho.breadth() > p.b || rho.depth(g) > p.d {
        return Err(Error::Precondition(format!("rendition exceeds breadth {} or depth {}", p.b, p.d)));
    }
    Ok(())
}

/// Refines a nest with a radial linkage into a nest tree whose leaves are
/// either `ℓ + 1` in number or all shallow, or finds a red r-mesh.
///
/// Each round takes an uncertified leaf and either certifies it (depth at
/// most the threshold, or neither vortex nor red vertex), tightens the tree,
/// splits the leaf or returns the red mesh. Tightening is capped at
/// `s·|E|` rounds and its measure must fall every time.
pub fn refine_nest_tree(
    g: &AnnotatedGraph,
    rho: &Rendition,
    nest: &[Path],
    radial: &[Path],
    params: &RefineParams,
    source: &dyn TransactionSource,
) -> Result<RefineRun> {
    check_params(g, rho, nest, radial, params)?;
    let RefineParams { r, s: s0, t, leaves: target, b, d, .. } = *params;
    let mut nt = NestTree::single(nest.to_vec(), radial.to_vec(), s0)?;
    let report = validate_nest_tree(rho, &nt, g.red());
    if report.kinds().iter().any(|k| *k != Kind::ZConsistency) {
        return Err(Error::InvalidModel(report.to_string()));
    }
    let inner = cycle_disk(rho, &nest[0])?;
    let ring = vset(&nest[0]);
    let inside: VSet = inner.cells.iter().flat_map(|&c| rho.cells[c].vertices()).filter(|v| !ring.contains(v)).collect();
    if !g.red().is_subset(&inside) {
        return Err(Error::Precondition("the nest is not R-consistent".into()));
    }

    let cap = nt.cycle_order * g.m().max(1);
    let mut tightenings = 0;
    let mut log = Vec::new();
    let mut done: BTreeSet<usize> = BTreeSet::new();
    loop {
        let leaves = nt.leaves();
        if leaves.len() > target {
            break;
        }
        let Some(&l) = leaves.iter().find(|l| !done.contains(l)) else { break };
        let big = nt.cycle_order;
        let next = big.saturating_sub(2 * s0 + 2);
        let ls = nt.leaf_society(g, rho, l)?;
        let (soc, rho1) = (&ls.society, &ls.rendition);
        let g1 = &soc.graph;
        if !rho1.cells.iter().any(|c| c.vortex) && g1.red().is_empty() {
            done.insert(l);
            log.push(TraceEvent::Vacant { leaf: l });
            continue;
        }
        let tr = source.transaction(soc, rho1)?;
        let p_split = split_order(t, s0, next.max(1));
        let q = r * (r - 1) * p_split;
        let threshold = params.depth_bound.unwrap_or_else(|| leaf_depth_threshold(b, d, r, t, s0, big, next.max(1)));
        if tr.order() <= threshold {
            done.insert(l);
            log.push(TraceEvent::Certified { leaf: l, depth: tr.order() });
            continue;
        }
        if next == 0 {
            return Err(Error::Precondition(format!("cycle order {big} leaves no room to split")));
        }
        let p_exp = big * (q + 1) + 1;
        let all = tr.natural_paths(soc)?;
        let flat = if is_rho_flat(rho1, &all)? {
            Transaction::new(all)
        } else {
            select_flat_transaction(soc, rho1, &tr, 2 * big + p_exp + 2, b, d)?
        };
        let leaf_nest = &nt.node(l).nest;
        let paths = flat.natural_paths(soc)?;
        let exposed = if is_exposed(g1, rho1, &leaf_nest[0], &paths)? {
            paths
        } else {
            match expose_or_tighten(g, rho, &nt, l, &flat, p_exp)? {
                ExposeOutcome::Exposed(e) => e.natural_paths(soc)?,
                ExposeOutcome::Tighter(tt) => {
                    nt = apply_tightening(g, rho, &nt, tt, &mut log, &mut tightenings, cap)?;
                    continue;
                }
            }
        };
        let cycles = &leaf_nest[..=big];
        if cycles.len() < r + 1 {
            return Err(Error::OrderTooSmall { have: cycles.len(), need: r + 1 });
        }
        let sets: Vec<VSet> = cycles.iter().map(|c| vset(c)).collect();
        let ortho: Vec<Path> =
            exposed.into_iter().filter(|p| sets.iter().all(|c| runs(p, c).len() == 2)).take(q).collect();
        if ortho.len() < q {
            return Err(Error::NotOrthogonal(format!("only {} of {q} paths cross the leaf nest twice", ortho.len())));
        }
        match blank_or_red_orthogonal(soc, rho1, cycles, &Transaction::new(ortho), r, p_split)? {
            OrthogonalOutcome::RedMesh(mesh) => {
                log.push(TraceEvent::Red { leaf: l });
                return Ok(RefineRun { outcome: RefineOutcome::RedMesh(mesh), log });
            }
            OrthogonalOutcome::Blank(blank) => match split_leaf(g, rho, &nt, l, &blank, next)? {
                SplitOutcome::Split(tree) => {
                    nt = tree;
                    log.push(TraceEvent::Split { leaf: l, leaves: nt.leaves().len(), cycle_order: nt.cycle_order });
                }
                SplitOutcome::Tighter(tt) => {
                    nt = apply_tightening(g, rho, &nt, tt, &mut log, &mut tightenings, cap)?;
                }
            },
        }
    }
    Ok(RefineRun { outcome: RefineOutcome::Tree(nt), log })
}

fn apply_tightening(
    g: &AnnotatedGraph,
    rho: &Rendition,
    old: &NestTree,
    tt: Tightening,
    log: &mut Vec<TraceEvent>,
    count: &mut usize,
    cap: usize,
) -> Result<NestTree> {
    *count += 1;
    if *count > cap {
        return Err(Error::CapExceeded { n: *count, cap });
    }
    let before = tightness(g, rho, old)?;
    let after = tightness(g, rho, &tt.tree)?;
    if after >= before {
        return Err(Error::Unresolved(format!("tightening raised the measure from {before} to {after}")));
    }
    log.push(TraceEvent::Tighten { leaf: tt.witness.node, cycle: tt.witness.cycle, before, after });
    Ok(tt.tree)
}
