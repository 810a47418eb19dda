//! One PASS/FAIL line per acceptance criterion. Criteria listed in
//! `KNOWN_FAILURES` are reported as FAIL without failing the run; any other
//! FAIL, or a known failure that starts passing, exits non-zero.

mod common;

use bidim::decompose::{
    balanced_separator, check_global, is_linked, linear_decomposition_from_depth, local_to_global,
    validate_linear_decomposition, validate_tree_decomposition, Balance, Bounds, BruteOracle, GlobalOutcome,
    LinearDecomposition,
};
use bidim::format::{emit_annotated_graph, emit_certificate, parse_annotated_graph, parse_certificate};
use bidim::graph::{edge, Edge, VSet, Vertex};
use bidim::grids::make_grid;
use bidim::homogenize::{
    blank_or_red_orthogonal, homogenize_flat_mesh, homogenize_transaction, is_blank_mesh, is_blank_transaction,
    is_r_blank, is_red_mesh, is_red_transaction, red_grid_from_red_mesh, OrthogonalOutcome, Tag, TransactionArm,
};
use bidim::model::{red_clique_bound, red_clique_or_separation, CliqueOutcome};
use bidim::nesttree::{refine_nest_tree, validate_nest_tree, MaxTransaction, RefineOutcome, RefineParams, TraceEvent};
use bidim::oracle::{
    brute_society_depth, connected_graphs_up_to_iso, exact_bidimensionality, exact_treewidth, grid_pattern, graphs_up_to_iso, red_sets_up_to_iso,
};
use bidim::rendition::{ccw_around, grid_drawing, validate_rendition, Blob, Rendition, Society, Transaction};
use bidim::{AnnotatedGraph, MinorModel, SideTag};
use common::{capped_grid, column, ring};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::BTreeSet;
use std::time::{Duration, Instant};

const KNOWN_FAILURES: &[usize] = &[1];

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn treewidth_collapse() -> Verdict {
    let graphs: Vec<AnnotatedGraph> = (1..=7).flat_map(connected_graphs_up_to_iso).collect();
    let mismatches: Vec<(AnnotatedGraph, usize, usize)> = graphs
        .par_iter()
        .filter_map(|g| {
            let all_red = g.clone().with_red(g.vertex_set()).unwrap();
            let b = exact_bidimensionality(&all_red, g.n(), 12).unwrap();
            let tw = exact_treewidth(g, 12).unwrap();
            (b != tw).then(|| (g.clone(), b, tw))
        })
        .collect();
    let smallest = mismatches.iter().min_by_key(|(g, ..)| (g.n(), g.m()));
    let example = smallest.map_or(String::new(), |(g, b, tw)| {
        format!("; smallest: n={} m={} bidimensionality {b} vs treewidth {tw}", g.n(), g.m())
    });
    verdict(mismatches.is_empty(), format!("{} of {} graphs disagree{example}", mismatches.len(), graphs.len()))
}

fn outer_red_grid() -> Verdict {
    let got: Vec<usize> = (3..=5).map(|n| exact_bidimensionality(&common::grid_col1(n), 3, 25).unwrap()).collect();
    verdict(got == [1, 2, 2], format!("n = 3, 4, 5 give {got:?}"))
}

/// An `n × n` grid in which every brick has at least one red corner.
fn random_red_mesh(n: usize, rng: &mut ChaCha8Rng) -> AnnotatedGraph {
    let mesh = make_grid(n, n).unwrap();
    let rows = &mesh.horizontal;
    let mut red = VSet::new();
    for i in 0..n - 1 {
        for j in 0..n - 1 {
            let corners = [rows[i][j], rows[i][j + 1], rows[i + 1][j], rows[i + 1][j + 1]];
            red.insert(*corners.choose(rng).unwrap());
        }
    }
    red.extend(rows.iter().flatten().filter(|_| rng.gen_bool(0.1)));
    mesh.graph().with_red(red).unwrap()
}

fn red_mesh_to_grid() -> Verdict {
    let mut rng = rng(3);
    let mut failures = Vec::new();
    for trial in 0..50 {
        let k = 2 + trial % 2;
        let n = 3 * k - 1;
        let g = random_red_mesh(n, &mut rng);
        let mesh = make_grid(n, n).unwrap();
        let rho = grid_drawing(&mesh.horizontal, g.edges().collect::<Vec<_>>(), true).build();
        let ok = red_grid_from_red_mesh(&g, &rho, &mesh).is_ok_and(|m| {
            m.base.pattern == grid_pattern(k)
                && m.red_pattern.len() == k * k
                && bidim::model::verify_red_minor_model(&g, &m).unwrap().is_valid()
        });
        if !ok {
            failures.push(trial);
        }
    }
    verdict(failures.is_empty(), format!("{} of 50 fixtures verified (k = 2, 3); failures {failures:?}", 50 - failures.len()))
}

fn red_clique_constant() -> Verdict {
    let t = 3;
    let mut notes = Vec::new();
    let mut pass = red_clique_bound(t) == 7;
    for k in 5..=9u32 {
        let blank = AnnotatedGraph::complete(k);
        let red = blank.clone().with_red(1..=k).unwrap();
        let model = MinorModel::identity(&blank);
        let clique = match red_clique_or_separation(&red, &model, t) {
            Ok(CliqueOutcome::RedClique(m)) => {
                m.verify(&red).unwrap().is_valid()
                    && m.base.pattern.n() == t
                    && m.base.branch.values().all(|b| model.branch.values().any(|mb| mb.is_subset(b)))
            }
            _ => false,
        };
        pass &= clique == (k >= 7);
        let separation = match red_clique_or_separation(&blank, &model, t) {
            Ok(CliqueOutcome::Separation(sep)) => {
                sep.order() < t
                    && sep.is_valid_in(&blank)
                    && model.majority(&sep).unwrap() == SideTag::B
                    && sep.strict(SideTag::B).is_disjoint(blank.red())
            }
            _ => false,
        };
        pass &= separation == (k >= 7);
        notes.push(format!("K{k}: clique {clique}, blank separation {separation}"));
    }
    verdict(pass, notes.join("; "))
}

/// Whether the rectangle of grid coordinates holds a red vertex.
fn rect_red(g: &AnnotatedGraph, n: usize, r0: usize, r1: usize, c0: usize, c1: usize) -> bool {
    g.red().iter().any(|&v| {
        let (i, j) = ((v as usize - 1) / n, (v as usize - 1) % n);
        v as usize <= n * n && (r0..=r1).contains(&i) && (c0..=c1).contains(&j)
    })
}

fn flat_mesh_trial(rng: &mut ChaCha8Rng, r: usize) -> Result<(), String> {
    let n = (r + 2) * (r + 2);
    let density = rng.gen_range(0.0..0.12);
    let red: Vec<Vertex> = (1..=(n * n) as Vertex).filter(|_| rng.gen_bool(density)).collect();
    let (g, rho, mesh) = capped_grid(n, &red);
    let alpha: Vec<usize> = (1..=r + 2).map(|i| i + (i - 1) * (r + 2) - 1).collect();
    let all_red = (0..=r).all(|a| (0..=r).all(|b| rect_red(&g, n, alpha[a], alpha[a + 1], alpha[b], alpha[b + 1])));
    let out = homogenize_flat_mesh(&g, &rho, &mesh, r).map_err(|e| e.to_string())?;
    let shape = out.mesh.rows() == r && out.mesh.cols() == r && out.mesh.validate(Some(&g)).is_valid();
    let arm = match out.tag {
        Tag::Red => all_red && is_red_mesh(&g, &out.rendition, &out.mesh).unwrap(),
        Tag::Blank => {
            !all_red
                && is_blank_mesh(&g, &out.rendition, &out.mesh).unwrap()
                && validate_rendition(&g, &out.rendition).is_valid()
        }
    };
    if shape && arm {
        Ok(())
    } else {
        Err(format!("flat mesh r={r}: tag {:?}, expected red arm {all_red}", out.tag))
    }
}

fn row_index(v: Vertex, cols: usize) -> usize {
    (v as usize - 1) / cols
}

fn transaction_trial(rng: &mut ChaCha8Rng, q: usize, p: usize) -> Result<(), String> {
    let (rows_n, cols) = (2 * q * p + 1, 5);
    let mesh = make_grid(rows_n, cols).unwrap();
    let rows = &mesh.horizontal;
    let mut red = VSet::new();
    for i in 0..q * p - 1 {
        if rng.gen_bool(0.7) {
            red.insert(rows[2 * i + 2][rng.gen_range(1..=3)]);
        }
    }
    let g = mesh.graph().with_red(red).unwrap();
    let d = grid_drawing(rows, g.edges().collect::<Vec<_>>(), true);
    let s = Society::new(g.clone(), d.boundary.clone().unwrap());
    let rho = d.build();
    let t = Transaction::new((0..q * p).map(|i| rows[2 * i + 1].clone()).collect());
    let natural = t.natural_paths(&s).map_err(|e| e.to_string())?;
    let gap_red: Vec<bool> = natural
        .windows(2)
        .map(|w| {
            let between = (row_index(w[0][0], cols) + row_index(w[1][0], cols)) / 2;
            rows[between][1..=3].iter().any(|v| g.is_red(*v))
        })
        .collect();
    let last = gap_red.len() - 1;
    let strip_red: Vec<bool> = (0..=last)
        .map(|i| gap_red[i] || (i > 0 && gap_red[i - 1]) || (i < last && gap_red[i + 1]))
        .collect();
    let blank_block = (0..q).find(|&b| strip_red[b * p..b * p + p - 1].iter().all(|x| !x));
    match (homogenize_transaction(&s, &rho, &t, q, p).map_err(|e| e.to_string())?, blank_block) {
        (TransactionArm::Blank(b), Some(i)) if b.paths == natural[i * p..(i + 1) * p] && is_blank_transaction(&s, &b).unwrap() => {
            Ok(())
        }
        (TransactionArm::Red(rt), None) if rt.order() == q && is_red_transaction(&s, &rt).unwrap() => Ok(()),
        (arm, expected) => Err(format!("transaction q={q} p={p}: got {arm:?}, expected blank block {expected:?}")),
    }
}

fn orthogonal_trial(rng: &mut ChaCha8Rng, r: usize, p: usize) -> Result<(), String> {
    let width = r * (r - 1) * p;
    let k0 = r + 1;
    let n = width + 2 + 2 * k0;
    let mesh = make_grid(n, n).unwrap();
    let rows = &mesh.horizontal;
    let inner = k0 + 1..=n - 2 - k0;
    let mut red = VSet::new();
    for _ in 0..rng.gen_range(1..=r * (r - 1) + 1) {
        red.insert(rows[rng.gen_range(inner.clone())][rng.gen_range(inner.clone())]);
    }
    let g = mesh.graph().with_red(red).unwrap();
    let d = grid_drawing(rows, g.edges().collect::<Vec<_>>(), true);
    let s = Society::new(g.clone(), d.boundary.clone().unwrap());
    let rho = d.build();
    let nest: Vec<Vec<Vertex>> = (1..=k0).rev().map(|k| ring(rows, k)).collect();
    let t = Transaction::new(inner.clone().map(|j| column(rows, j)).collect());
    let natural = t.natural_paths(&s).map_err(|e| e.to_string())?;
    let col = |path: &Vec<Vertex>| (path[0] as usize - 1) % n;
    let blank_block = (0..r * (r - 1)).find(|&b| {
        let (a, z) = (col(&natural[b * p]), col(&natural[b * p + p - 1]));
        let (lo, hi) = (a.min(z), a.max(z));
        !g.red().iter().any(|&v| (lo..=hi).contains(&((v as usize - 1) % n)))
    });
    let out = blank_or_red_orthogonal(&s, &rho, &nest, &t, r, p).map_err(|e| e.to_string())?;
    match (out, blank_block) {
        (OrthogonalOutcome::Blank(b), Some(i)) if b.paths == natural[i * p..(i + 1) * p] && is_r_blank(&g, &rho, &b.paths).unwrap() => {
            Ok(())
        }
        (OrthogonalOutcome::RedMesh(m), None)
            if m.rows() == r && m.cols() == r && m.validate(Some(&g)).is_valid() && is_red_mesh(&g, &rho, &m).unwrap() =>
        {
            Ok(())
        }
        (arm, expected) => Err(format!("orthogonal r={r} p={p}: got {arm:?}, expected blank block {expected:?}")),
    }
}

fn dichotomy() -> Verdict {
    let mut rng = rng(5);
    let mut errors = Vec::new();
    let mut arms = [0usize; 3];
    for i in 0..200 {
        let res = flat_mesh_trial(&mut rng, if i % 4 == 3 { 3 } else { 2 });
        arms[0] += usize::from(res.is_ok());
        errors.extend(res.err());
    }
    for i in 0..200 {
        let res = transaction_trial(&mut rng, 2 + i % 2, 2 + (i / 2) % 2);
        arms[1] += usize::from(res.is_ok());
        errors.extend(res.err());
    }
    for i in 0..200 {
        let res = orthogonal_trial(&mut rng, if i % 4 == 3 { 3 } else { 2 }, 2 + i % 2);
        arms[2] += usize::from(res.is_ok());
        errors.extend(res.err());
    }
    let first = errors.iter().take(3).map(|e| format!("; {e}")).collect::<String>();
    verdict(
        errors.is_empty(),
        format!("verified arms: flat mesh {}/200, transaction {}/200, orthogonal {}/200{first}", arms[0], arms[1], arms[2]),
    )
}

#[derive(Clone, Copy)]
enum Hub {
    Empty,
    Plain { red: bool },
    Vortex { red: bool },
}

/// A 6 × 6 grid whose central face is optionally split by a diagonal, with
/// a hub vertex (drawn or inside a vortex) in each resulting face.
fn nest_fixture(split: Option<bool>, hubs: [Hub; 2]) -> (AnnotatedGraph, Rendition, Vec<Vec<Vertex>>) {
    let mesh = make_grid(6, 6).unwrap();
    let rows = mesh.horizontal.clone();
    let (a, b, c, dd) = (rows[2][2], rows[2][3], rows[3][3], rows[3][2]);
    let mut g = mesh.graph();
    let faces: Vec<Vec<Vertex>> = match split {
        None => vec![vec![a, b, c, dd]],
        Some(true) => vec![vec![a, b, c], vec![a, c, dd]],
        Some(false) => vec![vec![a, b, dd], vec![b, c, dd]],
    };
    let mut drawing = grid_drawing(&rows, Vec::<Edge>::new(), true);
    match split {
        Some(true) => g.add_edge(a, c).map(|_| ()).unwrap(),
        Some(false) => g.add_edge(b, dd).map(|_| ()).unwrap(),
        None => {}
    }
    let mut red = VSet::new();
    let mut blobs = Vec::new();
    for (i, (face, hub)) in faces.iter().zip(hubs).enumerate() {
        let h = 37 + i as Vertex;
        let center = face.iter().fold((0.0, 0.0), |(x, y), v| {
            let (px, py) = drawing.pos[v];
            (x + px / face.len() as f64, y + py / face.len() as f64)
        });
        let spokes: Vec<Edge> = face.iter().map(|&v| edge(v, h)).collect();
        let is_red = match hub {
            Hub::Empty => continue,
            Hub::Plain { red } | Hub::Vortex { red } => red,
        };
        for &(u, v) in &spokes {
            g.add_edge(u, v).unwrap();
        }
        if is_red {
            red.insert(h);
        }
        if let Hub::Vortex { .. } = hub {
            let nodes = ccw_around(center, face, &drawing.pos);
            blobs.push(Blob { nodes, interior: VSet::from([h]), edges: spokes, vortex: true, center });
        } else {
            drawing.place(h, center.0, center.1);
        }
    }
    let g = g.with_red(red).unwrap();
    let in_blob: BTreeSet<Edge> = blobs.iter().flat_map(|b: &Blob| b.edges.iter().copied()).collect();
    drawing.edges = g.edges().filter(|e| !in_blob.contains(e)).collect();
    drawing.blobs = blobs;
    (g, drawing.build(), rows)
}

fn nest_corpus() -> Vec<(Option<bool>, [Hub; 2], usize)> {
    let singles = [Hub::Plain { red: true }, Hub::Vortex { red: true }, Hub::Vortex { red: false }];
    let slots = [
        Hub::Empty,
        Hub::Plain { red: false },
        Hub::Plain { red: true },
        Hub::Vortex { red: false },
        Hub::Vortex { red: true },
    ];
    let meaningful = |hs: &[Hub]| hs.iter().any(|h| matches!(h, Hub::Vortex { .. } | Hub::Plain { red: true }));
    let mut out = Vec::new();
    for radial in [2, 3] {
        for h in singles {
            out.push((None, [h, Hub::Empty], radial));
        }
    }
    for (i, split) in [Some(true), Some(false)].into_iter().enumerate() {
        for (x, &h1) in slots.iter().enumerate() {
            for &h2 in &slots[x..] {
                if meaningful(&[h1, h2]) {
                    out.push((split, [h1, h2], 2 + (out.len() + i) % 2));
                }
            }
        }
    }
    out.truncate(30);
    out
}

fn nest_tree_soundness() -> Verdict {
    let corpus = nest_corpus();
    let mut errors = Vec::new();
    let (mut events, mut tightenings) = (0, 0);
    let mut sizes = (usize::MAX, 0);
    for (idx, &(split, hubs, radial_col)) in corpus.iter().enumerate() {
        let (g, rho, rows) = nest_fixture(split, hubs);
        sizes = (sizes.0.min(g.n()), sizes.1.max(g.n()));
        let rep = validate_rendition(&g, &rho);
        if !rep.is_valid() || rho.breadth() > 2 || g.n() > 40 {
            errors.push(format!("fixture {idx}: bad rendition {rep}"));
            continue;
        }
        let nest = vec![ring(&rows, 2), ring(&rows, 1)];
        let radial = vec![(0..=2).map(|i| rows[i][radial_col]).collect::<Vec<_>>()];
        let params = RefineParams { r: 2, s: 0, t: 1, leaves: 1, b: 2, d: 6, unchecked: true, depth_bound: None };
        match refine_nest_tree(&g, &rho, &nest, &radial, &params, &MaxTransaction) {
            Ok(run) => {
                events += run.log.len();
                for e in &run.log {
                    if let TraceEvent::Tighten { before, after, .. } = e {
                        tightenings += 1;
                        if after >= before {
                            errors.push(format!("fixture {idx}: tighten measure {before} -> {after}"));
                        }
                    }
                }
                if let RefineOutcome::Tree(tree) = run.outcome {
                    let rep = validate_nest_tree(&rho, &tree, g.red());
                    if !rep.is_valid() {
                        errors.push(format!("fixture {idx}: {rep}"));
                    }
                }
            }
            Err(e) => errors.push(format!("fixture {idx}: {e}")),
        }
    }
    let first = errors.first().map_or(String::new(), |e| format!("; first failure: {e}"));
    verdict(
        errors.is_empty() && corpus.len() == 30,
        format!(
            "{} renditions ({}..={} vertices), {} of them valid, {events} trace events, {tightenings} tightenings{first}",
            corpus.len(),
            sizes.0,
            sizes.1,
            corpus.len() - errors.len()
        ),
    )
}

fn random_graph(rng: &mut ChaCha8Rng, n: u32, p: f64) -> AnnotatedGraph {
    let mut g = AnnotatedGraph::from_edges(1..=n, &[]).unwrap();
    for u in 1..=n {
        for v in u + 1..=n {
            if rng.gen_bool(p) {
                g.add_edge(u, v).unwrap();
            }
        }
    }
    g
}

fn balanced(g: &AnnotatedGraph, x: &VSet, s: &VSet) -> bool {
    let mut seen = s.clone();
    for v in g.vertices() {
        if seen.contains(&v) {
            continue;
        }
        let mut comp = vec![v];
        seen.insert(v);
        let mut i = 0;
        while i < comp.len() {
            for w in g.neighbors(comp[i]) {
                if seen.insert(w) {
                    comp.push(w);
                }
            }
            i += 1;
        }
        if 3 * comp.iter().filter(|v| x.contains(v)).count() > 2 * x.len() {
            return false;
        }
    }
    true
}

fn separator_correctness() -> Verdict {
    let mut rng = rng(7);
    let triples: Vec<(AnnotatedGraph, VSet, usize)> = (0..500)
        .map(|_| {
            let n = rng.gen_range(2..=10);
            let density = rng.gen_range(0.1..0.8);
            let g = random_graph(&mut rng, n, density);
            let k = rng.gen_range(1..=2);
            let size = rng.gen_range(1..=(3 * k + 1).min(n as usize));
            let x: VSet = (1..=n).choose_multiple(&mut rng, size).into_iter().collect();
            (g, x, k)
        })
        .collect();
    let outcomes: Vec<Result<bool, String>> = triples
        .par_iter()
        .map(|(g, x, k)| {
            let linked = is_linked(g, x, *k, (2, 3), 12).map_err(|e| e.to_string())?;
            Ok(match balanced_separator(g, x, *k).map_err(|e| e.to_string())? {
                Balance::Separator(s) => !linked && s.len() <= *k && balanced(g, x, &s),
                Balance::Linked(_) => linked,
            })
        })
        .collect();
    let linked = triples.iter().filter(|(g, x, k)| is_linked(g, x, *k, (2, 3), 12).unwrap()).count();
    let bad = outcomes.iter().filter(|o| !matches!(o, Ok(true))).count();
    verdict(bad == 0, format!("{bad} disagreements over 500 triples ({linked} linked)"))
}

fn interval_violations(s: &Society, ld: &LinearDecomposition) -> usize {
    s.graph
        .vertices()
        .filter(|v| {
            let at: Vec<usize> = ld.bags.iter().enumerate().filter(|(_, b)| b.contains(v)).map(|(i, _)| i).collect();
            at.is_empty() || at.windows(2).any(|w| w[1] != w[0] + 1)
        })
        .count()
}

fn linear_decompositions() -> Verdict {
    let mut rng = rng(8);
    let mut societies = Vec::new();
    while societies.len() < 100 {
        let n = rng.gen_range(3..=12);
        let density = rng.gen_range(0.15..0.4);
        let g = random_graph(&mut rng, n, density);
        let size = rng.gen_range(2..=n as usize);
        let mut omega: Vec<Vertex> = (1..=n).choose_multiple(&mut rng, size);
        omega.shuffle(&mut rng);
        let s = Society::new(g, omega);
        let depth = brute_society_depth(&s, 12).unwrap();
        if depth <= 4 {
            societies.push((s, depth));
        }
    }
    let mut violations = Vec::new();
    for (i, (s, depth)) in societies.iter().enumerate() {
        match linear_decomposition_from_depth(s, *depth) {
            Ok(ld) => {
                let adhesion = ld.bags.windows(2).map(|w| w[0].intersection(&w[1]).count()).max().unwrap_or(0);
                let ok = interval_violations(s, &ld) == 0
                    && adhesion <= *depth
                    && ld.bags.len() == s.omega.len()
                    && validate_linear_decomposition(s, &ld).is_valid();
                if !ok {
                    violations.push(i);
                }
            }
            Err(_) => violations.push(i),
        }
    }
    let depths: Vec<usize> = (0..=4).map(|d| societies.iter().filter(|(_, x)| *x == d).count()).collect();
    verdict(
        violations.is_empty(),
        format!("{} violations over 100 societies (depth histogram 0..=4: {depths:?})", violations.len()),
    )
}

fn local_to_global_dichotomy() -> Verdict {
    let instances: Vec<AnnotatedGraph> = (1..=7).flat_map(graphs_up_to_iso).flat_map(|g| red_sets_up_to_iso(&g)).collect();
    let bounds = Bounds::desk(2);
    let oracle = BruteOracle { cap: 12 };
    let results: Vec<(bool, bool)> = instances
        .par_iter()
        .map(|g| {
            let grid = exact_bidimensionality(g, 2, 12).unwrap() >= 2;
            let ok = match local_to_global(g, 2, &VSet::new(), &oracle, &bounds) {
                Ok(GlobalOutcome::RedGrid(m)) => grid && m.verify(g).unwrap().is_valid(),
                Ok(GlobalOutcome::Decomposition(d)) => {
                    let root = &d.td.bags[d.td.root];
                    !grid
                        && validate_tree_decomposition(g, &d.td).is_valid()
                        && VSet::new().is_subset(root)
                        && check_global(g, &VSet::new(), &d, &bounds).unwrap().is_valid()
                        && (0..d.td.len()).filter(|t| !d.td.leaves.contains(t)).all(|t| {
                            d.embeddings.get(&t).is_some_and(|ne| {
                                let torso = bidim::decompose::annotated_torso(g, &d.td, t).unwrap();
                                let allowed: VSet = ne.apex.union(&ne.rendition.vortex_interior()).copied().collect();
                                torso.red().is_subset(&allowed)
                            })
                        })
                }
                Err(_) => false,
            };
            (ok, grid)
        })
        .collect();
    let bad = results.iter().filter(|(ok, _)| !ok).count();
    let grids = results.iter().filter(|(_, g)| *g).count();
    verdict(bad == 0, format!("{bad} failures over {} annotated graphs ({grids} with a red 2x2 grid)", instances.len()))
}

fn round_trips() -> Verdict {
    let mut diffs = Vec::new();
    let mut count = 0;
    let mut entries: Vec<_> = std::fs::read_dir(common::fixture_dir()).unwrap().map(|e| e.unwrap().path()).collect();
    entries.sort();
    for path in entries {
        let text = std::fs::read_to_string(&path).unwrap();
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        let stable = match path.extension().and_then(|e| e.to_str()) {
            Some("json") => parse_certificate(&text).is_ok_and(|c| {
                let again = emit_certificate(&c);
                again == text && parse_certificate(&again).is_ok_and(|d| d == c)
            }),
            Some("agr") => parse_annotated_graph(&text).is_ok_and(|g| {
                let again = emit_annotated_graph(&g).unwrap();
                again == text && parse_annotated_graph(&again).is_ok_and(|h| h == g)
            }),
            _ => continue,
        };
        count += 1;
        if !stable {
            diffs.push(name);
        }
    }
    verdict(diffs.is_empty() && count > 0, format!("{} diffs over {count} fixture files {diffs:?}", diffs.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Verdict, Duration); 10] = [
        ("treewidth collapse on connected graphs up to 7 vertices", treewidth_collapse, Duration::from_secs(600)),
        ("grid with a red outer column", outer_red_grid, Duration::from_secs(300)),
        ("red mesh to red grid", red_mesh_to_grid, Duration::from_secs(60)),
        ("red clique constant", red_clique_constant, Duration::from_secs(60)),
        ("dichotomy exhaustiveness", dichotomy, Duration::from_secs(300)),
        ("nest-tree soundness", nest_tree_soundness, Duration::from_secs(300)),
        ("separator correctness", separator_correctness, Duration::from_secs(600)),
        ("linear decompositions", linear_decompositions, Duration::from_secs(120)),
        ("local-to-global dichotomy", local_to_global_dichotomy, Duration::from_secs(1200)),
        ("certificate round-trips", round_trips, Duration::from_secs(60)),
    ];
    let mut unexpected = Vec::new();
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let id = i + 1;
        let start = Instant::now();
        let v = run();
        let took = start.elapsed();
        let pass = v.pass && took <= *budget;
        let timing = format!("{:.1}s of {}s", took.as_secs_f64(), budget.as_secs());
        println!("{} {id:>2} {name}: {} [{timing}]", if pass { "PASS" } else { "FAIL" }, v.detail);
        if pass == KNOWN_FAILURES.contains(&id) {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
