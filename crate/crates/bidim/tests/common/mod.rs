#![allow(dead_code)]

use bidim::decompose::{
    balanced_separator, linear_decomposition_from_depth, local_to_global, vortex_layout, Bounds, BruteOracle,
    TreeDecomposition,
};
use bidim::format::{emit_annotated_graph, emit_certificate, Certificate};
use bidim::graph::{edge, Edge, VSet, Vertex};
use bidim::grids::{make_grid, Mesh};
use bidim::homogenize::homogenize_flat_mesh;
use bidim::model::verify_red_minor_model;
use bidim::nesttree::NestTree;
use bidim::oracle::bidimensionality_witness;
use bidim::rendition::{grid_drawing, Rendition, Society};
use bidim::AnnotatedGraph;
use std::path::PathBuf;

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("fixtures")
}

/// An `n × n` grid whose first column is red.
pub fn grid_col1(n: usize) -> AnnotatedGraph {
    let mesh = make_grid(n, n).unwrap();
    mesh.graph().with_red(mesh.horizontal.iter().map(|r| r[0])).unwrap()
}

/// An `n × n` grid on the sphere: the outer face is one vortex holding an
/// apex joined to the four corners.
pub fn capped_grid(n: usize, red: &[Vertex]) -> (AnnotatedGraph, Rendition, Mesh) {
    let mesh = make_grid(n, n).unwrap();
    let mut g = mesh.graph().with_red(red.iter().copied()).unwrap();
    let d = grid_drawing(&mesh.horizontal, g.edges().collect::<Vec<_>>(), true);
    let apex = (n * n + 1) as Vertex;
    let corners = [1, n as Vertex, (n * n - n + 1) as Vertex, (n * n) as Vertex];
    let spokes: Vec<Edge> = corners.iter().map(|&c| edge(c, apex)).collect();
    for &(u, v) in &spokes {
        g.add_edge(u, v).unwrap();
    }
    (g, d.build().capped(VSet::from([apex]), spokes), mesh)
}

pub fn petersen() -> AnnotatedGraph {
    let mut edges = Vec::new();
    for i in 0..5u32 {
        edges.push((i + 1, (i + 1) % 5 + 1));
        edges.push((i + 1, i + 6));
        edges.push((i + 6, (i + 2) % 5 + 6));
    }
    AnnotatedGraph::from_edges(1..=10, &edges).unwrap().with_red([1]).unwrap()
}

pub fn ring(rows: &[Vec<Vertex>], k: usize) -> Vec<Vertex> {
    let (b, r) = (rows.len() - 1 - k, rows[0].len() - 1 - k);
    let mut c: Vec<Vertex> = (k..=r).map(|j| rows[k][j]).collect();
    c.extend((k + 1..=b).map(|i| rows[i][r]));
    c.extend((k..r).rev().map(|j| rows[b][j]));
    c.extend((k + 1..b).rev().map(|i| rows[i][k]));
    c
}

pub fn column(rows: &[Vec<Vertex>], j: usize) -> Vec<Vertex> {
    rows.iter().map(|r| r[j]).collect()
}

/// The corpus as `(relative path, contents)` pairs.
pub fn corpus() -> Vec<(String, String)> {
    let mut files = Vec::new();
    let mut graph = |name: &str, g: &AnnotatedGraph| files.push((format!("{name}.agr"), emit_annotated_graph(g).unwrap()));
    let k1 = AnnotatedGraph::complete(1).with_red([1]).unwrap();
    let k5 = AnnotatedGraph::complete(5).with_red(1..=5).unwrap();
    let c6 = AnnotatedGraph::cycle(6);
    let mesh5 = make_grid(5, 5).unwrap();
    let grid5_red = mesh5.graph().with_red(1..=25).unwrap();
    let (capped, capped_rho, capped_mesh) = capped_grid(16, &[]);
    let (capped_red, _, _) = capped_grid(16, &(1..=256).collect::<Vec<_>>());
    graph("k1_red", &k1);
    for n in 3..=5 {
        graph(&format!("grid{n}_col1"), &grid_col1(n));
    }
    graph("k4", &AnnotatedGraph::complete(4));
    graph("k5_red", &k5);
    graph("c6", &c6);
    graph("petersen", &petersen());
    graph("grid5_red", &grid5_red);
    graph("capped16", &capped);
    graph("capped16_red", &capped_red);

    let mut cert = |name: &str, c: Certificate| files.push((format!("{name}.json"), emit_certificate(&c)));
    cert("k1_red.td", Certificate::TreeDecomposition(TreeDecomposition::single(VSet::from([1]))));
    let g4 = grid_col1(4);
    let (value, witness) = bidimensionality_witness(&g4, 3, 16).unwrap();
    cert("grid4_col1.model", Certificate::RedMinorModel(witness.clone().unwrap()));
    cert("grid4_col1.bidim", Certificate::Bidimensionality { value, witness });
    cert("grid4_col1.graph", Certificate::Graph(g4.clone()));
    let mut broken = bidimensionality_witness(&g4, 2, 16).unwrap().1.unwrap();
    let first = *broken.base.branch.keys().next().unwrap();
    broken.base.branch.insert(first, VSet::from([2]));
    cert("grid4_col1.bad-model", Certificate::RedMinorModel(broken.clone()));
    cert("grid4_col1.bad-report", Certificate::Report(verify_red_minor_model(&g4, &broken).unwrap()));

    let rho5 = grid_drawing(&mesh5.horizontal, grid5_red.edges().collect::<Vec<_>>(), true).build();
    cert("grid5.rendition", Certificate::Rendition(rho5));
    cert("grid5.mesh", Certificate::Mesh(mesh5));
    cert("capped16.rendition", Certificate::Rendition(capped_rho.clone()));
    cert("capped16.mesh", Certificate::Mesh(capped_mesh.clone()));
    cert(
        "capped16.homogenization",
        Certificate::Homogenization(homogenize_flat_mesh(&capped, &capped_rho, &capped_mesh, 2).unwrap()),
    );

    let p = petersen();
    cert("petersen.separator", Certificate::Separator(balanced_separator(&p, &VSet::from([1, 2, 3, 4]), 1).unwrap()));
    let ld = linear_decomposition_from_depth(&Society::new(c6.clone(), (1..=6).collect()), 2).unwrap();
    cert("c6.linear-decomposition", Certificate::LinearDecomposition(ld));
    let c6_red = c6.clone().with_red([1, 4]).unwrap();
    cert("c6_red.near-embedding", Certificate::NearEmbedding(vortex_layout(&c6_red).unwrap()));
    let bounds = Bounds::desk(2);
    let oracle = BruteOracle { cap: 12 };
    cert("k5_red.decomposition", Certificate::Decomposition(local_to_global(&k5, 2, &VSet::new(), &oracle, &bounds).unwrap()));
    cert(
        "petersen.decomposition",
        Certificate::Decomposition(local_to_global(&p, 2, &VSet::new(), &oracle, &bounds).unwrap()),
    );

    let rows = make_grid(12, 12).unwrap().horizontal;
    let nest = [3, 2, 1].iter().map(|&k| ring(&rows, k)).collect();
    let radial = vec![(0..=3).map(|i| rows[i][5]).collect()];
    cert("grid12.nest-tree", Certificate::NestTree(NestTree::single(nest, radial, 1).unwrap()));
    files
}
