//! Text format for annotated graphs and versioned JSON certificates.
//!
//! Graphs use a line format with 1-based ids:
//!
//! ```text
//! c optional comment
//! p agr <n> <m> <r>
//! e <u> <v>
//! r <v>
//! ```
//!
//! Certificates are JSON objects `{"format": 1, "kind": ..., "data": ...}`.

use crate::decompose::{Balance, GlobalOutcome, LinearDecomposition, NearEmbedding, TreeDecomposition};
use crate::error::{Error, Result};
use crate::graph::{AnnotatedGraph, VSet, Vertex};
use crate::grids::Mesh;
use crate::homogenize::FlatHomogenization;
use crate::model::{MinorModel, RedMinorModel};
use crate::nesttree::NestTree;
use crate::rendition::Rendition;
use crate::report::ValidityReport;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt::Write;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn fail<T>(line: usize, message: impl Into<String>) -> std::result::Result<T, ParseError> {
    Err(ParseError { line, message: message.into() })
}

fn numbers(line: usize, fields: &[&str], want: usize) -> std::result::Result<Vec<usize>, ParseError> {
    if fields.len() != want {
        return fail(line, format!("expected {want} numbers, found {}", fields.len()));
    }
    fields
        .iter()
        .map(|f| f.parse::<usize>().or_else(|_| fail(line, format!("{f:?} is not a non-negative integer"))))
        .collect()
}

/// Parses the line format; counts in the header must match the body.
pub fn parse_annotated_graph(text: &str) -> std::result::Result<AnnotatedGraph, ParseError> {
    let mut header: Option<(usize, usize, usize, usize)> = None;
    let mut g = AnnotatedGraph::new();
    let mut red = VSet::new();
    let mut last = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last = line;
        let fields: Vec<&str> = raw.split_whitespace().collect();
        let Some((&kind, rest)) = fields.split_first() else { continue };
        let id = |x: usize, n: usize| -> std::result::Result<Vertex, ParseError> {
            if x == 0 || x > n {
                return fail(line, format!("vertex {x} is outside 1..={n}"));
            }
            Ok(x as Vertex)
        };
        match (kind, header) {
            ("c", _) => {}
            ("p", None) => {
                if rest.first() != Some(&"agr") {
                    return fail(line, "header must read `p agr <n> <m> <r>`");
                }
                let v = numbers(line, &rest[1..], 3)?;
                if v[0] > u32::MAX as usize {
                    return fail(line, "too many vertices");
                }
                for x in 1..=v[0] {
                    g.add_vertex(x as Vertex);
                }
                header = Some((v[0], v[1], v[2], line));
            }
            ("p", Some((.., at))) => return fail(line, format!("second header; the first is on line {at}")),
            (_, None) => return fail(line, format!("`{kind}` line before the header")),
            ("e", Some((n, ..))) => {
                let v = numbers(line, rest, 2)?;
                let (a, b) = (id(v[0], n)?, id(v[1], n)?);
                if a == b {
                    return fail(line, format!("self-loop at {a}"));
                }
                if !g.add_edge(a, b).map_err(|e| ParseError { line, message: e.to_string() })? {
                    return fail(line, format!("duplicate edge {a} {b}"));
                }
            }
            ("r", Some((n, ..))) => {
                let v = numbers(line, rest, 1)?;
                let a = id(v[0], n)?;
                if !red.insert(a) {
                    return fail(line, format!("vertex {a} is marked red twice"));
                }
            }
            _ => return fail(line, format!("unknown line kind `{kind}`")),
        }
    }
    let Some((n, m, r, at)) = header else { return fail(last.max(1), "missing header") };
    if g.m() != m {
        return fail(at, format!("header declares {m} edges, found {}", g.m()));
    }
    if red.len() != r {
        return fail(at, format!("header declares {r} red vertices, found {}", red.len()));
    }
    debug_assert_eq!(g.n(), n);
    g.with_red(red).map_err(|e| ParseError { line: at, message: e.to_string() })
}

/// Canonical text: header, edges `u < v` in order, red marks in order.
/// The vertices must be exactly `1..=n`.
pub fn emit_annotated_graph(g: &AnnotatedGraph) -> Result<String> {
    let n = g.n();
    if g.vertices().enumerate().any(|(i, v)| v as usize != i + 1) {
        return Err(Error::ParameterRange("vertices must be numbered 1..=n".into()));
    }
    let mut out = format!("p agr {n} {} {}\n", g.m(), g.red().len());
    for (u, v) in g.edges() {
        writeln!(out, "e {u} {v}").expect("writing to a string");
    }
    for v in g.red() {
        writeln!(out, "r {v}").expect("writing to a string");
    }
    Ok(out)
}

/// Every JSON certificate kind.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "kebab-case")]
pub enum Certificate {
    Graph(AnnotatedGraph),
    MinorModel(MinorModel),
    RedMinorModel(RedMinorModel),
    Mesh(Mesh),
    Rendition(Rendition),
    TreeDecomposition(TreeDecomposition),
    LinearDecomposition(LinearDecomposition),
    NearEmbedding(NearEmbedding),
    Separator(Balance),
    Decomposition(GlobalOutcome),
    NestTree(NestTree),
    Homogenization(FlatHomogenization),
    Report(ValidityReport),
    Bidimensionality { value: usize, witness: Option<RedMinorModel> },
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Graph(_) => "graph",
            Self::MinorModel(_) => "minor-model",
            Self::RedMinorModel(_) => "red-minor-model",
            Self::Mesh(_) => "mesh",
            Self::Rendition(_) => "rendition",
            Self::TreeDecomposition(_) => "tree-decomposition",
            Self::LinearDecomposition(_) => "linear-decomposition",
            Self::NearEmbedding(_) => "near-embedding",
            Self::Separator(_) => "separator",
            Self::Decomposition(_) => "decomposition",
            Self::NestTree(_) => "nest-tree",
            Self::Homogenization(_) => "homogenization",
            Self::Report(_) => "report",
            Self::Bidimensionality { .. } => "bidimensionality",
        }
    }
}

#[derive(Serialize)]
struct Document {
    format: u32,
    #[serde(flatten)]
    certificate: Certificate,
}

#[derive(Deserialize)]
struct Version {
    format: Option<u32>,
}

fn json_error(e: serde_json::Error) -> ParseError {
    ParseError { line: e.line(), message: e.to_string() }
}

/// Pretty-printed JSON with the format version; field order is fixed, so
/// equal certificates give equal text.
pub fn emit_certificate(c: &Certificate) -> String {
    let doc = Document { format: FORMAT_VERSION, certificate: c.clone() };
    let mut s = serde_json::to_string_pretty(&doc).expect("certificates serialize");
    s.push('\n');
    s
}

pub fn parse_certificate(text: &str) -> std::result::Result<Certificate, ParseError> {
    let v: Version = serde_json::from_str(text).map_err(json_error)?;
    match v.format {
        Some(FORMAT_VERSION) => {}
        Some(f) => return fail(1, format!("unsupported format version {f}")),
        None => return fail(1, "missing `format` field"),
    }
    serde_json::from_str::<Certificate>(text).map_err(json_error)
}

/// Parses a certificate and requires the given kind.
pub fn parse_certificate_of(text: &str, kind: &str) -> std::result::Result<Certificate, ParseError> {
    let c = parse_certificate(text)?;
    if c.kind() != kind {
        return fail(1, format!("expected a {kind} certificate, found {}", c.kind()));
    }
    Ok(c)
}

/// Graphviz text for a tree decomposition; `L` nodes are drawn boxed.
pub fn tree_decomposition_dot(td: &TreeDecomposition) -> String {
    let mut out = String::from("graph td {\n");
    let leaves: BTreeSet<usize> = td.leaves.clone();
    for (t, bag) in td.bags.iter().enumerate() {
        let label = bag.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
        let shape = if leaves.contains(&t) { "box" } else if t == td.root { "doublecircle" } else { "ellipse" };
        writeln!(out, "  n{t} [label=\"{t}: {label}\", shape={shape}];").expect("writing to a string");
    }
    for (a, b) in &td.edges {
        writeln!(out, "  n{a} -- n{b};").expect("writing to a string");
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_red_vertex() {
        let g = parse_annotated_graph("p agr 1 0 1\nr 1\n").unwrap();
        assert_eq!(g.n(), 1);
        assert!(g.is_red(1));
    }

    #[test]
    fn duplicate_edge_is_rejected() {
        let err = parse_annotated_graph("p agr 2 2 0\ne 1 2\ne 2 1\n").unwrap_err();
        assert_eq!(err.line, 3);
        assert!(err.message.contains("duplicate"));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("e 1 2\np agr 2 1 0\n", 1),
            ("c hi\np agr 2 1 0\ne 1 3\n", 3),
            ("p agr 2 1 0\nx 1\n", 2),
            ("p agr 2 1 0\ne 1 1\n", 2),
            ("p agr 2 2 0\ne 1 2\n", 1),
            ("p agr 2 0 1\nr 2\nr 2\n", 3),
            ("p agr 2 0 0\np agr 2 0 0\n", 2),
            ("p agr 2 0 0\ne 1 x\n", 2),
            ("c only\n", 1),
        ];
        for (text, line) in cases {
            assert_eq!(parse_annotated_graph(text).unwrap_err().line, line, "{text:?}");
        }
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let g = parse_annotated_graph("c a path\n\np agr 3 2 0\nc middle\ne 1 2\ne 2 3\n").unwrap();
        assert_eq!(g, AnnotatedGraph::path(3));
    }

    #[test]
    fn emit_requires_contiguous_ids() {
        let g = AnnotatedGraph::from_edges([1, 3], &[(1, 3)]).unwrap();
        assert!(emit_annotated_graph(&g).is_err());
    }

    #[test]
    fn grid_with_red_column_round_trips() {
        let mesh = crate::grids::make_grid(4, 4).unwrap();
        let g = mesh.graph().with_red(mesh.horizontal.iter().map(|r| r[0])).unwrap();
        let text = emit_annotated_graph(&g).unwrap();
        let back = parse_annotated_graph(&text).unwrap();
        assert_eq!(back, g);
        assert_eq!(emit_annotated_graph(&back).unwrap(), text);
    }

    #[test]
    fn certificate_versioning() {
        let c = Certificate::Graph(AnnotatedGraph::path(2));
        let text = emit_certificate(&c);
        assert!(text.contains("\"format\": 1"));
        assert_eq!(parse_certificate(&text).unwrap(), c);
        let v2 = text.replace("\"format\": 1", "\"format\": 2");
        assert!(parse_certificate(&v2).unwrap_err().message.contains("version 2"));
        assert!(parse_certificate("{\"kind\": \"graph\"}").is_err());
        assert!(parse_certificate_of(&text, "mesh").is_err());
        let bad = parse_certificate("{\n\"format\": 1,\n\"kind\": \"mesh\",\n\"data\": 3\n}").unwrap_err();
        assert!(bad.line >= 4);
    }

    #[test]
    fn integer_keyed_maps_round_trip() {
        let g = AnnotatedGraph::complete(3).with_red([1]).unwrap();
        let m = crate::oracle::has_red_grid_minor(&g, 1, 12).unwrap().unwrap();
        let c = Certificate::RedMinorModel(m);
        assert_eq!(parse_certificate(&emit_certificate(&c)).unwrap(), c);
    }

    #[test]
    fn dot_marks_leaves() {
        let td = TreeDecomposition::graft(VSet::from([1]), Vec::new(), vec![VSet::from([1, 2])]);
        let dot = tree_decomposition_dot(&td);
        assert!(dot.contains("n1 [label=\"1: 1 2\", shape=box]"));
        assert!(dot.contains("n0 -- n1"));
    }
}
