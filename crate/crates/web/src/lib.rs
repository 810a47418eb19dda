//! Browser bindings: exact bidimensionality, balanced separators and the
//! decomposition driver on graphs pasted in the line format.

use bidim::decompose::{balanced_separator, check_global, local_to_global, Bounds, BruteOracle, GlobalOutcome};
use bidim::format::{emit_certificate, parse_annotated_graph, tree_decomposition_dot, Certificate};
use bidim::graph::{VSet, Vertex};
use bidim::oracle::{bidimensionality_witness, DEFAULT_CAP};
use bidim::AnnotatedGraph;
use wasm_bindgen::prelude::*;

fn graph(text: &str) -> Result<AnnotatedGraph, String> {
    parse_annotated_graph(text).map_err(|e| e.to_string())
}

fn ids(csv: &str) -> Result<VSet, String> {
    csv.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<Vertex>().map_err(|_| format!("{s:?} is not a vertex id")))
        .collect()
}

pub fn run_exact(text: &str, max_k: usize) -> Result<String, String> {
    let g = graph(text)?;
    let (value, witness) = bidimensionality_witness(&g, max_k, DEFAULT_CAP).map_err(|e| e.to_string())?;
    Ok(emit_certificate(&Certificate::Bidimensionality { value, witness }))
}

pub fn run_separator(text: &str, x: &str, k: usize) -> Result<String, String> {
    let g = graph(text)?;
    let balance = balanced_separator(&g, &ids(x)?, k).map_err(|e| e.to_string())?;
    Ok(emit_certificate(&Certificate::Separator(balance)))
}

/// The decomposition certificate followed by a Graphviz drawing of the tree.
pub fn run_decompose(text: &str, k: usize) -> Result<String, String> {
    let g = graph(text)?;
    let bounds = Bounds::desk(k);
    let out = local_to_global(&g, k, &VSet::new(), &BruteOracle { cap: DEFAULT_CAP }, &bounds).map_err(|e| e.to_string())?;
    let (report, dot) = match &out {
        GlobalOutcome::RedGrid(m) => (m.verify(&g), String::new()),
        GlobalOutcome::Decomposition(d) => (check_global(&g, &VSet::new(), d, &bounds), tree_decomposition_dot(&d.td)),
    };
    let report = report.map_err(|e| e.to_string())?;
    if !report.is_valid() {
        return Err(format!("output failed its own check:\n{report}"));
    }
    Ok(format!("{}\n{dot}", emit_certificate(&Certificate::Decomposition(out))))
}

#[wasm_bindgen]
pub fn exact(text: &str, max_k: usize) -> Result<String, JsError> {
    run_exact(text, max_k).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn separator(text: &str, x: &str, k: usize) -> Result<String, JsError> {
    run_separator(text, x, k).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn decompose(text: &str, k: usize) -> Result<String, JsError> {
    run_decompose(text, k).map_err(|e| JsError::new(&e))
}
