use anyhow::Context;
use bidim::decompose::{
    balanced_separator, check_global, local_to_global, validate_tree_decomposition, Bounds, BruteOracle,
    GlobalOutcome, LocalOracle, RejectingOracle,
};
use bidim::format::{
    emit_certificate, parse_annotated_graph, parse_certificate, tree_decomposition_dot, Certificate, ParseError,
};
use bidim::graph::{VSet, Vertex};
use bidim::grids::Mesh;
use bidim::homogenize::{fully_red_mesh, homogenize_flat_mesh, is_red_mesh, red_grid_from_red_mesh};
use bidim::model::verify_red_minor_model;
use bidim::oracle::{bidimensionality_witness, DEFAULT_CAP};
use bidim::rendition::Rendition;
use bidim::{AnnotatedGraph, Error, RedMinorModel, ValidityReport};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const USAGE: u8 = 1;
const INVALID: u8 = 2;
const CAP: u8 = 3;
const ORACLE: u8 = 4;

#[derive(Parser)]
#[command(name = "bidim", version, about = "Red grid minors, meshes and decompositions of annotated graphs")]
struct Cli {
    /// Vertex cap for brute-force routines.
    #[arg(long, global = true, env = "BIDIM_CAP", default_value_t = DEFAULT_CAP)]
    cap: usize,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleKind {
    Brute,
    Stub,
}

#[derive(Subcommand)]
enum Command {
    /// Exact bidimensionality; one graph prints the value and its witness model.
    Exact {
        #[arg(required = true)]
        graphs: Vec<PathBuf>,
        #[arg(long, default_value_t = 3)]
        max_k: usize,
    },
    /// Verify a red minor model against a graph.
    CheckModel { graph: PathBuf, model: PathBuf },
    /// Verify a tree decomposition, or with `--near-embedding` a full decomposition outcome.
    CheckTd {
        graph: PathBuf,
        td: PathBuf,
        #[arg(long)]
        near_embedding: bool,
        /// Vertices required in the root bag.
        #[arg(long, value_delimiter = ',')]
        x: Vec<Vertex>,
        #[arg(long, default_value_t = 2)]
        k: usize,
    },
    /// Balanced separator of `x`, or a certificate that `x` is linked.
    Separator {
        graph: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        x: Vec<Vertex>,
        #[arg(long)]
        k: usize,
    },
    /// Homogeneous r-submesh of a flat mesh.
    HomogenizeMesh {
        graph: PathBuf,
        rendition: PathBuf,
        mesh: PathBuf,
        #[arg(long)]
        r: usize,
    },
    /// All-red k × k grid model routed through a red mesh.
    RedGrid {
        graph: PathBuf,
        rendition: PathBuf,
        mesh: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Red grid or rooted decomposition with near-embedded torsos.
    Decompose {
        graph: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value = "brute")]
        oracle: OracleKind,
        /// Vertices required in the root bag.
        #[arg(long, value_delimiter = ',')]
        x: Vec<Vertex>,
        /// Write the decomposition tree as Graphviz.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
}

/// An error with the exit code it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        let error = e.into();
        let code = if let Some(e) = error.downcast_ref::<Error>() {
            match e {
                Error::CapExceeded { .. } => CAP,
                Error::OracleFailure(_) => ORACLE,
                Error::ParameterRange(_) => USAGE,
                _ => INVALID,
            }
        } else if error.downcast_ref::<ParseError>().is_some() {
            INVALID
        } else {
            USAGE
        };
        Self { code, error }
    }
}

type Outcome = Result<u8, Failure>;

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_graph(path: &Path) -> Result<AnnotatedGraph, Failure> {
    let text = read(path)?;
    parse_annotated_graph(&text).map_err(|e| Failure { code: INVALID, error: anyhow::Error::new(e).context(path.display().to_string()) })
}

fn load(path: &Path) -> Result<Certificate, Failure> {
    let text = read(path)?;
    parse_certificate(&text).map_err(|e| Failure { code: INVALID, error: anyhow::Error::new(e).context(path.display().to_string()) })
}

fn wrong_kind(path: &Path, want: &str, got: &Certificate) -> Failure {
    Failure { code: INVALID, error: anyhow::anyhow!("{}: expected a {want} certificate, found {}", path.display(), got.kind()) }
}

fn load_model(path: &Path) -> Result<RedMinorModel, Failure> {
    match load(path)? {
        Certificate::RedMinorModel(m) => Ok(m),
        Certificate::MinorModel(m) => Ok(RedMinorModel::all_red(m)),
        Certificate::Bidimensionality { witness: Some(m), .. } => Ok(m),
        c => Err(wrong_kind(path, "red-minor-model", &c)),
    }
}

fn load_rendition(path: &Path) -> Result<Rendition, Failure> {
    match load(path)? {
        Certificate::Rendition(r) => Ok(r),
        c => Err(wrong_kind(path, "rendition", &c)),
    }
}

fn load_mesh(path: &Path) -> Result<Mesh, Failure> {
    match load(path)? {
        Certificate::Mesh(m) => Ok(m),
        c => Err(wrong_kind(path, "mesh", &c)),
    }
}

fn verdict(report: &ValidityReport) -> u8 {
    if report.is_valid() {
        println!("valid");
        0
    } else {
        println!("invalid\n{report}");
        INVALID
    }
}

fn exact(graphs: &[PathBuf], max_k: usize, cap: usize) -> Outcome {
    let loaded = graphs.iter().map(|p| load_graph(p)).collect::<Result<Vec<_>, _>>()?;
    let results = loaded
        .par_iter()
        .map(|g| bidimensionality_witness(g, max_k, cap))
        .collect::<Result<Vec<_>, _>>()?;
    if let [(value, witness)] = &results[..] {
        println!("{value}");
        if let Some(m) = witness {
            print!("{}", emit_certificate(&Certificate::RedMinorModel(m.clone())));
        }
    } else {
        for (path, (value, _)) in graphs.iter().zip(&results) {
            println!("{}\t{value}", path.display());
        }
    }
    Ok(0)
}

fn check_td(graph: &Path, td_path: &Path, near: bool, x: &[Vertex], k: usize) -> Outcome {
    let g = load_graph(graph)?;
    let outcome = match load(td_path)? {
        Certificate::TreeDecomposition(td) if !near => return Ok(verdict(&validate_tree_decomposition(&g, &td))),
        Certificate::Decomposition(out) => out,
        c if near => return Err(wrong_kind(td_path, "decomposition", &c)),
        c => return Err(wrong_kind(td_path, "tree-decomposition", &c)),
    };
    match outcome {
        GlobalOutcome::RedGrid(m) => Ok(verdict(&verify_red_minor_model(&g, &m)?)),
        GlobalOutcome::Decomposition(d) if near => {
            let x: VSet = x.iter().copied().collect();
            Ok(verdict(&check_global(&g, &x, &d, &Bounds::desk(k))?))
        }
        GlobalOutcome::Decomposition(d) => Ok(verdict(&validate_tree_decomposition(&g, &d.td))),
    }
}

fn red_grid(graph: &Path, rendition: &Path, mesh: &Path, k: usize) -> Outcome {
    if k < 2 {
        return Err(Error::ParameterRange(format!("k = {k} is below 2")).into());
    }
    let g = load_graph(graph)?;
    let rho = load_rendition(rendition)?;
    let mesh = load_mesh(mesh)?;
    let red = if is_red_mesh(&g, &rho, &mesh)? { mesh } else { fully_red_mesh(&g, &rho, &mesh)? };
    let side: Vec<usize> = (1..=3 * k - 1).collect();
    let model = red_grid_from_red_mesh(&g, &rho, &red.submesh(&side, &side)?)?;
    let report = model.verify(&g)?;
    if !report.is_valid() {
        return Err(Error::InvalidModel(report.to_string()).into());
    }
    print!("{}", emit_certificate(&Certificate::RedMinorModel(model)));
    Ok(0)
}

fn decompose(graph: &Path, k: usize, oracle: OracleKind, x: &[Vertex], dot: Option<&Path>, cap: usize) -> Outcome {
    let g = load_graph(graph)?;
    let x: VSet = x.iter().copied().collect();
    let bounds = Bounds::desk(k);
    let brute = BruteOracle { cap };
    let oracle: &dyn LocalOracle = match oracle {
        OracleKind::Brute => &brute,
        OracleKind::Stub => &RejectingOracle,
    };
    let out = local_to_global(&g, k, &x, oracle, &bounds)?;
    let report = match &out {
        GlobalOutcome::RedGrid(m) => m.verify(&g)?,
        GlobalOutcome::Decomposition(d) => check_global(&g, &x, d, &bounds)?,
    };
    if !report.is_valid() {
        return Err(Error::InvalidModel(report.to_string()).into());
    }
    if let (Some(path), GlobalOutcome::Decomposition(d)) = (dot, &out) {
        std::fs::write(path, tree_decomposition_dot(&d.td)).with_context(|| format!("writing {}", path.display()))?;
    }
    print!("{}", emit_certificate(&Certificate::Decomposition(out)));
    Ok(0)
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Exact { graphs, max_k } => exact(&graphs, max_k, cli.cap),
        Command::CheckModel { graph, model } => {
            let g = load_graph(&graph)?;
            Ok(verdict(&verify_red_minor_model(&g, &load_model(&model)?)?))
        }
        Command::CheckTd { graph, td, near_embedding, x, k } => check_td(&graph, &td, near_embedding, &x, k),
        Command::Separator { graph, x, k } => {
            let g = load_graph(&graph)?;
            let balance = balanced_separator(&g, &x.into_iter().collect(), k)?;
            print!("{}", emit_certificate(&Certificate::Separator(balance)));
            Ok(0)
        }
        Command::HomogenizeMesh { graph, rendition, mesh, r } => {
            let g = load_graph(&graph)?;
            let out = homogenize_flat_mesh(&g, &load_rendition(&rendition)?, &load_mesh(&mesh)?, r)?;
            print!("{}", emit_certificate(&Certificate::Homogenization(out)));
            Ok(0)
        }
        Command::RedGrid { graph, rendition, mesh, k } => red_grid(&graph, &rendition, &mesh, k),
        Command::Decompose { graph, k, oracle, x, dot } => decompose(&graph, k, oracle, &x, dot.as_deref(), cli.cap),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { 0 });
        }
    };
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
        eprintln!("error: {e}");
        return ExitCode::from(USAGE);
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure { code, error }) => {
            eprintln!("error: {error:#}");
            ExitCode::from(code)
        }
    }
}
