//! Toolkit for annotated ("red-vertex") graphs.
//!
//! The crate covers exact red grid minors at small scale, meshes and walls,
//! combinatorial disk renditions with societies and transactions, the
//! red/blank homogenization routines, nest trees, and tree decompositions
//! whose torsos are checked against near-embedding data.

pub mod decompose;
pub mod error;
pub mod flow;
pub mod format;
pub mod graph;
pub mod grids;
pub mod homogenize;
pub mod model;
pub mod nesttree;
pub mod oracle;
pub mod rendition;
pub mod report;

pub use error::{Error, Result};
pub use graph::{AnnotatedGraph, Separation, SideTag, Vertex};
pub use model::{MinorModel, RedMinorModel};
pub use report::{ValidityReport, Violation};
