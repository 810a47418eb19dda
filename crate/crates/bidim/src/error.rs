use crate::graph::Vertex;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown vertex {0}")]
    UnknownVertex(Vertex),
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("parameter out of range: {0}")]
    ParameterRange(String),
    #[error("separation order {order} is not below {bound}")]
    OrderTooLarge { order: usize, bound: usize },
    #[error("order {have} is below the required {need}")]
    OrderTooSmall { have: usize, need: usize },
    #[error("order {have} does not factor as {q}x{p}")]
    OrderMismatch { have: usize, q: usize, p: usize },
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("not grounded: {0}")]
    NotGrounded(String),
    #[error("transaction is not monotone")]
    NotMonotone,
    #[error("not a transaction: {0}")]
    NotATransaction(String),
    #[error("not flat: {0}")]
    NotFlat(String),
    #[error("brick ({0}, {1}) of the middle row holds no red vertex")]
    PreconditionRedMiss(usize, usize),
    #[error("not red: {0}")]
    NotRed(String),
    #[error("not exposed: {0}")]
    NotExposed(String),
    #[error("not orthogonal: {0}")]
    NotOrthogonal(String),
    #[error("vortex segment {0} has no red witness")]
    MissingRedWitness(usize),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("oracle failure: {0}")]
    OracleFailure(String),
    #[error("graph has {n} vertices, above the cap {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("|X| = {size} exceeds 3k+1 = {bound}")]
    SizeBound { size: usize, bound: usize },
    #[error("society depth {depth} exceeds {k}")]
    DepthExceeded { depth: usize, k: usize },
    #[error("unknown decomposition node {0}")]
    UnknownNode(usize),
    #[error("no construction found: {0}")]
    Unresolved(String),
}
