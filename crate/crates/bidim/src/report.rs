use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Kind {
    // minor models
    Overlap,
    Disconnected,
    EmptyBranch,
    MissingEdge,
    RedMiss,
    PatternMismatch,
    // meshes and walls
    PathShape,
    Crossing,
    CrossingOrder,
    Endpoint,
    Signature,
    Closure,
    // renditions
    R1,
    R2,
    R3,
    R4,
    NodeCount,
    NotInjective,
    Rotation,
    Realizability,
    Boundary,
    TieBreaker,
    // nest trees
    T1,
    T2,
    T3,
    T4,
    T5,
    T6,
    NestOrder,
    ZConsistency,
    // decompositions and embeddings
    NotATree,
    VertexCover,
    EdgeCover,
    Interval,
    BoundaryBag,
    ApexBound,
    VortexCount,
    VortexBoundary,
    Width,
    CyclicOrder,
    Embedding,
    RedCondition,
    LeafCondition,
    Adhesion,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: Kind,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {}", self.kind, self.detail)
    }
}

/// Every violated condition found by a validator, in discovery order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub violations: Vec<Violation>,
}

impl ValidityReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, kind: Kind, detail: impl Into<String>) {
        self.violations.push(Violation { kind, detail: detail.into() });
    }

    pub fn merge(&mut self, other: ValidityReport) {
        self.violations.extend(other.violations);
    }

    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: Kind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    pub fn kinds(&self) -> Vec<Kind> {
        let mut k: Vec<Kind> = self.violations.iter().map(|v| v.kind).collect();
        k.sort();
        k.dedup();
        k
    }
}

impl fmt::Display for ValidityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}
