//! Error types shared across the crate.

use thiserror::Error;

use crate::instance::ValidationReport;

/// Structural problems with instance data itself.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum InstanceError {
    #[error("non-finite coordinate at node {0}")]
    NonFiniteCoordinate(usize),
    #[error("unknown node index {0}")]
    UnknownNode(usize),
    #[error("unknown agent index {0}")]
    UnknownAgent(usize),
    #[error("inconsistent field lengths: {0}")]
    FieldLength(String),
    #[error("explicit travel matrix is {found}x{found}, expected {expected}x{expected}")]
    TravelShape { found: usize, expected: usize },
    #[error("transform id {0} out of range 0..8")]
    InvalidTransform(u8),
    #[error("coordinates outside the unit square at node {0}")]
    CoordsOutsideUnitSquare(usize),
}

/// Failures of the random instance generator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenerateError {
    /// INFEASIBLE_SPEC: the sample space admits no feasible time window
    /// for some drawn geometry.
    #[error(
        "infeasible spec: no admissible time window for node {node} after {attempts} attempts"
    )]
    InfeasibleSpec { node: usize, attempts: usize },
    #[error("invalid generation spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

/// Benchmark file parsing failures. Lines are 1-based.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    /// PARSE_ERROR: the input does not match the format grammar.
    #[error("parse error at line {line}: {message}")]
    Syntax { line: usize, message: String },
    /// VALIDATION_ERROR: grammatically valid but semantically broken data.
    #[error("validation error at line {line}: {message}")]
    Validation { line: usize, message: String },
}

impl ParseError {
    pub fn line(&self) -> usize {
        match self {
            ParseError::Syntax { line, .. } | ParseError::Validation { line, .. } => *line,
        }
    }
}

/// Native instance codec failures.
#[derive(Debug, Error)]
pub enum CodecError {
    #[error("decode error: {0}")]
    Decode(String),
    #[error("schema version {found} not supported (expected {expected})")]
    SchemaVersion { found: u64, expected: u64 },
    #[error("instance contains non-finite values; refusing to encode")]
    NonFinite,
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

/// Errors raised by the environment engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnvError {
    #[error("instance rejected by validation:\n{0}")]
    InvalidInstance(ValidationReport),
    /// MASK_VIOLATION: the engine never silently repairs an illegal action.
    #[error("action {action} violates the feasibility mask for agent {agent}")]
    MaskViolation { agent: usize, action: usize },
    #[error("action {0} is not a node of this instance")]
    UnknownAction(usize),
    #[error("episode is already done")]
    EpisodeDone,
    #[error("unknown observation feature `{name}` in family `{family}`")]
    UnknownFeature { family: &'static str, name: String },
    /// SIZE_MISMATCH: batches are homogeneous unless explicitly allowed.
    #[error("batch mixes instance sizes ({0} vs {1} nodes); set allow_mixed_sizes to permit")]
    SizeMismatch(usize, usize),
    #[error("batch mixes problem variants")]
    ProblemMismatch,
}

/// Errors raised by the exhaustive-search oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    /// ORACLE_TOO_LARGE: exhaustive enumeration is desk-scale only.
    #[error(
        "instance too large for exhaustive search: {services} services / {agents} agents \
         (limits {max_services}/{max_agents})"
    )]
    TooLarge {
        services: usize,
        agents: usize,
        max_services: usize,
        max_agents: usize,
    },
    #[error("search exceeded the depth limit of {0} steps")]
    DepthExceeded(usize),
    #[error("the oracle requires a deterministic selector (round_robin or smallest_time)")]
    RandomSelector,
    #[error(transparent)]
    Env(#[from] EnvError),
}

/// Errors in evaluation metrics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("reference score must be nonzero")]
    ZeroReference,
    #[error("cannot aggregate an empty batch")]
    EmptyBatch,
}
