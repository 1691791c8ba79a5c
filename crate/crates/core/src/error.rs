use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: weight {weight} outside [0, 1]")]
    WeightOutOfRange { line: usize, weight: f64 },

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),

    #[error("self-loop on node {0}")]
    SelfLoop(usize),

    #[error("node {node} out of range for graph with {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },

    #[error("empty source set")]
    EmptySources,

    #[error("invalid layered graph: {0}")]
    InvalidLayers(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("too large: {0}")]
    TooLarge(String),

    #[error("singular basis matrix (rank {rank} < {dim})")]
    SingularBasis { rank: usize, dim: usize },

    #[error("RR-set budget exceeded: {requested} requested, cap is {cap}")]
    BudgetExceeded { requested: u64, cap: u64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
