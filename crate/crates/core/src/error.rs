use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("hierarchy has no edges")]
    EmptyHierarchy,
    #[error("multiple roots: {0:?}")]
    MultipleRoots(Vec<String>),
    #[error("cycle detected through: {0:?}")]
    CycleDetected(Vec<String>),
    #[error("node `{0}` appears as a child more than once")]
    DuplicateChildEdge(String),
    #[error("nodes not connected to the root: {0:?}")]
    DisconnectedNode(Vec<String>),
    #[error("node `{0}` is not an internal node")]
    NotInternal(String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("invalid node id {0}")]
    InvalidNodeId(usize),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid probability vector: {0}")]
    InvalidDistribution(String),
    #[error("prediction does not match the candidate space: {0}")]
    SpaceMismatch(String),
    #[error("metric is not hierarchically reasonable (witness node {node}, leaf {leaf})")]
    NotReasonable { node: usize, leaf: usize },
    #[error("invalid threshold tau = {0} (must be >= 1/2)")]
    InvalidTau(f64),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("hierarchy too large for exhaustive enumeration ({nodes} nodes > {limit})")]
    TooLarge { nodes: usize, limit: usize },
    #[error("format error at line {line}: {msg}")]
    FormatError { line: usize, msg: String },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("dataset has no labels")]
    MissingLabels,
    #[error("dirichlet alpha must be > 0, got {0}")]
    InvalidAlpha(f64),
    #[error("smoothing lambda must lie in [0, 1], got {0}")]
    InvalidLambda(f64),
    #[error("agreement maps need exactly 3 leaves, hierarchy has {0}")]
    WrongLeafCount(usize),
    #[error("unknown metric `{0}`")]
    UnknownMetric(String),
    #[error("unknown decoder `{0}`")]
    UnknownDecoder(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn read_file(path: &std::path::Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub(crate) fn read_text(path: &std::path::Path) -> Result<String> {
    String::from_utf8(read_file(path)?).map_err(|_| Error::Io(format!("{}: not valid UTF-8", path.display())))
}
