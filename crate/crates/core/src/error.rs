use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("line {line}: negative weight {weight}")]
    NegativeWeight { line: usize, weight: f64 },

    #[error("duplicate edge between '{u}' and '{v}'")]
    DuplicateEdge { u: String, v: String },

    #[error("node index {node} out of range for graph with {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },

    #[error("{0}")]
    Domain(String),

    #[error(
        "subset of size {size} is infeasible for criterion on {n} nodes (need 1 <= |S| <= n-1)"
    )]
    InfeasibleSubset { size: usize, n: usize },

    #[error("switching node {node} would violate the minimum side size {min_side}")]
    InfeasibleMove { node: usize, min_side: usize },

    #[error("score undefined: {0}")]
    UndefinedScore(String),

    #[error("power iteration did not converge after {iterations} iterations")]
    Convergence {
        iterations: usize,
        /// Last iterate, converted to f64 for reporting.
        last_iterate: Vec<f64>,
    },

    #[error("active node set of size {size} is too small to extract from (need at least 2)")]
    TooSmall { size: usize },

    #[error("labelings have mismatched lengths ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("population criterion is singular on the line t1 + t2 = 1")]
    SingularPoint,

    #[error("degenerate parameters: {0}")]
    Degenerate(String),

    #[error("invalid scenario: {0}")]
    Scenario(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors caused by malformed input rather than by computation.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::NegativeWeight { .. }
                | Error::DuplicateEdge { .. }
                | Error::NodeOutOfRange { .. }
                | Error::Domain(_)
                | Error::LengthMismatch { .. }
                | Error::Scenario(_)
                | Error::Io(_)
        )
    }
}
