use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed graph, duplicate or conflicting edges, unknown vertex names.
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    /// The input is not a valid essential graph (chain-graph or chordality check failed).
    #[error("invalid essential graph: {0}")]
    InvalidEssentialGraph(String),

    /// Orientation propagation produced contradictory orientations, or a DAG
    /// is not a member of the class it was checked against.
    #[error("inconsistent orientation: {0}")]
    Inconsistent(String),

    #[error("not an undirected connected chordal component: {0}")]
    NotUceg(String),

    #[error("invalid hypothesis graph: {0}")]
    InvalidHypothesis(String),

    #[error("invalid target set: {0}")]
    InvalidTargets(String),

    #[error("budget {k} out of range (at most {max})")]
    Budget { k: usize, max: usize },

    #[error("incompatible request: {0}")]
    Incompatible(String),

    #[error("{what} exceeds the configured cap of {cap}")]
    CapExceeded { what: String, cap: u64 },

    #[error("sampler gave up: {0}")]
    SamplerExhausted(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
