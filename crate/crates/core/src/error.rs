use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("input contains no edges")]
    EmptyInput,

    #[error("node {node} has zero degree in the operator graph")]
    IsolatedNode { node: usize },

    #[error("mixing parameter {0} is outside [0, 1]")]
    LambdaOutOfRange(f64),

    #[error("{0}")]
    Domain(String),

    #[error(
        "graph has {components} connected components under the chosen operator; \
         cluster each component separately"
    )]
    Disconnected { components: usize },

    #[error("criterion {criterion} is undefined for a set of {set_size} nodes (zero denominator)")]
    UndefinedCriterion { criterion: String, set_size: usize },

    #[error("eigensolver did not converge after {iterations} iterations (best residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("unknown node id {0}")]
    UnknownNode(u64),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag, used in error records emitted by the CLI.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::EmptyInput => "empty_input",
            Error::IsolatedNode { .. } => "isolated_node",
            Error::LambdaOutOfRange(_) => "lambda_out_of_range",
            Error::Domain(_) => "domain",
            Error::Disconnected { .. } => "disconnected",
            Error::UndefinedCriterion { .. } => "undefined_criterion",
            Error::NoConvergence { .. } => "no_convergence",
            Error::UnknownNode(_) => "unknown_node",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if (0.0..=1.0).contains(&lambda) {
        Ok(())
    } else {
        Err(Error::LambdaOutOfRange(lambda))
    }
}
