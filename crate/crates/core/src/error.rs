use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: String, reason: String },

    #[error("squeeze function evaluated outside its domain: r = {0}")]
    Domain(f64),

    #[error("singular denominator in {0}")]
    Singular(&'static str),

    #[error("equilibrium is not admissible (violated: {})", .0.join(", "))]
    Inadmissible(Vec<String>),

    #[error("eigen-solver did not converge at k = {k}")]
    EigenSolver { k: f64 },

    #[error("solution diverged at t = {t} (dt = {dt}) in field {field}")]
    Divergence { t: f64, dt: f64, field: String },

    #[error("record has {got} snapshots, at least {need} required")]
    TooFewSnapshots { got: usize, need: usize },

    #[error("sample grids do not match: {0}")]
    GridMismatch(String),

    #[error("{path}:{line}: {message}")]
    Config {
        path: String,
        line: usize,
        message: String,
    },

    #[error("{0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name: name.into(),
            reason: reason.into(),
        }
    }

    /// Short machine-readable tag, used by the command-line front end.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parameter { .. } => "parameter",
            Error::Domain(_) => "domain",
            Error::Singular(_) => "singular",
            Error::Inadmissible(_) => "inadmissible",
            Error::EigenSolver { .. } => "eigen_solver",
            Error::Divergence { .. } => "divergence",
            Error::TooFewSnapshots { .. } => "too_few_snapshots",
            Error::GridMismatch(_) => "grid_mismatch",
            Error::Config { .. } => "config",
            Error::Invalid(_) => "invalid",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
