use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the domain of a physical formula.
    #[error("domain error: {0}")]
    Domain(String),
    /// A configuration that fails validation before any computation starts.
    #[error("configuration error: {0}")]
    Config(String),
    /// Misuse of an API or command-line surface.
    #[error("usage error: {0}")]
    Usage(String),
    /// Evaluation at (or numerically on top of) a pole or a singular decomposition.
    #[error("singularity: {0}")]
    Singular(String),
    /// A NaN or infinity appeared while marching; names the first bad cell.
    #[error("non-finite {quantity} at grid cell (iz = {iz}, it = {it}), z = {z:e}, t' = {t:e}")]
    NonFinite {
        quantity: &'static str,
        iz: usize,
        it: usize,
        z: f64,
        t: f64,
    },
    #[error("scenario '{scenario}': {source}")]
    Scenario {
        scenario: String,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// True for errors that stem from the input configuration rather than a failed run.
    pub fn is_config(&self) -> bool {
        match self {
            Error::Config(_) | Error::Usage(_) | Error::Domain(_) | Error::Json(_) => true,
            Error::Scenario { source, .. } => source.is_config(),
            _ => false,
        }
    }
}
