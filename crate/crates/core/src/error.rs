use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("arc length {s} out of range [0, {length}] on lane `{lane}`")]
    Range { lane: String, s: f64, length: f64 },

    #[error("off-network point ({x:.3}, {y:.3}): nearest lane is {distance:.3} m away (tolerance {tolerance} m)")]
    OffNetwork {
        x: f64,
        y: f64,
        distance: f64,
        tolerance: f64,
    },

    #[error("road network has no lanes")]
    EmptyNetwork,

    #[error("validation error: {0}")]
    Validation(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("sensor fusion failed: only {:.1}% of records project onto the network (need {:.1}%)", coverage * 100.0, required * 100.0)]
    Fusion { coverage: f64, required: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("integration produced a non-finite value at {0}")]
    Integration(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("simulation aborted at step {step}: vehicle `{vehicle}` has a non-finite state")]
    NonFinite { vehicle: String, step: u64 },

    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for problems with the caller's input rather than with a run.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Range { .. }
                | Error::EmptyNetwork
                | Error::Validation(_)
                | Error::Parse { .. }
                | Error::Domain(_)
                | Error::Config(_)
                | Error::Json { .. }
                | Error::Csv(_)
        )
    }

    pub(crate) fn json(context: impl Into<String>, source: serde_json::Error) -> Self {
        Error::Json {
            context: context.into(),
            source,
        }
    }
}
