use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] tridac_core::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("subcriticality guard: a cluster spans the buffer in {:.2}% of samples at beta = {beta}", fraction * 100.0)]
    Subcritical { fraction: f64, beta: f64 },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code: 2 configuration, 3 oracle cap, 4 guard, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Core(tridac_core::Error::SizeExceeded { .. }) => 3,
            Error::Core(_) => 2,
            Error::Subcritical { .. } => 4,
            Error::Io { .. } | Error::Json(_) => 1,
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io { path: path.as_ref().display().to_string(), source }
    }
}
