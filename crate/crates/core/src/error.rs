use thiserror::Error;

/// Errors raised while building, validating or solving a tau problem.
#[derive(Debug, Error)]
pub enum TauError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// The problem document does not follow the schema. `path` locates the
    /// offending value (a JSON path, or a line/column for syntax errors).
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },

    #[error("invalid problem: {0}")]
    Validation(String),

    #[error(
        "n = {n} is too small: the tau method needs n >= nu + lambda = {required} \
         (nu = {nu} conditions, lambda = {lambda} right-hand side degree)"
    )]
    DegreeTooSmall {
        n: usize,
        required: usize,
        nu: usize,
        lambda: usize,
    },

    #[error("numerically singular system at {block}{}", iteration_suffix(*.iteration))]
    Singular {
        block: String,
        iteration: Option<usize>,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn iteration_suffix(iteration: Option<usize>) -> String {
    match iteration {
        Some(k) => format!(" (Newton iteration {k})"),
        None => String::new(),
    }
}

pub type Result<T> = std::result::Result<T, TauError>;

impl TauError {
    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        TauError::Schema {
            path: path.into(),
            message: message.into(),
        }
    }
}
