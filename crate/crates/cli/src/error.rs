use std::path::PathBuf;

/// Errors raised by the harness layer: file IO, text formats, and
/// benchmark execution. Solver-side errors are wrapped with the case that
/// triggered them.
#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{origin}:{line}: {msg}")]
    Parse {
        origin: String,
        line: usize,
        msg: String,
    },

    #[error("{path}: sparsity pattern differs from {reference}: {detail}")]
    PatternMismatch {
        path: PathBuf,
        reference: PathBuf,
        detail: String,
    },

    #[error("{what}")]
    Usage { what: String },

    #[error("case {case}: {source}")]
    Solve {
        case: String,
        #[source]
        source: batchsolve_core::Error,
    },

    #[error(transparent)]
    Core(#[from] batchsolve_core::Error),
}

impl HarnessError {
    pub fn usage(what: impl Into<String>) -> Self {
        HarnessError::Usage { what: what.into() }
    }
}
