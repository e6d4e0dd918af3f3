use std::path::PathBuf;

use thiserror::Error;

/// Position of a token inside a netlist, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub line: usize,
    pub column: usize,
}

impl std::fmt::Display for Span {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Error)]
pub enum MorError {
    #[error("syntax error at {span}: {message}")]
    Syntax { span: Span, message: String },

    #[error("duplicate element name '{name}' at {span}")]
    DuplicateElement { name: String, span: Span },

    #[error("coupling '{coupling}' at {span} references undeclared inductor '{inductor}'")]
    UndeclaredInductor {
        coupling: String,
        inductor: String,
        span: Span,
    },

    #[error("invalid value for '{name}' at {span}: {message}")]
    InvalidValue {
        name: String,
        span: Span,
        message: String,
    },

    #[error("node capacitance matrix is singular; nodes without a capacitive path to ground: {nodes:?}")]
    SingularCapacitance { nodes: Vec<String> },

    #[error("branch inductance matrix is not positive definite: {0}")]
    InductanceNotPositiveDefinite(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix {name} is not symmetric (max asymmetry {asymmetry:e}, allowed {allowed:e})")]
    NotSymmetric {
        name: String,
        asymmetry: f64,
        allowed: f64,
    },

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("format error in {path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("matrix {name} is numerically singular (pivot {pivot:e} at step {step})")]
    Singular {
        name: String,
        step: usize,
        pivot: f64,
    },

    #[error("matrix {name} is not positive definite (step {step})")]
    NotPositiveDefinite { name: String, step: usize },

    #[error("unstable: {0}")]
    Unstable(String),

    #[error("projected matrix unstable at iteration {iteration}: {detail}")]
    ProjectedUnstable { iteration: usize, detail: String },

    #[error("Schur decomposition did not converge for a {0}x{0} matrix")]
    SchurNonConvergence(usize),

    #[error("dense computation refused: N = {n} exceeds cap {cap}")]
    DenseCapExceeded { n: usize, cap: usize },

    #[error("right-hand side block is numerically zero (no excitation)")]
    NoExcitation,

    #[error("singular pencil at omega = {omega:e} rad/s")]
    SingularPencil { omega: f64 },

    #[error("frequency grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = MorError> = std::result::Result<T, E>;

impl MorError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        MorError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        MorError::Format {
            path: path.into(),
            message: message.into(),
        }
    }

    /// True for failures caused by the numerical properties of the model
    /// (instability, singular factors, non-convergence) rather than its text.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            MorError::Singular { .. }
                | MorError::NotPositiveDefinite { .. }
                | MorError::Unstable(_)
                | MorError::ProjectedUnstable { .. }
                | MorError::SchurNonConvergence(_)
                | MorError::DenseCapExceeded { .. }
                | MorError::NoExcitation
                | MorError::SingularPencil { .. }
        )
    }
}
