use thiserror::Error;

/// Errors raised by mesh construction, discretization and solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate element {element}: {reason}")]
    DegenerateElement { element: usize, reason: String },

    #[error("degenerate cut cell {element}: area {area:e} below {threshold:e}")]
    DegenerateCut {
        element: usize,
        area: f64,
        threshold: f64,
    },

    #[error("topology error: {0}")]
    Topology(String),

    #[error(
        "local system ill-conditioned on element {element} (condition estimate {condition:e})"
    )]
    IllConditioned { element: usize, condition: f64 },

    #[error("linear solve failed: {reason} (relative residual {residual:e})")]
    SolveFailure { reason: String, residual: f64 },

    #[error("explicit time stepping became unstable at step {step}: max |J| = {max_jump:e}")]
    Instability { step: usize, max_jump: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
