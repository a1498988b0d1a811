//! Error type shared across the crate.

use std::fmt;

/// Errors produced by transforms, series evaluation, quadrature and solvers.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Input outside a function's domain (e.g. non-positive kernel order).
    Domain(String),
    /// A series or iterative process hit its term/level cap before meeting
    /// the requested tolerance.
    NonConvergence(String),
    /// The requested Laplace integral is provably divergent at the point
    /// (envelope abscissa violated on some axis).
    Divergence { axis: usize, detail: String },
    /// Invalid configuration (non-positive truncation, bad node counts, ...).
    Configuration(String),
    /// Adaptive quadrature exhausted its refinement budget.
    Quadrature(String),
    /// A resolvent pencil was singular (or numerically rank-deficient) at a point.
    SingularPencil { detail: String },
    /// Sampled |F| exceeded the declared decay majorant by more than 10x.
    DecayViolation(String),
    /// A scale factor left the representable floating-point range.
    Overflow(String),
    /// Config/problem files: I/O failure.
    Io(String),
    /// Config/problem files: malformed or schema-violating content.
    Schema(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(s) => write!(f, "domain error: {s}"),
            Error::NonConvergence(s) => write!(f, "did not converge: {s}"),
            Error::Divergence { axis, detail } => {
                write!(f, "divergent Laplace integral on axis {axis}: {detail}")
            }
            Error::Configuration(s) => write!(f, "configuration error: {s}"),
            Error::Quadrature(s) => write!(f, "quadrature failure: {s}"),
            Error::SingularPencil { detail } => write!(f, "singular pencil: {detail}"),
            Error::DecayViolation(s) => write!(f, "decay bound violated: {s}"),
            Error::Overflow(s) => write!(f, "overflow: {s}"),
            Error::Io(s) => write!(f, "io error: {s}"),
            Error::Schema(s) => write!(f, "schema error: {s}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
