use thiserror::Error;

/// Errors raised by the geometry, placement and construction routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("singular pole gap at vertex {index}: |t cosh e - cosh e'| = {gap:e}")]
    Singular { index: usize, gap: f64 },
    #[error("infeasible at t = {t}: {what}")]
    Infeasible { t: f64, what: String },
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("symmetry violation: {0}")]
    SymmetryViolation(String),
    #[error("no intersection: {0}")]
    NoIntersection(String),
    #[error("size error: {0}")]
    Size(String),
    #[error("no feasible t in [{lo}, {hi}]")]
    NoFeasibleInterval { lo: f64, hi: f64 },
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
