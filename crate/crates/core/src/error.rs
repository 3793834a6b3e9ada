use thiserror::Error;

use crate::algebra::{JacobiViolation, Rational};

/// Errors raised while building algebras, generator systems and reports.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("unbound parameter `{0}`")]
    UnboundParameter(String),

    #[error("unknown parameter `{name}` for algebra `{algebra}`")]
    UnknownParameter { algebra: String, name: String },

    #[error("parameter `{param}` = {value} violates constraint: {constraint}")]
    ConstraintViolated {
        param: String,
        value: Rational,
        constraint: String,
    },

    #[error("Jacobi identity fails for {} triple(s), first at {}", .0.len(), .0[0])]
    Jacobi(Vec<JacobiViolation>),

    #[error("unknown algebra `{0}`")]
    UnknownAlgebra(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("level {level} out of range 1..={dim}")]
    LevelOutOfRange { level: usize, dim: usize },

    #[error("alias basis at level {0} is not invertible")]
    SingularAlias(usize),

    #[error("malformed expected table: {0}")]
    MalformedExpected(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
