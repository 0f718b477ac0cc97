use thiserror::Error;

use crate::pdsolver::IterationRecord;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid sparse matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("candidate node {node} penetrates the obstacle (gap {gap:e})")]
    Penetration { node: usize, gap: f64 },

    #[error("conjugate gradient breakdown at iteration {iteration} (p'Ap = {curvature:e})")]
    Breakdown { iteration: usize, curvature: f64 },

    #[error("{what} did not converge within {maxit} iterations")]
    NotConverged { what: &'static str, maxit: usize },

    #[error("non-finite iterate at iteration {iteration}")]
    NonFinite {
        iteration: usize,
        history: Box<Vec<IterationRecord>>,
    },

    #[error("load step {step}: {source}")]
    LoadStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("oracle not applicable: {0}")]
    OracleIneligible(String),

    #[error("oracle accepted no state combination (tolerance {tol:e})")]
    OracleNoSolution { tol: f64 },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }
}
