//! JSON problem file.
//!
//! ```text
//! {
//!   "format": "pdcontact-problem", "version": 1,
//!   "d": .., "c": .., "m": .., "mu": ..,
//!   "g": [..], "p": [..],
//!   "K":  {"nrows": .., "ncols": .., "row": [..], "col": [..], "val": [..]},
//!   "Tn": {..}, "Tt": {..},
//!   "meta": {..}            (optional, free-form generator description)
//! }
//! ```
//!
//! Matrices are stored as 0-based triplets in row-major (CSR) order. Every
//! real is written with 17 significant digits.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;
use crate::numfmt;

use super::contact::ContactGeometry;
use super::problem::ProblemInstance;

pub const PROBLEM_FORMAT: &str = "pdcontact-problem";
pub const PROBLEM_VERSION: u32 = 1;

/// Sparse matrix as CSR-ordered triplets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripletDump {
    pub nrows: usize,
    pub ncols: usize,
    pub row: Vec<usize>,
    pub col: Vec<usize>,
    pub val: Vec<f64>,
}

impl From<&SparseMatrix> for TripletDump {
    fn from(a: &SparseMatrix) -> Self {
        let (mut row, mut col, mut val) = (Vec::new(), Vec::new(), Vec::new());
        for (i, j, v) in a.triplets() {
            row.push(i);
            col.push(j);
            val.push(v);
        }
        TripletDump {
            nrows: a.nrows(),
            ncols: a.ncols(),
            row,
            col,
            val,
        }
    }
}

impl TripletDump {
    pub fn to_matrix(&self, name: &str) -> Result<SparseMatrix> {
        if self.row.len() != self.val.len() || self.col.len() != self.val.len() {
            return Err(Error::InvalidProblem(format!("{name}: row/col/val lengths differ")));
        }
        if self.nrows > crate::linalg::mm::MAX_DIM || self.ncols > crate::linalg::mm::MAX_DIM {
            return Err(Error::InvalidProblem(format!("{name}: dimensions too large")));
        }
        let triplets: Vec<_> = self
            .row
            .iter()
            .zip(&self.col)
            .zip(&self.val)
            .map(|((&i, &j), &v)| (i, j, v))
            .collect();
        let a = SparseMatrix::from_triplets(self.nrows, self.ncols, &triplets)
            .map_err(|e| Error::InvalidProblem(format!("{name}: {e}")))?;
        if a.nnz() != triplets.len() {
            return Err(Error::InvalidProblem(format!("{name}: duplicate entries")));
        }
        Ok(a)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub format: String,
    pub version: u32,
    pub d: usize,
    pub c: usize,
    pub m: usize,
    pub mu: f64,
    pub g: Vec<f64>,
    pub p: Vec<f64>,
    #[serde(rename = "K")]
    pub k: TripletDump,
    #[serde(rename = "Tn")]
    pub tn: TripletDump,
    #[serde(rename = "Tt")]
    pub tt: TripletDump,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<serde_json::Value>,
}

impl ProblemFile {
    pub fn from_problem(problem: &ProblemInstance, meta: Option<serde_json::Value>) -> Self {
        let contact = problem.contact();
        ProblemFile {
            format: PROBLEM_FORMAT.into(),
            version: PROBLEM_VERSION,
            d: problem.d(),
            c: problem.c(),
            m: problem.m(),
            mu: problem.mu(),
            g: contact.g().to_vec(),
            p: problem.p().to_vec(),
            k: problem.k().into(),
            tn: contact.tn().into(),
            tt: contact.tt().into(),
            meta,
        }
    }

    pub fn to_problem(&self) -> Result<ProblemInstance> {
        if self.format != PROBLEM_FORMAT {
            return Err(Error::InvalidProblem(format!(
                "unexpected format tag `{}`",
                self.format
            )));
        }
        if self.version != PROBLEM_VERSION {
            return Err(Error::InvalidProblem(format!(
                "unsupported problem file version {}",
                self.version
            )));
        }
        let k = self.k.to_matrix("K")?;
        let tn = self.tn.to_matrix("Tn")?;
        let tt = self.tt.to_matrix("Tt")?;
        if k.nrows() != self.d || tn.ncols() != self.c || self.g.len() != self.c {
            return Err(Error::InvalidProblem(format!(
                "declared d = {}, c = {} disagree with the stored data",
                self.d, self.c
            )));
        }
        let contact = ContactGeometry::new(self.m, tn, tt, self.g.clone())?;
        ProblemInstance::new(k, self.p.clone(), contact, self.mu)
    }
}

pub fn parse_problem(bytes: &[u8]) -> Result<ProblemInstance> {
    let file: ProblemFile = serde_json::from_slice(bytes)?;
    file.to_problem()
}

pub fn read_problem(path: impl AsRef<Path>) -> Result<(ProblemInstance, Option<serde_json::Value>)> {
    let file: ProblemFile = serde_json::from_slice(&fs::read(path)?)?;
    let problem = file.to_problem()?;
    Ok((problem, file.meta))
}

pub fn problem_to_bytes(problem: &ProblemInstance, meta: Option<serde_json::Value>) -> Result<Vec<u8>> {
    numfmt::to_vec(&ProblemFile::from_problem(problem, meta))
}

pub fn write_problem(problem: &ProblemInstance, meta: Option<serde_json::Value>, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, problem_to_bytes(problem, meta)?)?;
    Ok(())
}
