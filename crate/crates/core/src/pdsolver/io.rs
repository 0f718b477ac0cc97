//! Convergence-history CSV and the JSON solution file.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::ProblemInstance;
use crate::linalg::SpectralEstimates;
use crate::numfmt;
use crate::verify::ResidualReport;

use super::{IterationRecord, Residuals, Solution};

/// Column order of the history CSV.
pub const HISTORY_COLUMNS: [&str; 9] = [
    "k",
    "step_norm",
    "alpha",
    "beta",
    "theta",
    "pcg_iters",
    "resid_eq",
    "resid_compl",
    "resid_pen",
];
pub const HISTORY_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct HistoryRow {
    k: usize,
    step_norm: f64,
    alpha: f64,
    beta: f64,
    theta: f64,
    pcg_iters: usize,
    resid_eq: Option<f64>,
    resid_compl: Option<f64>,
    resid_pen: Option<f64>,
}

/// Writes one row per iteration; residual cells stay empty unless the run
/// recorded them.
pub fn write_history_csv(history: &[IterationRecord], out: impl Write) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(HISTORY_COLUMNS)?;
    for h in history {
        let res = h.residuals;
        w.serialize(HistoryRow {
            k: h.k,
            step_norm: h.step_norm,
            alpha: h.alpha,
            beta: h.beta,
            theta: h.theta,
            pcg_iters: h.pcg_iters,
            resid_eq: res.map(|r| r.eq),
            resid_compl: res.map(|r| r.compl),
            resid_pen: res.map(|r| r.pen),
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a history CSV back. Fields the CSV does not hold (`pcg_converged`,
/// `dual_in_cone`) read as `true`.
pub fn read_history_csv(input: impl Read) -> Result<Vec<IterationRecord>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers()?.clone();
    if header.iter().ne(HISTORY_COLUMNS) {
        return Err(Error::Parse {
            line: 1,
            msg: format!("unexpected history header {:?}", header.iter().collect::<Vec<_>>()),
        });
    }
    let mut out = Vec::new();
    for row in rdr.deserialize::<HistoryRow>() {
        let row = row?;
        let residuals = match (row.resid_eq, row.resid_compl, row.resid_pen) {
            (Some(eq), Some(compl), Some(pen)) => Some(Residuals { eq, compl, pen }),
            (None, None, None) => None,
            _ => {
                return Err(Error::Parse {
                    line: out.len() + 2,
                    msg: "residual columns must be all present or all empty".into(),
                })
            }
        };
        out.push(IterationRecord {
            k: row.k,
            step_norm: row.step_norm,
            alpha: row.alpha,
            beta: row.beta,
            theta: row.theta,
            pcg_iters: row.pcg_iters,
            pcg_converged: true,
            dual_in_cone: true,
            residuals,
        });
    }
    Ok(out)
}

pub const SOLUTION_FORMAT: &str = "pdcontact-solution";
pub const SOLUTION_VERSION: u32 = 1;

/// JSON solution file: `Δu`, node-blockwise `r`, run status and the residual
/// report of the final iterate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionFile {
    pub format: String,
    pub version: u32,
    pub d: usize,
    pub c: usize,
    pub m: usize,
    pub converged: bool,
    pub iterations: usize,
    pub du: Vec<f64>,
    pub r: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectral: Option<SpectralEstimates>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<ResidualReport>,
}

impl SolutionFile {
    pub fn new(problem: &ProblemInstance, sol: &Solution, report: Option<ResidualReport>) -> Self {
        SolutionFile {
            format: SOLUTION_FORMAT.into(),
            version: SOLUTION_VERSION,
            d: problem.d(),
            c: problem.c(),
            m: problem.m(),
            converged: sol.converged,
            iterations: sol.iterations,
            du: sol.du.clone(),
            r: sol.r.clone(),
            spectral: sol.spectral,
            report,
        }
    }

    /// Parses and checks internal consistency (tags, lengths, finiteness).
    pub fn parse(bytes: &[u8]) -> Result<Self> {
        let f: SolutionFile = serde_json::from_slice(bytes)?;
        if f.format != SOLUTION_FORMAT || f.version != SOLUTION_VERSION {
            return Err(Error::InvalidArgument(format!(
                "not a version {SOLUTION_VERSION} solution file (format `{}`, version {})",
                f.format, f.version
            )));
        }
        if f.m != 1 && f.m != 2 {
            return Err(Error::InvalidArgument(format!(
                "tangential dimension {} in solution file",
                f.m
            )));
        }
        if f.du.len() != f.d || Some(f.r.len()) != (1 + f.m).checked_mul(f.c) {
            return Err(Error::dims(format!(
                "solution file declares d = {}, c = {}, m = {} but holds du of length {} and r of length {}",
                f.d,
                f.c,
                f.m,
                f.du.len(),
                f.r.len()
            )));
        }
        if f.du.iter().chain(&f.r).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("solution file holds non-finite values".into()));
        }
        Ok(f)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&fs::read(path)?)
    }

    /// Checks that the file belongs to `problem`.
    pub fn check_against(&self, problem: &ProblemInstance) -> Result<()> {
        if (self.d, self.c, self.m) != (problem.d(), problem.c(), problem.m()) {
            return Err(Error::dims(format!(
                "solution is for d = {}, c = {}, m = {}; problem has d = {}, c = {}, m = {}",
                self.d,
                self.c,
                self.m,
                problem.d(),
                problem.c(),
                problem.m()
            )));
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        numfmt::to_vec(self)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_bytes()?)?;
        Ok(())
    }
}
