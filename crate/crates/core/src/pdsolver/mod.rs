//! Primal-dual iterations for the incremental contact problem.
//!
//! [`pd_fixed_step`] runs the plain iteration on the convex problem obtained
//! by freezing the friction bound `g̃`; [`pd_accelerated`] adds the
//! strong-convexity step-size schedule and refreshes `g̃` from the current
//! displacement every iteration.

mod driver;
mod engine;
pub mod io;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SpectralEstimates;

pub use driver::{load_step_driver, StepResult};
pub use engine::{pd_accelerated, pd_accelerated_with, pd_fixed_step, prox_pi};
pub use io::{read_history_csv, write_history_csv, SolutionFile};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Initial dual step `α₀`.
    pub alpha0: f64,
    /// Stop once `‖Δu⁽ᵏ⁺¹⁾ − Δu⁽ᵏ⁾‖ ≤ eps`.
    pub eps: f64,
    pub max_outer: usize,
    pub pcg_tol: f64,
    pub pcg_maxit: usize,
    /// Extrapolation weight of the fixed-step variant.
    pub theta_fixed: f64,
    /// Evaluate the full residuals every iteration (one extra `K Δu`).
    pub diagnostics: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            alpha0: 0.1,
            eps: 1e-12,
            max_outer: 100_000,
            pcg_tol: 1e-10,
            pcg_maxit: 10_000,
            theta_fixed: 1.0,
            diagnostics: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [("alpha0", self.alpha0), ("eps", self.eps), ("pcg_tol", self.pcg_tol)];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        if self.max_outer == 0 || self.pcg_maxit == 0 {
            return Err(Error::InvalidArgument("iteration caps must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.theta_fixed) {
            return Err(Error::InvalidArgument(format!(
                "theta_fixed must lie in [0, 1], got {}",
                self.theta_fixed
            )));
        }
        Ok(())
    }
}

/// Residuals of the contact problem at one iterate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub eq: f64,
    pub compl: f64,
    pub pen: f64,
}

/// One outer iteration. `alpha`, `beta` and `theta` are the values used in
/// that iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: usize,
    pub step_norm: f64,
    pub alpha: f64,
    pub beta: f64,
    pub theta: f64,
    pub pcg_iters: usize,
    pub pcg_converged: bool,
    /// Every reaction block after the projection satisfied `−μ r_n ≥ ‖r_t‖`
    /// with no tolerance.
    pub dual_in_cone: bool,
    pub residuals: Option<Residuals>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub du: Vec<f64>,
    /// Node-blockwise `[r_n1, r_t1, …, r_nc, r_tc]`.
    pub r: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub history: Vec<IterationRecord>,
    pub spectral: Option<SpectralEstimates>,
}

impl Solution {
    /// Normal reactions `r_n`.
    pub fn r_n(&self, m: usize) -> Vec<f64> {
        self.r.chunks(1 + m).map(|b| b[0]).collect()
    }

    /// Tangential reactions, node-major.
    pub fn r_t(&self, m: usize) -> Vec<f64> {
        self.r.chunks(1 + m).flat_map(|b| b[1..].to_vec()).collect()
    }

    pub fn pcg_failures(&self) -> usize {
        self.history.iter().filter(|h| !h.pcg_converged).count()
    }
}
