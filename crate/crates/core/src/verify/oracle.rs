//! Brute-force state enumeration for tiny planar problems.
//!
//! Every node is assigned one of free / stick / slip+ / slip−. With `K`
//! invertible, `Δu = K⁻¹(p + T r)`, so each assignment is a square linear
//! system of size `2c` in the reactions. Solutions of the systems that also
//! satisfy the sign conditions are the solutions of the contact problem.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::fem::ProblemInstance;
use crate::pdsolver::Solution;

pub const ORACLE_MAX_NODES: usize = 6;
pub const ORACLE_MAX_DOFS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Guess {
    Free,
    Stick,
    /// `r_t = μ r_n ≤ 0`, sliding in `+t`.
    SlipPos,
    /// `r_t = −μ r_n ≥ 0`, sliding in `−t`.
    SlipNeg,
}

const GUESSES: [Guess; 4] = [Guess::Free, Guess::Stick, Guess::SlipPos, Guess::SlipNeg];

/// Checks the oracle's preconditions without doing any work.
pub fn oracle_eligible(problem: &ProblemInstance) -> Result<()> {
    if problem.m() != 1 {
        return Err(Error::OracleIneligible(format!(
            "only planar problems are enumerated (m = {})",
            problem.m()
        )));
    }
    if problem.c() > ORACLE_MAX_NODES {
        return Err(Error::OracleIneligible(format!(
            "{} candidate nodes, at most {ORACLE_MAX_NODES} are enumerated",
            problem.c()
        )));
    }
    if problem.d() > ORACLE_MAX_DOFS {
        return Err(Error::OracleIneligible(format!(
            "{} degrees of freedom, at most {ORACLE_MAX_DOFS} are handled densely",
            problem.d()
        )));
    }
    Ok(())
}

/// All state combinations whose solution satisfies the contact conditions
/// within `tol` (relative to `max(1, ‖(Δu, r)‖∞)`), deduplicated and in
/// enumeration order.
pub fn oracle_enumerate(problem: &ProblemInstance, tol: f64) -> Result<Vec<Solution>> {
    oracle_eligible(problem)?;
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let d = problem.d();
    let c = problem.c();
    let n = 2 * c;
    let mu = problem.mu();
    let g = problem.contact().g();

    let k = DMatrix::from_row_slice(d, d, &problem.k().to_dense().concat());
    let lu = k.clone().lu();
    let p = DVector::from_column_slice(problem.p());
    let t = DMatrix::from_row_slice(d, n, &problem.contact().t().to_dense().concat());
    let u0 = lu
        .solve(&p)
        .ok_or_else(|| Error::OracleIneligible("stiffness matrix is singular".into()))?;
    let z = lu
        .solve(&t)
        .ok_or_else(|| Error::OracleIneligible("stiffness matrix is singular".into()))?;
    // w = Tᵀ Δu = w0 + H r
    let w0 = t.transpose() * &u0;
    let h = t.transpose() * &z;

    let mut accepted: Vec<Solution> = Vec::new();
    let mut state = vec![Guess::Free; c];
    for code in 0..4usize.pow(c as u32) {
        let mut rest = code;
        for s in state.iter_mut() {
            *s = GUESSES[rest % 4];
            rest /= 4;
        }
        let mut a = DMatrix::<f64>::zeros(n, n);
        let mut b = DVector::<f64>::zeros(n);
        for (j, s) in state.iter().enumerate() {
            let (rn, rt) = (2 * j, 2 * j + 1);
            match s {
                Guess::Free => {
                    a[(rn, rn)] = 1.0;
                    a[(rt, rt)] = 1.0;
                }
                Guess::Stick => {
                    a.row_mut(rn).copy_from(&h.row(rn));
                    b[rn] = g[j] - w0[rn];
                    a.row_mut(rt).copy_from(&h.row(rt));
                    b[rt] = -w0[rt];
                }
                Guess::SlipPos | Guess::SlipNeg => {
                    a.row_mut(rn).copy_from(&h.row(rn));
                    b[rn] = g[j] - w0[rn];
                    let sign = if *s == Guess::SlipPos { 1.0 } else { -1.0 };
                    a[(rt, rt)] = 1.0;
                    a[(rt, rn)] = -sign * mu;
                }
            }
        }
        let Some(r) = a.clone().lu().solve(&b) else {
            log::debug!("state {state:?}: singular system, skipped");
            continue;
        };
        let du = &u0 + &z * &r;
        let w = &w0 + &h * &r;
        let scale = du.amax().max(r.amax()).max(1.0);
        let tl = tol * scale;
        if (&a * &r - &b).amax() > tl || !r.iter().chain(du.iter()).all(|v| v.is_finite()) {
            log::debug!("state {state:?}: system solved inaccurately, skipped");
            continue;
        }
        let ok = state.iter().enumerate().all(|(j, s)| {
            let (rn, rt) = (r[2 * j], r[2 * j + 1]);
            let (wn, wt) = (w[2 * j], w[2 * j + 1]);
            let gap = g[j] - wn;
            let in_cone = rn <= tl && rt.abs() <= -mu * rn + tl;
            gap >= -tl
                && in_cone
                && match s {
                    Guess::SlipPos => wt >= -tl,
                    Guess::SlipNeg => wt <= tl,
                    _ => true,
                }
        });
        if !ok {
            continue;
        }
        let du: Vec<f64> = du.iter().copied().collect();
        let r: Vec<f64> = r.iter().copied().collect();
        let dup = accepted.iter().any(|s| {
            let diff =
                s.du.iter()
                    .zip(&du)
                    .chain(s.r.iter().zip(&r))
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0, f64::max);
            diff <= 1e-8 * scale
        });
        if !dup {
            accepted.push(Solution {
                du,
                r,
                iterations: 0,
                converged: true,
                history: Vec::new(),
                spectral: None,
            });
        }
    }
    if accepted.is_empty() {
        return Err(Error::OracleNoSolution { tol });
    }
    Ok(accepted)
}
