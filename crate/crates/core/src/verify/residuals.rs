use serde::{Deserialize, Serialize};

use crate::cones::tangential_norm;
use crate::error::{Error, Result};
use crate::fem::ProblemInstance;
use crate::linalg::{norm2, norm_inf};
use crate::pdsolver::Residuals;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeState {
    Free,
    Slip,
    Stick,
}

/// Proportions of candidate nodes in each state; all zero when `c = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateFractions {
    pub free: f64,
    pub slip: f64,
    pub stick: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    /// `‖K Δu − p − T_n r_n − T_t r_t‖`
    pub resid_eq: f64,
    /// `|Σ_j ⟨(−g_j − μ‖T_tjᵀΔu‖ + t_njᵀΔu, T_tjᵀΔu), r_j⟩|`
    pub resid_compl: f64,
    /// `‖min{g − T_nᵀΔu, 0}‖`
    pub resid_pen: f64,
    pub fractions: StateFractions,
    pub states: Vec<NodeState>,
}

/// Residuals of the problem with a frozen friction bound `g̃`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModifiedResiduals {
    /// Same as [`ResidualReport::resid_eq`].
    pub eq: f64,
    /// `|Σ_j ⟨(−g̃_j + t_njᵀΔu, T_tjᵀΔu), r_j⟩|`
    pub compl: f64,
    /// Norm of the per-node violations of `(−g̃_j + t_njᵀΔu, T_tjᵀΔu) ∈ F*`.
    pub dual_violation: f64,
    /// Largest violation of `r_j ∈ F`.
    pub primal_violation: f64,
}

struct Kinematics {
    /// `‖K Δu − p − T r‖`
    eq: f64,
    /// `T ᵀ Δu`, node-blockwise `(t_njᵀΔu, T_tjᵀΔu)`
    w: Vec<f64>,
}

fn kinematics(problem: &ProblemInstance, du: &[f64], r: &[f64]) -> Result<Kinematics> {
    let d = problem.d();
    let bs = 1 + problem.m();
    if du.len() != d || r.len() != bs * problem.c() {
        return Err(Error::dims(format!(
            "expected du of length {d} and r of length {}, got {} and {}",
            bs * problem.c(),
            du.len(),
            r.len()
        )));
    }
    let t = problem.contact().t();
    let ku = problem.k().spmv(du)?;
    let tr = t.spmv(r)?;
    let res: Vec<f64> = ku
        .iter()
        .zip(problem.p())
        .zip(&tr)
        .map(|((a, p), b)| a - p - b)
        .collect();
    Ok(Kinematics {
        eq: norm2(&res),
        w: t.spmv_transpose(du)?,
    })
}

/// The three scalar residuals of the contact problem.
pub fn residual_values(problem: &ProblemInstance, du: &[f64], r: &[f64]) -> Result<Residuals> {
    let kin = kinematics(problem, du, r)?;
    let bs = 1 + problem.m();
    let mu = problem.mu();
    let mut compl = 0.0;
    let mut pen_sq = 0.0;
    for (j, &g) in problem.contact().g().iter().enumerate() {
        let w = &kin.w[bs * j..bs * j + bs];
        let rj = &r[bs * j..bs * j + bs];
        let v_n = -g - mu * tangential_norm(&w[1..]) + w[0];
        compl += v_n * rj[0] + w[1..].iter().zip(&rj[1..]).map(|(a, b)| a * b).sum::<f64>();
        let gap = g - w[0];
        if gap < 0.0 {
            pen_sq += gap * gap;
        }
    }
    Ok(Residuals {
        eq: kin.eq,
        compl: compl.abs(),
        pen: pen_sq.sqrt(),
    })
}

/// Residuals plus the free / slip / stick classification of every node.
///
/// With `tol = 1e-9·max(1, ‖Δu‖∞)`, node `j` is free when `‖r_j‖ ≤ tol` and
/// its gap exceeds `tol`, stick when `‖T_tjᵀΔu‖ ≤ tol` and `‖r_j‖ > tol`,
/// and slip otherwise.
pub fn residual_report(problem: &ProblemInstance, du: &[f64], r: &[f64]) -> Result<ResidualReport> {
    let res = residual_values(problem, du, r)?;
    let bs = 1 + problem.m();
    let w = problem.contact().t().spmv_transpose(du)?;
    let tol = 1e-9 * norm_inf(du).max(1.0);
    let states: Vec<NodeState> = problem
        .contact()
        .g()
        .iter()
        .enumerate()
        .map(|(j, &g)| {
            let wj = &w[bs * j..bs * j + bs];
            let rnorm = norm2(&r[bs * j..bs * j + bs]);
            let gap = g - wj[0];
            if rnorm <= tol && gap > tol {
                NodeState::Free
            } else if tangential_norm(&wj[1..]) <= tol && rnorm > tol {
                NodeState::Stick
            } else {
                NodeState::Slip
            }
        })
        .collect();
    Ok(ResidualReport {
        resid_eq: res.eq,
        resid_compl: res.compl,
        resid_pen: res.pen,
        fractions: fractions(&states),
        states,
    })
}

pub fn fractions(states: &[NodeState]) -> StateFractions {
    if states.is_empty() {
        return StateFractions {
            free: 0.0,
            slip: 0.0,
            stick: 0.0,
        };
    }
    let n = states.len() as f64;
    let count = |s: NodeState| states.iter().filter(|&&x| x == s).count() as f64 / n;
    StateFractions {
        free: count(NodeState::Free),
        slip: count(NodeState::Slip),
        stick: count(NodeState::Stick),
    }
}

/// Residuals of the complementarity problem with frozen bound `g_tilde`.
pub fn modified_residuals(
    problem: &ProblemInstance,
    g_tilde: &[f64],
    du: &[f64],
    r: &[f64],
) -> Result<ModifiedResiduals> {
    if g_tilde.len() != problem.c() {
        return Err(Error::dims("g_tilde length"));
    }
    let kin = kinematics(problem, du, r)?;
    let bs = 1 + problem.m();
    let mu = problem.mu();
    let mut compl = 0.0;
    let mut dual_sq = 0.0;
    let mut primal: f64 = 0.0;
    for (j, &gt) in g_tilde.iter().enumerate() {
        let w = &kin.w[bs * j..bs * j + bs];
        let rj = &r[bs * j..bs * j + bs];
        let v_n = -gt + w[0];
        compl += v_n * rj[0] + w[1..].iter().zip(&rj[1..]).map(|(a, b)| a * b).sum::<f64>();
        let viol = (v_n + mu * tangential_norm(&w[1..])).max(0.0);
        dual_sq += viol * viol;
        primal = primal.max((tangential_norm(&rj[1..]) + mu * rj[0]).max(0.0));
    }
    Ok(ModifiedResiduals {
        eq: kin.eq,
        compl: compl.abs(),
        dual_violation: dual_sq.sqrt(),
        primal_violation: primal,
    })
}
