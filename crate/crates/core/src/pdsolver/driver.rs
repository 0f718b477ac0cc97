use crate::error::{Error, Result};
use crate::fem::{LoadStep, ProblemInstance};

use super::engine::pd_accelerated_with;
use super::{Solution, SolverConfig};

#[derive(Debug, Clone)]
pub struct StepResult {
    pub step: LoadStep,
    pub solution: Solution,
    /// Accumulated displacement `u^{l+1} = u^l + Δu`.
    pub u: Vec<f64>,
}

/// Solves a sequence of load levels `loads[0], loads[1], …` starting from
/// displacement `u0`.
///
/// Step `l` solves for `Δu` under `p = p^{l+1} − K u^l` with gaps measured
/// from `u^l`, warm-started from the previous reactions (and `Δu = 0`).
/// Solutions that stop at the iteration cap are kept; errors carry the step
/// index.
pub fn load_step_driver(
    template: &ProblemInstance,
    u0: &[f64],
    loads: &[Vec<f64>],
    cfg: &SolverConfig,
) -> Result<Vec<StepResult>> {
    if loads.is_empty() {
        return Err(Error::InvalidArgument("at least one load step is required".into()));
    }
    if u0.len() != template.d() {
        return Err(Error::dims("initial displacement length"));
    }
    // computed once here so every step's clone of the template shares it
    template.spectral()?;
    let zero_du = vec![0.0; template.d()];
    let mut u = u0.to_vec();
    let mut r_prev: Option<Vec<f64>> = None;
    let mut out = Vec::with_capacity(loads.len());
    for (l, p_next) in loads.iter().enumerate() {
        let wrap = |e: Error| Error::LoadStep {
            step: l,
            source: Box::new(e),
        };
        let step = LoadStep {
            u_prev: u.clone(),
            p_next: p_next.clone(),
        };
        let problem = step.problem(template).map_err(wrap)?;
        let start = r_prev.as_deref().map(|r| (zero_du.as_slice(), r));
        let solution = pd_accelerated_with(&problem, start, cfg).map_err(wrap)?;
        if !solution.converged {
            log::warn!("load step {l} stopped at the iteration cap");
        }
        u.iter_mut().zip(&solution.du).for_each(|(ui, di)| *ui += di);
        r_prev = Some(solution.r.clone());
        out.push(StepResult {
            step,
            solution,
            u: u.clone(),
        });
    }
    Ok(out)
}
