use crate::cones::{friction_block_in_cone, project_friction_block, tangential_norm};
use crate::error::{Error, Result};
use crate::fem::ProblemInstance;
use crate::linalg::{pcg, PcgOutcome, Preconditioner, ShiftedOperator, SparseMatrix, SpectralEstimates};
use crate::verify::residual_values;

use super::{IterationRecord, Solution, SolverConfig};

/// `(βK + I)⁻¹(u + βp)` by Jacobi-preconditioned CG started at `warm_start`.
pub fn prox_pi(
    u: &[f64],
    beta: f64,
    k: &SparseMatrix,
    p: &[f64],
    warm_start: &[f64],
    cfg: &SolverConfig,
) -> Result<PcgOutcome> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "prox step must be positive, got {beta}"
        )));
    }
    let d = k.nrows();
    if k.ncols() != d || u.len() != d || p.len() != d || warm_start.len() != d {
        return Err(Error::dims("prox_pi operands"));
    }
    let b: Vec<f64> = u.iter().zip(p).map(|(ui, pi)| ui + beta * pi).collect();
    let op = ShiftedOperator { k, beta };
    let pre = Preconditioner::jacobi(&op)?;
    pcg(&op, &b, warm_start, cfg.pcg_tol, cfg.pcg_maxit, &pre)
}

/// How `g̃` is obtained each iteration.
enum Bound<'a> {
    Frozen(&'a [f64]),
    /// `g̃_j = g_j + μ‖T_tjᵀΔu⁽ᵏ⁾‖`
    Coulomb,
}

enum Schedule {
    Fixed { theta: f64 },
    Accelerated { mu_pi: f64 },
}

/// Fixed step sizes on the problem with frozen friction bound `g_tilde`.
///
/// Converges when `α β σ_T² ≤ 1`; the caller picks the steps.
pub fn pd_fixed_step(
    problem: &ProblemInstance,
    g_tilde: &[f64],
    alpha: f64,
    beta: f64,
    theta: f64,
    cfg: &SolverConfig,
) -> Result<Solution> {
    cfg.validate()?;
    if g_tilde.len() != problem.c() {
        return Err(Error::dims(format!(
            "g_tilde has {} entries for {} nodes",
            g_tilde.len(),
            problem.c()
        )));
    }
    if g_tilde.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("g_tilde must be finite".into()));
    }
    if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "step sizes must be positive, got alpha {alpha}, beta {beta}"
        )));
    }
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::InvalidArgument(format!("theta must lie in [0, 1], got {theta}")));
    }
    run(
        problem,
        Bound::Frozen(g_tilde),
        alpha,
        beta,
        Schedule::Fixed { theta },
        None,
        None,
        cfg,
    )
}

/// Accelerated iteration with the per-iteration friction-bound update,
/// started from `Δu = 0`, `r = 0`.
pub fn pd_accelerated(problem: &ProblemInstance, cfg: &SolverConfig) -> Result<Solution> {
    pd_accelerated_with(problem, None, cfg)
}

/// [`pd_accelerated`] from a given `(Δu⁽⁰⁾, r⁽⁰⁾)`.
pub fn pd_accelerated_with(
    problem: &ProblemInstance,
    start: Option<(&[f64], &[f64])>,
    cfg: &SolverConfig,
) -> Result<Solution> {
    cfg.validate()?;
    let spectral = problem.spectral()?;
    let alpha0 = cfg.alpha0;
    let beta0 = if spectral.sigma_t > 0.0 {
        1.0 / (alpha0 * spectral.sigma_t * spectral.sigma_t)
    } else {
        1.0 / alpha0
    };
    run(
        problem,
        Bound::Coulomb,
        alpha0,
        beta0,
        Schedule::Accelerated { mu_pi: spectral.mu_pi },
        start,
        Some(spectral),
        cfg,
    )
}

#[allow(clippy::too_many_arguments)]
fn run(
    problem: &ProblemInstance,
    bound: Bound<'_>,
    mut alpha: f64,
    mut beta: f64,
    schedule: Schedule,
    start: Option<(&[f64], &[f64])>,
    spectral: Option<SpectralEstimates>,
    cfg: &SolverConfig,
) -> Result<Solution> {
    let d = problem.d();
    let c = problem.c();
    let m = problem.m();
    let bs = 1 + m;
    let mu = problem.mu();
    let k = problem.k();
    let p = problem.p();
    let t = problem.contact().t();
    let g = problem.contact().g();

    let (mut du, mut r) = match start {
        Some((du0, r0)) => {
            if du0.len() != d || r0.len() != bs * c {
                return Err(Error::dims("starting point"));
            }
            (du0.to_vec(), r0.to_vec())
        }
        None => (vec![0.0; d], vec![0.0; bs * c]),
    };
    let mut du_hat = du.clone();
    let mut g_tilde = match bound {
        Bound::Frozen(gt) => gt.to_vec(),
        Bound::Coulomb => vec![0.0; c],
    };
    let k_diag = k.diagonal();
    let mut w = vec![0.0; bs * c];
    let mut tr = vec![0.0; d];
    let mut b = vec![0.0; d];
    let mut ku = vec![0.0; d];
    let zero = vec![0.0; d];
    let mut history = Vec::new();
    let mut converged = false;
    let mut warned_pcg = false;

    for iter in 0..cfg.max_outer {
        if let Bound::Coulomb = bound {
            t.spmv_transpose_into(&du, &mut w)?;
            for (j, gt) in g_tilde.iter_mut().enumerate() {
                *gt = g[j] + mu * tangential_norm(&w[bs * j + 1..bs * j + bs]);
            }
        }

        // dual ascent and projection
        t.spmv_transpose_into(&du_hat, &mut w)?;
        let mut dual_in_cone = true;
        for j in 0..c {
            let blk = &mut r[bs * j..bs * j + bs];
            let wj = &w[bs * j..bs * j + bs];
            blk[0] += alpha * (g_tilde[j] - wj[0]);
            for a in 1..bs {
                blk[a] -= alpha * wj[a];
            }
            project_friction_block(blk, mu);
            dual_in_cone &= friction_block_in_cone(blk, mu, 0.0);
        }
        if r.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                iteration: iter,
                history: Box::new(history),
            });
        }

        // primal proximal step, solved for the increment δ = x − Δu:
        // (βK + I)δ = β(T r + p − K Δu)
        t.spmv_into(&r, &mut tr)?;
        k.spmv_into(&du, &mut ku)?;
        for i in 0..d {
            b[i] = beta * (tr[i] + p[i] - ku[i]);
        }
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                iteration: iter,
                history: Box::new(history),
            });
        }
        let op = ShiftedOperator { k, beta };
        let pre = Preconditioner::Jacobi(k_diag.iter().map(|kd| 1.0 / (beta * kd + 1.0)).collect());
        let out = pcg(&op, &b, &zero, cfg.pcg_tol, cfg.pcg_maxit, &pre)?;
        if !out.converged && !warned_pcg {
            log::warn!(
                "inner CG stopped at {} iterations (relative residual {:e}) in outer iteration {iter}",
                out.iterations,
                out.relative_residual
            );
            warned_pcg = true;
        }
        let du_new: Vec<f64> = du.iter().zip(&out.x).map(|(a, b)| a + b).collect();

        let theta = match schedule {
            Schedule::Fixed { theta } => theta,
            Schedule::Accelerated { mu_pi } => 1.0 / (1.0 + mu_pi * beta).sqrt(),
        };
        let mut step_sq = 0.0;
        for i in 0..d {
            let diff = du_new[i] - du[i];
            step_sq += diff * diff;
            du_hat[i] = du_new[i] + theta * diff;
        }
        let step_norm = step_sq.sqrt();
        du = du_new;

        let residuals = if cfg.diagnostics {
            Some(residual_values(problem, &du, &r)?)
        } else {
            None
        };
        history.push(IterationRecord {
            k: iter,
            step_norm,
            alpha,
            beta,
            theta,
            pcg_iters: out.iterations,
            pcg_converged: out.converged,
            dual_in_cone,
            residuals,
        });

        if !step_norm.is_finite() {
            return Err(Error::NonFinite {
                iteration: iter,
                history: Box::new(history),
            });
        }

        if let Schedule::Accelerated { .. } = schedule {
            alpha /= theta;
            beta *= theta;
        }
        if step_norm <= cfg.eps {
            converged = true;
            break;
        }
    }

    if !converged {
        log::warn!(
            "no convergence within {} outer iterations (last step {:e})",
            cfg.max_outer,
            history.last().map_or(f64::NAN, |h| h.step_norm)
        );
    }
    Ok(Solution {
        iterations: history.len(),
        du,
        r,
        converged,
        history,
        spectral,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::ContactGeometry;

    /// One node, DOFs (x, y), obstacle below: t_n = −e_y, T_t = e_x.
    fn single_node(p: [f64; 2], g: f64, mu: f64) -> ProblemInstance {
        let tn = SparseMatrix::from_dense(&[vec![0.0], vec![-1.0]]).unwrap();
        let tt = SparseMatrix::from_dense(&[vec![1.0], vec![0.0]]).unwrap();
        let geo = ContactGeometry::new(1, tn, tt, vec![g]).unwrap();
        ProblemInstance::new(SparseMatrix::identity(2), p.to_vec(), geo, mu).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn overflowing_load_is_reported() {
        let prob = single_node([1e308, -1e308], 0.0, 0.5);
        let err = pd_accelerated(&prob, &SolverConfig::default()).unwrap_err();
        assert!(matches!(err, Error::NonFinite { iteration: 0, .. }), "{err}");
    }

    #[test]
    fn prox_of_identity() {
        let k = SparseMatrix::identity(1);
        let out = prox_pi(&[1.0], 1.0, &k, &[1.0], &[0.0], &SolverConfig::default()).unwrap();
        assert!((out.x[0] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn prox_identity_limit() {
        let k = SparseMatrix::from_dense(&[vec![2.0, -1.0], vec![-1.0, 2.0]]).unwrap();
        let beta = 1e-12;
        let out = prox_pi(
            &[0.3, -0.7],
            beta,
            &k,
            &[1.0, 2.0],
            &[0.0, 0.0],
            &SolverConfig::default(),
        )
        .unwrap();
        assert!(close(&out.x, &[0.3 + beta, -0.7 + 2.0 * beta], 1e-10));
    }

    #[test]
    fn fixed_step_unloaded_body_stays_at_zero() {
        let prob = single_node([0.0, 0.0], 0.1, 0.5);
        let sol = pd_fixed_step(&prob, &[0.1], 1.0, 1.0, 1.0, &SolverConfig::default()).unwrap();
        assert!(sol.converged);
        assert_eq!(sol.iterations, 1);
        assert_eq!(sol.du, vec![0.0, 0.0]);
        assert_eq!(sol.r, vec![0.0, 0.0]);
    }

    #[test]
    fn fixed_step_normal_push() {
        let f = 0.7;
        let prob = single_node([0.0, -f], 0.0, 0.5);
        let sol = pd_fixed_step(&prob, &[0.0], 1.0, 1.0, 1.0, &SolverConfig::default()).unwrap();
        assert!(sol.converged);
        assert!(close(&sol.du, &[0.0, 0.0], 1e-10), "{:?}", sol.du);
        assert!(close(&sol.r, &[-f, 0.0], 1e-10), "{:?}", sol.r);
    }

    #[test]
    fn fixed_step_slip_with_matching_bound() {
        // With g̃ = g + μ|Δu_t| = 0.25 the frozen problem has the slip
        // solution of the Coulomb problem as its minimiser.
        let prob = single_node([1.0, -1.0], 0.0, 0.5);
        let sol = pd_fixed_step(&prob, &[0.25], 1.0, 1.0, 1.0, &SolverConfig::default()).unwrap();
        assert!(sol.converged);
        assert!(close(&sol.du, &[0.5, 0.0], 1e-9), "{:?}", sol.du);
        assert!(close(&sol.r, &[-1.0, -0.5], 1e-9), "{:?}", sol.r);
    }

    #[test]
    fn fixed_step_zero_bound_projects_load() {
        // min ½‖u‖² − pᵀu over (u_y, u_x) ∈ F*: the projection of p onto F*.
        let prob = single_node([1.0, -1.0], 0.0, 0.5);
        let sol = pd_fixed_step(&prob, &[0.0], 1.0, 1.0, 1.0, &SolverConfig::default()).unwrap();
        assert!(sol.converged);
        assert!(close(&sol.du, &[0.4, 0.2], 1e-9), "{:?}", sol.du);
    }

    #[test]
    fn accelerated_stick() {
        let prob = single_node([0.3, -1.0], 0.0, 0.5);
        let sol = pd_accelerated(&prob, &SolverConfig::default()).unwrap();
        assert!(sol.converged);
        assert!(close(&sol.du, &[0.0, 0.0], 1e-9), "{:?}", sol.du);
        assert!(close(&sol.r, &[-1.0, -0.3], 1e-9), "{:?}", sol.r);
    }

    #[test]
    fn accelerated_slip() {
        let prob = single_node([1.0, -1.0], 0.0, 0.5);
        let sol = pd_accelerated(&prob, &SolverConfig::default()).unwrap();
        assert!(sol.converged);
        // the step-length stopping rule leaves an error of a few 1e-9 here
        assert!(close(&sol.du, &[0.5, 0.0], 1e-8), "{:?}", sol.du);
        assert!(close(&sol.r, &[-1.0, -0.5], 1e-8), "{:?}", sol.r);
    }

    #[test]
    fn accelerated_step_invariants() {
        let prob = single_node([1.0, -1.0], 0.0, 0.5);
        let sol = pd_accelerated(&prob, &SolverConfig::default()).unwrap();
        let ab0 = sol.history[0].alpha * sol.history[0].beta;
        for w in sol.history.windows(2) {
            assert!(w[1].beta < w[0].beta && w[1].alpha > w[0].alpha);
        }
        for h in &sol.history {
            assert!(((h.alpha * h.beta) - ab0).abs() <= 1e-12 * ab0);
            assert!(h.theta > 0.0 && h.theta <= 1.0);
            assert!(h.dual_in_cone);
        }
    }

    #[test]
    fn iteration_cap_returns_last_iterate() {
        let prob = single_node([1.0, -1.0], 0.0, 0.5);
        let cfg = SolverConfig {
            max_outer: 3,
            ..SolverConfig::default()
        };
        let sol = pd_accelerated(&prob, &cfg).unwrap();
        assert!(!sol.converged);
        assert_eq!(sol.iterations, 3);
        assert_eq!(sol.history.len(), 3);
    }

    #[test]
    fn rejects_bad_arguments() {
        let prob = single_node([1.0, -1.0], 0.0, 0.5);
        let cfg = SolverConfig::default();
        assert!(pd_fixed_step(&prob, &[0.0, 0.0], 1.0, 1.0, 1.0, &cfg).is_err());
        assert!(pd_fixed_step(&prob, &[0.0], 0.0, 1.0, 1.0, &cfg).is_err());
        assert!(pd_fixed_step(&prob, &[0.0], 1.0, 1.0, 1.5, &cfg).is_err());
        let bad = SolverConfig { eps: 0.0, ..cfg };
        assert!(pd_accelerated(&prob, &bad).is_err());
    }

    #[test]
    fn diagnostics_fill_residuals() {
        let prob = single_node([0.3, -1.0], 0.0, 0.5);
        let cfg = SolverConfig {
            diagnostics: true,
            ..SolverConfig::default()
        };
        let sol = pd_accelerated(&prob, &cfg).unwrap();
        assert!(sol.history.iter().all(|h| h.residuals.is_some()));
        assert!(sol.history.last().unwrap().step_norm <= 1e-12);
    }
}
