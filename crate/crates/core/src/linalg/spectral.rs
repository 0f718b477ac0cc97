use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::pcg::{pcg, Preconditioner};
use super::sparse::{dot, norm2, SparseMatrix};

/// Seed for power-iteration start vectors.
pub const START_VECTOR_SEED: u64 = 0x005e_ed0f_c0a7;

/// Extremal spectral quantities that fix the step-size rules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralEstimates {
    /// Largest singular value of the combined contact matrix `T`.
    pub sigma_t: f64,
    /// Smallest eigenvalue of `K`.
    pub mu_pi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralOptions {
    pub tol: f64,
    pub maxit: usize,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        SpectralOptions {
            tol: 1e-8,
            maxit: 1_000_000,
        }
    }
}

fn start_vector(n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(START_VECTOR_SEED);
    let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let nv = norm2(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    v
}

/// Largest singular value by power iteration on the smaller of `TᵀT` and
/// `TTᵀ`, stopped once successive Rayleigh quotients agree to `tol`
/// (relative).
pub fn max_singular_value(t: &SparseMatrix, tol: f64, maxit: usize) -> Result<f64> {
    if t.nrows() == 0 || t.ncols() == 0 || t.values().iter().all(|&v| v == 0.0) {
        return Err(Error::InvalidArgument(
            "max_singular_value needs a nonzero matrix".into(),
        ));
    }
    // Gram operator acts on the shorter side.
    let (inner, outer) = if t.ncols() <= t.nrows() {
        (t.ncols(), t.nrows())
    } else {
        (t.nrows(), t.ncols())
    };
    let gram = |v: &[f64], mid: &mut [f64], out: &mut [f64]| -> Result<()> {
        if t.ncols() <= t.nrows() {
            t.spmv_into(v, mid)?;
            t.spmv_transpose_into(mid, out)
        } else {
            t.spmv_transpose_into(v, mid)?;
            t.spmv_into(mid, out)
        }
    };

    let mut v = start_vector(inner);
    let mut mid = vec![0.0; outer];
    let mut w = vec![0.0; inner];
    let mut lambda_prev = 0.0;
    for _ in 0..maxit {
        gram(&v, &mut mid, &mut w)?;
        let lambda = dot(&v, &w);
        let nw = norm2(&w);
        if nw == 0.0 {
            // start vector in the null space; only possible for T = 0
            return Err(Error::InvalidArgument("power iteration collapsed to zero".into()));
        }
        if (lambda - lambda_prev).abs() <= tol * lambda {
            return Ok(lambda.max(0.0).sqrt());
        }
        lambda_prev = lambda;
        v.iter_mut().zip(&w).for_each(|(vi, wi)| *vi = wi / nw);
    }
    Err(Error::NotConverged {
        what: "power iteration for the largest singular value",
        maxit,
    })
}

/// Smallest eigenvalue of an SPD matrix by inverse iteration. Inner solves
/// use Jacobi-preconditioned CG; the estimate is the Rayleigh quotient with
/// `K` itself, so inexact inner solves only perturb the direction.
pub fn min_eigenvalue(k: &SparseMatrix, tol: f64, maxit: usize) -> Result<f64> {
    let n = k.nrows();
    if n == 0 || k.ncols() != n {
        return Err(Error::InvalidArgument(
            "min_eigenvalue needs a nonempty square matrix".into(),
        ));
    }
    let pre = Preconditioner::jacobi(k)?;
    let inner_tol = (tol * 1e-2).max(1e-13);
    let inner_maxit = (20 * n).max(1000);

    let mut v = start_vector(n);
    let mut kv = k.spmv(&v)?;
    let mut lambda_prev = dot(&v, &kv);
    for _ in 0..maxit {
        let guess: Vec<f64> = v.iter().map(|x| x / lambda_prev).collect();
        let solve = pcg(k, &v, &guess, inner_tol, inner_maxit, &pre)?;
        if !solve.converged {
            return Err(Error::NotConverged {
                what: "inner CG solve of inverse iteration",
                maxit: inner_maxit,
            });
        }
        let nw = norm2(&solve.x);
        v = solve.x.iter().map(|x| x / nw).collect();
        k.spmv_into(&v, &mut kv)?;
        let lambda = dot(&v, &kv);
        if (lambda - lambda_prev).abs() <= tol * lambda.abs() {
            return Ok(lambda);
        }
        lambda_prev = lambda;
    }
    Err(Error::NotConverged {
        what: "inverse iteration for the smallest eigenvalue",
        maxit,
    })
}
