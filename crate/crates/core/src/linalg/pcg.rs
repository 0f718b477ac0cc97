use crate::error::{Error, Result};

use super::sparse::{axpy, dot, norm2, SparseMatrix};

/// A square linear operator that CG can apply.
pub trait LinearOperator {
    fn dim(&self) -> usize;

    /// `y = A x`; `x` and `y` have length [`dim`](Self::dim).
    fn apply(&self, x: &[f64], y: &mut [f64]);

    fn diagonal(&self) -> Vec<f64>;
}

impl LinearOperator for SparseMatrix {
    fn dim(&self) -> usize {
        assert_eq!(self.nrows(), self.ncols(), "operator must be square");
        self.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.spmv_into(x, y).expect("operator dimensions checked by caller");
    }

    fn diagonal(&self) -> Vec<f64> {
        SparseMatrix::diagonal(self)
    }
}

/// `beta * K + I`, the system matrix of the primal proximal step.
#[derive(Debug, Clone, Copy)]
pub struct ShiftedOperator<'a> {
    pub k: &'a SparseMatrix,
    pub beta: f64,
}

impl LinearOperator for ShiftedOperator<'_> {
    fn dim(&self) -> usize {
        self.k.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.k.spmv_into(x, y).expect("operator dimensions checked by caller");
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi = self.beta * *yi + xi;
        }
    }

    fn diagonal(&self) -> Vec<f64> {
        self.k.diagonal().into_iter().map(|d| self.beta * d + 1.0).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Preconditioner {
    Identity,
    /// Inverse of the operator diagonal.
    Jacobi(Vec<f64>),
}

impl Preconditioner {
    pub fn jacobi(op: &impl LinearOperator) -> Result<Self> {
        let diag = op.diagonal();
        if let Some((i, d)) = diag.iter().enumerate().find(|(_, d)| !(**d > 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "Jacobi preconditioner needs a positive diagonal (entry {i} is {d})"
            )));
        }
        Ok(Preconditioner::Jacobi(diag.iter().map(|d| 1.0 / d).collect()))
    }

    fn apply(&self, r: &[f64], z: &mut [f64]) {
        match self {
            Preconditioner::Identity => z.copy_from_slice(r),
            Preconditioner::Jacobi(inv) => {
                for ((zi, ri), di) in z.iter_mut().zip(r).zip(inv) {
                    *zi = ri * di;
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PcgOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// `‖b − A x‖ / ‖b‖` of the returned iterate (true residual).
    pub relative_residual: f64,
}

/// Preconditioned conjugate gradients for an SPD operator.
///
/// Stops when the relative residual `‖b − A x‖/‖b‖` drops to `tol`. A start
/// point that already meets the tolerance is returned unchanged with zero
/// iterations. Running out of iterations is reported through
/// `converged = false`; a non-positive curvature direction is an error.
pub fn pcg(
    op: &impl LinearOperator,
    b: &[f64],
    x0: &[f64],
    tol: f64,
    maxit: usize,
    precond: &Preconditioner,
) -> Result<PcgOutcome> {
    pcg_observed(op, b, x0, tol, maxit, precond, |_, _| {})
}

/// [`pcg`] that hands every iterate `(iteration, x)` to `observer`,
/// starting with the initial point as iteration 0.
pub fn pcg_observed(
    op: &impl LinearOperator,
    b: &[f64],
    x0: &[f64],
    tol: f64,
    maxit: usize,
    precond: &Preconditioner,
    mut observer: impl FnMut(usize, &[f64]),
) -> Result<PcgOutcome> {
    let n = op.dim();
    if b.len() != n || x0.len() != n {
        return Err(Error::dims(format!(
            "pcg: operator of size {n}, b of length {}, x0 of length {}",
            b.len(),
            x0.len()
        )));
    }
    if let Preconditioner::Jacobi(inv) = precond {
        if inv.len() != n {
            return Err(Error::dims("pcg: preconditioner size"));
        }
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "pcg tolerance must be positive, got {tol}"
        )));
    }

    let bnorm = norm2(b);
    if bnorm == 0.0 {
        let x = vec![0.0; n];
        observer(0, &x);
        return Ok(PcgOutcome {
            x,
            iterations: 0,
            converged: true,
            relative_residual: 0.0,
        });
    }

    let mut x = x0.to_vec();
    let mut q = vec![0.0; n];
    let mut r = true_residual(op, b, &x, &mut q);
    observer(0, &x);
    let mut rnorm = norm2(&r);
    if rnorm <= tol * bnorm {
        return Ok(PcgOutcome {
            x,
            iterations: 0,
            converged: true,
            relative_residual: rnorm / bnorm,
        });
    }

    let mut z = vec![0.0; n];
    precond.apply(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);

    for it in 1..=maxit {
        op.apply(&p, &mut q);
        let curvature = dot(&p, &q);
        if !(curvature > 0.0) || !curvature.is_finite() {
            return Err(Error::Breakdown {
                iteration: it,
                curvature,
            });
        }
        let step = rz / curvature;
        axpy(step, &p, &mut x);
        axpy(-step, &q, &mut r);
        observer(it, &x);
        rnorm = norm2(&r);

        if rnorm <= tol * bnorm {
            // The recurrence can drift from the true residual; confirm.
            r = true_residual(op, b, &x, &mut q);
            rnorm = norm2(&r);
            if rnorm <= tol * bnorm {
                return Ok(PcgOutcome {
                    x,
                    iterations: it,
                    converged: true,
                    relative_residual: rnorm / bnorm,
                });
            }
            // restart from the true residual
            precond.apply(&r, &mut z);
            p.copy_from_slice(&z);
            rz = dot(&r, &z);
            continue;
        }

        precond.apply(&r, &mut z);
        let rz_next = dot(&r, &z);
        let ratio = rz_next / rz;
        rz = rz_next;
        for (pi, zi) in p.iter_mut().zip(&z) {
            *pi = zi + ratio * *pi;
        }
    }

    let r = true_residual(op, b, &x, &mut q);
    Ok(PcgOutcome {
        relative_residual: norm2(&r) / bnorm,
        x,
        iterations: maxit,
        converged: false,
    })
}

fn true_residual(op: &impl LinearOperator, b: &[f64], x: &[f64], scratch: &mut [f64]) -> Vec<f64> {
    op.apply(x, scratch);
    b.iter().zip(scratch.iter()).map(|(bi, ai)| bi - ai).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_system_in_one_iteration() {
        let a = SparseMatrix::identity(2);
        let out = pcg(&a, &[1.0, 2.0], &[0.0, 0.0], 1e-12, 10, &Preconditioner::Identity).unwrap();
        assert!(out.converged);
        assert_eq!(out.iterations, 1);
        assert_eq!(out.x, vec![1.0, 2.0]);
    }

    #[test]
    fn diagonal_system_with_jacobi() {
        let a = SparseMatrix::from_diagonal(&[1.0, 10.0]);
        let pre = Preconditioner::jacobi(&a).unwrap();
        let out = pcg(&a, &[1.0, 10.0], &[0.0, 0.0], 1e-12, 10, &pre).unwrap();
        assert!(out.converged);
        assert!(out.iterations <= 2);
        assert!((out.x[0] - 1.0).abs() < 1e-14 && (out.x[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn converged_start_point_is_returned_untouched() {
        let a = SparseMatrix::from_diagonal(&[2.0, 3.0]);
        let out = pcg(&a, &[2.0, 3.0], &[1.0, 1.0], 1e-10, 10, &Preconditioner::Identity).unwrap();
        assert_eq!(out.iterations, 0);
        assert_eq!(out.x, vec![1.0, 1.0]);
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let a = SparseMatrix::identity(3);
        let out = pcg(&a, &[0.0; 3], &[1.0, 2.0, 3.0], 1e-10, 10, &Preconditioner::Identity).unwrap();
        assert_eq!(out.x, vec![0.0; 3]);
        assert!(out.converged);
    }

    #[test]
    fn iteration_cap_is_reported_not_raised() {
        let a = SparseMatrix::from_dense(&[vec![4.0, 1.0, 0.0], vec![1.0, 3.0, 1.0], vec![0.0, 1.0, 2.0]]).unwrap();
        let out = pcg(&a, &[1.0, 2.0, 3.0], &[0.0; 3], 1e-14, 1, &Preconditioner::Identity).unwrap();
        assert!(!out.converged);
        assert_eq!(out.iterations, 1);
    }

    #[test]
    fn indefinite_operator_breaks_down() {
        let a = SparseMatrix::from_diagonal(&[1.0, -1.0]);
        let err = pcg(&a, &[1.0, 1.0], &[0.0, 0.0], 1e-12, 10, &Preconditioner::Identity).unwrap_err();
        assert!(matches!(err, Error::Breakdown { .. }));
    }

    #[test]
    fn jacobi_rejects_nonpositive_diagonal() {
        let a = SparseMatrix::from_diagonal(&[1.0, 0.0]);
        assert!(Preconditioner::jacobi(&a).is_err());
    }

    #[test]
    fn shifted_operator_matches_definition() {
        let k = SparseMatrix::from_dense(&[vec![2.0, -1.0], vec![-1.0, 2.0]]).unwrap();
        let op = ShiftedOperator { k: &k, beta: 0.5 };
        let mut y = vec![0.0; 2];
        op.apply(&[1.0, 2.0], &mut y);
        assert_eq!(y, vec![0.5 * 0.0 + 1.0, 0.5 * 3.0 + 2.0]);
        assert_eq!(op.diagonal(), vec![2.0, 2.0]);
    }
}
