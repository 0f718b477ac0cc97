//! Sparse solver for the quasi-static incremental contact problem of a linear
//! elastic body against a rigid obstacle with Coulomb friction.
//!
//! The crate is organised around the pieces of the method:
//!
//! * [`linalg`]: CSR storage, Jacobi-preconditioned CG, power-iteration
//!   spectral estimates, Matrix Market I/O.
//! * [`cones`]: projections onto the Coulomb friction cone and the
//!   second-order cone, plus membership tests.
//! * [`fem`]: Q4 / H8 stiffness assembly, contact frames, the two benchmark
//!   generators and the JSON problem file.
//! * [`pdsolver`]: the fixed-bound primal-dual iteration and the accelerated
//!   variant with the per-iteration friction-bound update, plus a load-step
//!   driver.
//! * [`verify`]: residual diagnostics, the SOCLCP embedding with Matrix Market
//!   export, and a brute-force state enumeration oracle for tiny planar
//!   instances.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cones;
pub mod error;
pub mod fem;
pub mod linalg;
mod numfmt;
pub mod pdsolver;
pub mod verify;

pub use error::{Error, Result};
pub use fem::{ContactGeometry, ProblemInstance};
pub use linalg::SparseMatrix;
pub use pdsolver::{Solution, SolverConfig};
