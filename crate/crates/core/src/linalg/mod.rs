//! Sparse storage and the iterative kernels the solver runs on.

pub mod mm;
mod pcg;
mod sparse;
mod spectral;

pub use mm::{
    column_matrix, column_vector, read_matrix_market, read_matrix_market_str, write_matrix_market,
    write_matrix_market_to,
};
pub use pcg::{pcg, pcg_observed, LinearOperator, PcgOutcome, Preconditioner, ShiftedOperator};
pub use sparse::{axpy, dot, norm2, norm_inf, SparseMatrix};
pub use spectral::{max_singular_value, min_eigenvalue, SpectralEstimates, SpectralOptions, START_VECTOR_SEED};
