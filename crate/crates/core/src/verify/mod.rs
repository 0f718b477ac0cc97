//! Checks on computed solutions: residuals of the contact problem, the
//! SOCLCP embedding, and an enumeration oracle for tiny planar instances.

mod oracle;
mod residuals;
mod soclcp;

pub use oracle::{oracle_eligible, oracle_enumerate, ORACLE_MAX_DOFS, ORACLE_MAX_NODES};
pub use residuals::{
    fractions, modified_residuals, residual_report, residual_values, ModifiedResiduals, NodeState, ResidualReport,
    StateFractions,
};
pub use soclcp::{
    build_soclcp, export_matrix_market, natural_lambdas, read_soclcp_export, soclcp_point, verify_soclcp,
    ConeDescriptor, SoclcpForm, SoclcpManifest, SoclcpPoint, SoclcpReport, MANIFEST_FORMAT, MANIFEST_VERSION,
};
