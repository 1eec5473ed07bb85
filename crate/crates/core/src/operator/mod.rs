//! Finite-difference (p,q)-Laplacian on uniform grids and numerical checks
//! of the change-of-variable identity, the Böchner inequality and the
//! scaling law of the p-Laplacian.

mod grid;
mod identities;
mod manufactured;
mod stencil;

pub use grid::GridField;
pub use identities::{
    aux_weights, bochner_check, change_of_variable_check, change_of_variable_study, operator_check, operator_study,
    scaling_check, scaling_study, AuxWeights, IdentityReport, DEFAULT_TOL_FACTOR, DEGENERATE_REL, MAX_EXCLUDED_SHARE,
};
pub use manufactured::{k_laplacian_from, Manufactured};
pub use stencil::{dot, flux_divergence, gradient, laplacian, p_laplacian, pq_laplacian, REG_REL};
