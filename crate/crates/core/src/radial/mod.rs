//! Radial reduction of the equation on an annulus, solved by conservative
//! finite volumes and damped Newton, plus log–log fitting of the gradient
//! growth near the boundary.

mod fit;
mod solver;

pub use fit::{
    blowup_side, default_window, estimate_consistency, fit_blowup_exponent, gradient_vs_distance,
    gradient_vs_distance_from, BlowupFit, Side, MIN_FIT_POINTS,
};
pub use solver::{
    flux, flux_derivative, residual_certificate, solve_radial, solve_radial_with, GradientScheme, RadialProblem,
    RadialProfile, RadialSolution, RhsFn, SolverOptions,
};
