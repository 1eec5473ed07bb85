//! Liouville-regime classification, Bernstein parameter selection and
//! numerical checks for `-Δ_p u - Δ_q u = f(u, ∇u)`.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the aliases at the
//! bottom of this file fix the scalar to `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bernstein;
pub mod error;
pub mod operator;
pub mod radial;
pub mod regime;
pub mod scalar;

pub use bernstein::{
    il_constraints_hold, il_parameter_window, product_trinomial, select_b_product, select_b_product_eps, sum_selection,
    sum_trinomial, sum_trinomial_sup, verify_negativity, AlphaBound, BSelection, CaseTag, ILWindow, TrinomialCoeffs,
    TrinomialSource, DEFAULT_GRID_POINTS,
};
pub use error::{Error, Result};
pub use operator::{
    aux_weights, bochner_check, change_of_variable_check, p_laplacian, pq_laplacian, scaling_check, AuxWeights,
    GridField, IdentityReport, Manufactured,
};
pub use radial::{
    estimate_consistency, fit_blowup_exponent, gradient_vs_distance, solve_radial, BlowupFit, GradientScheme,
    RadialProblem, RadialSolution, SolverOptions,
};
pub use regime::{
    classify, classify_with, estimate_rate, exponent_bundle, product_thresholds, sum_exponent_bundle, sum_thresholds,
    BoundedQuantity, ClassifyOptions, Condition, ExponentBundle, NonlinearityKind, ProblemInstance, ProductThresholds,
    RegimeDecision, SumThresholds, Theorem, TheoremCheck,
};
pub use scalar::Scalar;

pub type Instance = regime::ProblemInstance<f64>;
pub type Decision = regime::RegimeDecision<f64>;
pub type Thresholds = regime::ProductThresholds<f64>;
pub type SumThresholds64 = regime::SumThresholds<f64>;
pub type Exponents = regime::ExponentBundle<f64>;
pub type Trinomial = bernstein::TrinomialCoeffs<f64>;
pub type Selection = bernstein::BSelection<f64>;
pub type Window = bernstein::ILWindow<f64>;
pub type Field = operator::GridField<f64>;
pub type Weights = operator::AuxWeights<f64>;
pub type Report = operator::IdentityReport<f64>;
pub type Radial = radial::RadialProblem<f64>;
pub type Solution = radial::RadialSolution<f64>;
pub type Fit = radial::BlowupFit<f64>;
