//! Lower bounds on the mutual information `I(X; Y)` of a binary `X` and
//! a finite `Y`, minimized over every joint distribution within a given
//! variational distance of a reference joint.
//!
//! The minimization splits into a convex inner problem over conditionals for
//! a fixed binary marginal ([`solver`]) and a one-dimensional sweep over that
//! marginal ([`sweep`]). [`ci`] turns the bound into a confidence floor for
//! estimates from counts, and [`oracle`] holds brute-force references.

pub mod ci;
pub mod curve;
pub mod dist;
pub mod error;
pub mod oracle;
pub mod solver;
pub mod sweep;

pub use ci::{
    empirical_joint, epsilon_for_confidence, mi_confidence_floor, ConfidenceReport, ConfidenceSpec, CountsTable,
};
pub use dist::{
    compose, conditional_y_given_x, marginal_x, marginal_y, mutual_information, relative_entropy, validate_joint,
    variational_distance, Conditional, InfoValue, JointDist, MarginalX, MarginalY, Mat2, Unit, ValidationPolicy,
};
pub use error::{Error, Result};
pub use solver::{
    feasible_init, inner_minimize, linear_oracle, mi_gradient, InnerProblem, InnerResult, SolveStatus, SolverConfig,
};
pub use sweep::{lower_bound, make_grid, qx_of_gamma, refine_check, sweep, BoundReport, GammaGrid, SweepPoint};
