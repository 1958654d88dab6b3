//! Optimal allocation of shortage energy among contracted distributed
//! generators during supply shortage outages.
//!
//! Three dispatch problems are solved over a fleet of participating
//! customers with quadratic generation costs and average-power bounds:
//!
//! * least-cost dispatch with the market cleared exactly
//!   ([`solve_cost_dispatch`]),
//! * resilience dispatch that maximises delivered energy
//!   ([`solve_resilience_dispatch`]),
//! * a weighted trade-off `λ·cost − (1−λ)·energy` with the market-clearing
//!   constraint relaxed to an inequality ([`solve_multiobjective`]).
//!
//! [`analysis`] runs λ and demand sweeps and builds the cost/energy frontier;
//! [`oracle`] is an exhaustive grid search used to cross-check the solvers.

pub mod analysis;
pub mod error;
pub mod fixture;
pub mod model;
pub mod oracle;
pub mod plot;
pub mod problem_file;
pub mod solver;
pub mod table;

pub use error::{DispatchError, Result};
pub use model::{
    classify_regime, evaluate_cost, inverse_marginal_cost, marginal_cost, BoundStatus, CustomerId,
    DispatchProblem, DispatchSolution, ParetoPoint, ParticipatingCustomer, Regime, RegimeReport,
};
pub use solver::{
    solve_cost_dispatch, solve_multiobjective, solve_resilience_dispatch, verify_cost_weight_floor,
    SolverConfig,
};

/// Environment variable overriding [`SolverConfig::bisection_tol`] in the CLI.
pub const TOL_ENV_VAR: &str = "DISPATCHKIT_TOL";
