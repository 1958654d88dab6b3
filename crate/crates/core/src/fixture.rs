//! The bundled five-customer reference fleet.

use crate::model::DispatchProblem;
use crate::problem_file::parse_problem;

pub const REFERENCE_FLEET_TOML: &str = include_str!("../fixtures/reference_fleet.toml");

/// Reference fleet at 700 kWh demand, λ = 0.5, T = 1 h.
pub fn reference_fleet() -> DispatchProblem {
    parse_problem(REFERENCE_FLEET_TOML).expect("bundled fixture is valid")
}
