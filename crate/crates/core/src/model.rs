//! Domain types and the quadratic generation cost model.
//!
//! Every participating customer runs an in-house generator whose cost for
//! producing energy `e` (kWh) over a program of `t` hours is
//!
//! ```text
//! C(e) = t * (c2 * (e/t)^2 + c1 * (e/t) + c0)
//! ```
//!
//! The coefficients are the fused products of the generator parameters and
//! the unit price, so `c0` is in cost-units/h, `c1` in cost-units/kWh and
//! `c2` in cost-units·h/kWh². Costs carry no currency.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CustomerId(String);

impl CustomerId {
    pub fn new(id: impl Into<String>) -> Self {
        CustomerId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CustomerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<String> for CustomerId {
    fn from(s: String) -> Self {
        CustomerId(s)
    }
}

impl From<&str> for CustomerId {
    fn from(s: &str) -> Self {
        CustomerId(s.to_owned())
    }
}

/// One contracted generator: average-power bounds and fused cost coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticipatingCustomer {
    id: CustomerId,
    p_min: f64,
    p_max: f64,
    c0: f64,
    c1: f64,
    c2: f64,
}

impl ParticipatingCustomer {
    /// Requires `0 < p_min < p_max`, `c2 > 0`, `c1 >= 0` and `c0 >= 0`, all finite.
    pub fn new(
        id: impl Into<CustomerId>,
        p_min: f64,
        p_max: f64,
        c0: f64,
        c1: f64,
        c2: f64,
    ) -> Result<Self> {
        let id = id.into();
        for (name, v) in [
            ("p_min", p_min),
            ("p_max", p_max),
            ("c0", c0),
            ("c1", c1),
            ("c2", c2),
        ] {
            if !v.is_finite() {
                return Err(domain(format!(
                    "customer {id}: {name} must be finite, got {v}"
                )));
            }
        }
        if p_min <= 0.0 {
            return Err(domain(format!(
                "customer {id}: p_min must be > 0 kW, got {p_min}"
            )));
        }
        if p_max <= p_min {
            return Err(domain(format!(
                "customer {id}: p_max ({p_max} kW) must exceed p_min ({p_min} kW)"
            )));
        }
        if c2 <= 0.0 {
            return Err(domain(format!("customer {id}: c2 must be > 0, got {c2}")));
        }
        if c1 < 0.0 {
            return Err(domain(format!("customer {id}: c1 must be >= 0, got {c1}")));
        }
        if c0 < 0.0 {
            return Err(domain(format!("customer {id}: c0 must be >= 0, got {c0}")));
        }
        Ok(ParticipatingCustomer {
            id,
            p_min,
            p_max,
            c0,
            c1,
            c2,
        })
    }

    pub fn id(&self) -> &CustomerId {
        &self.id
    }
    pub fn p_min(&self) -> f64 {
        self.p_min
    }
    pub fn p_max(&self) -> f64 {
        self.p_max
    }
    pub fn c0(&self) -> f64 {
        self.c0
    }
    pub fn c1(&self) -> f64 {
        self.c1
    }
    pub fn c2(&self) -> f64 {
        self.c2
    }

    /// Energy bounds `[t·p_min, t·p_max]` in kWh.
    pub fn energy_bounds(&self, t: f64) -> (f64, f64) {
        (t * self.p_min, t * self.p_max)
    }

    pub fn evaluate_cost(&self, e: f64, t: f64) -> Result<f64> {
        check_energy_and_horizon(e, t)?;
        Ok(self.cost_unchecked(e, t))
    }

    pub fn marginal_cost(&self, e: f64, t: f64) -> Result<f64> {
        check_energy_and_horizon(e, t)?;
        Ok(self.marginal_unchecked(e, t))
    }

    /// Energy whose marginal cost equals `price`, clamped to the energy bounds.
    pub fn inverse_marginal_cost(&self, price: f64, t: f64) -> Result<f64> {
        if !price.is_finite() {
            return Err(domain(format!("price must be finite, got {price}")));
        }
        check_horizon(t)?;
        Ok(self.inverse_marginal_unchecked(price, t))
    }

    pub(crate) fn cost_unchecked(&self, e: f64, t: f64) -> f64 {
        let p = e / t;
        t * (self.c2 * p * p + self.c1 * p + self.c0)
    }

    pub(crate) fn marginal_unchecked(&self, e: f64, t: f64) -> f64 {
        2.0 * self.c2 * (e / t) + self.c1
    }

    pub(crate) fn inverse_marginal_unchecked(&self, price: f64, t: f64) -> f64 {
        let (lo, hi) = self.energy_bounds(t);
        let e = t * (price - self.c1) / (2.0 * self.c2);
        e.clamp(lo, hi)
    }
}

fn check_horizon(t: f64) -> Result<()> {
    if !t.is_finite() || t <= 0.0 {
        return Err(domain(format!("horizon must be finite and > 0 h, got {t}")));
    }
    Ok(())
}

fn check_energy_and_horizon(e: f64, t: f64) -> Result<()> {
    if !e.is_finite() || e < 0.0 {
        return Err(domain(format!(
            "energy must be finite and >= 0 kWh, got {e}"
        )));
    }
    check_horizon(t)
}

/// Free-function form of [`ParticipatingCustomer::evaluate_cost`].
pub fn evaluate_cost(pc: &ParticipatingCustomer, e: f64, t: f64) -> Result<f64> {
    pc.evaluate_cost(e, t)
}

pub fn marginal_cost(pc: &ParticipatingCustomer, e: f64, t: f64) -> Result<f64> {
    pc.marginal_cost(e, t)
}

pub fn inverse_marginal_cost(pc: &ParticipatingCustomer, price: f64, t: f64) -> Result<f64> {
    pc.inverse_marginal_cost(price, t)
}

/// Customer fleet, program duration, shortage demand and scalarization weight.
#[derive(Debug, Clone, PartialEq)]
pub struct DispatchProblem {
    customers: Vec<ParticipatingCustomer>,
    horizon_t: f64,
    demand_e: f64,
    lambda: f64,
}

impl DispatchProblem {
    pub fn new(
        customers: Vec<ParticipatingCustomer>,
        horizon_t: f64,
        demand_e: f64,
        lambda: f64,
    ) -> Result<Self> {
        if customers.is_empty() {
            return Err(domain("problem needs at least one customer"));
        }
        check_horizon(horizon_t)?;
        check_demand(demand_e)?;
        check_lambda(lambda)?;
        let mut seen = HashSet::with_capacity(customers.len());
        for c in &customers {
            if !seen.insert(c.id()) {
                return Err(domain(format!("duplicate customer id {}", c.id())));
            }
        }
        Ok(DispatchProblem {
            customers,
            horizon_t,
            demand_e,
            lambda,
        })
    }

    pub fn customers(&self) -> &[ParticipatingCustomer] {
        &self.customers
    }
    pub fn len(&self) -> usize {
        self.customers.len()
    }
    pub fn is_empty(&self) -> bool {
        self.customers.is_empty()
    }
    pub fn horizon_t(&self) -> f64 {
        self.horizon_t
    }
    pub fn demand_e(&self) -> f64 {
        self.demand_e
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn with_demand(&self, demand_e: f64) -> Result<Self> {
        check_demand(demand_e)?;
        Ok(DispatchProblem {
            demand_e,
            ..self.clone()
        })
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(DispatchProblem {
            lambda,
            ..self.clone()
        })
    }

    /// `T·Σp_min` in kWh.
    pub fn capacity_min(&self) -> f64 {
        self.horizon_t * self.customers.iter().map(|c| c.p_min).sum::<f64>()
    }

    /// `T·Σp_max` in kWh.
    pub fn capacity_max(&self) -> f64 {
        self.horizon_t * self.customers.iter().map(|c| c.p_max).sum::<f64>()
    }

    /// Total cost of an energy vector, without bounds checking.
    pub fn total_cost(&self, energies: &[f64]) -> f64 {
        self.customers
            .iter()
            .zip(energies)
            .map(|(c, &e)| c.cost_unchecked(e, self.horizon_t))
            .sum()
    }
}

fn check_demand(demand_e: f64) -> Result<()> {
    if !demand_e.is_finite() || demand_e < 0.0 {
        return Err(domain(format!(
            "demand must be finite and >= 0 kWh, got {demand_e}"
        )));
    }
    Ok(())
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(domain(format!("lambda must lie in [0, 1], got {lambda}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundStatus {
    AtLower,
    Interior,
    AtUpper,
}

impl BoundStatus {
    pub fn classify(e: f64, lo: f64, hi: f64) -> Self {
        if e <= lo {
            BoundStatus::AtLower
        } else if e >= hi {
            BoundStatus::AtUpper
        } else {
            BoundStatus::Interior
        }
    }
}

impl fmt::Display for BoundStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundStatus::AtLower => "AtLower",
            BoundStatus::Interior => "Interior",
            BoundStatus::AtUpper => "AtUpper",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DispatchSolution {
    pub energies: Vec<f64>,
    pub total_energy: f64,
    pub total_cost: f64,
    /// Dual value of the market-clearing constraint, cost-units/kWh.
    pub coupling_multiplier: f64,
    pub bound_status: Vec<BoundStatus>,
    /// Largest stationarity violation, cost-units/kWh.
    pub kkt_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// Demand below `T·Σp_min`: no dispatch can stay this low.
    BelowMinimum,
    EqualityFeasible,
    /// Demand above `T·Σp_max`: the fleet cannot clear the shortage.
    Deficit,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::BelowMinimum => "BelowMinimum",
            Regime::EqualityFeasible => "EqualityFeasible",
            Regime::Deficit => "Deficit",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeReport {
    pub regime: Regime,
    pub capacity_max: f64,
    pub capacity_min: f64,
    pub demand_e: f64,
}

pub fn classify_regime(problem: &DispatchProblem) -> RegimeReport {
    let capacity_min = problem.capacity_min();
    let capacity_max = problem.capacity_max();
    let demand_e = problem.demand_e();
    let regime = if capacity_max < demand_e {
        Regime::Deficit
    } else if demand_e < capacity_min {
        Regime::BelowMinimum
    } else {
        Regime::EqualityFeasible
    };
    RegimeReport {
        regime,
        capacity_max,
        capacity_min,
        demand_e,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParetoPoint {
    /// First λ of the (possibly collapsed) interval producing this outcome.
    pub lambda: f64,
    /// Last λ of the interval; equal to `lambda` for an isolated sample.
    pub lambda_end: f64,
    pub total_cost: f64,
    pub total_energy: f64,
    pub energies: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture::reference_fleet;
    use approx::assert_relative_eq;

    fn pc(i: usize) -> ParticipatingCustomer {
        reference_fleet().customers()[i].clone()
    }

    #[test]
    fn cost_examples() {
        assert_relative_eq!(
            pc(0).evaluate_cost(30.0, 1.0).unwrap(),
            361.5,
            epsilon = 1e-9
        );
        assert_relative_eq!(
            pc(3).evaluate_cost(85.0, 1.0).unwrap(),
            1078.4547,
            epsilon = 1e-9
        );
        for i in 0..5 {
            assert_eq!(pc(i).evaluate_cost(0.0, 1.0).unwrap(), pc(i).c0());
        }
    }

    #[test]
    fn marginal_examples() {
        assert_relative_eq!(
            pc(0).marginal_cost(30.0, 1.0).unwrap(),
            10.072,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            pc(4).marginal_cost(130.0, 1.0).unwrap(),
            19.594,
            epsilon = 1e-12
        );
        assert_eq!(pc(2).marginal_cost(0.0, 1.0).unwrap(), pc(2).c1());
    }

    #[test]
    fn inverse_marginal_examples() {
        assert_relative_eq!(
            pc(0).inverse_marginal_cost(10.072, 1.0).unwrap(),
            30.0,
            epsilon = 1e-9
        );
        assert_eq!(pc(0).inverse_marginal_cost(0.0, 1.0).unwrap(), 30.0);
        assert_eq!(pc(0).inverse_marginal_cost(1000.0, 1.0).unwrap(), 60.0);
    }

    #[test]
    fn cost_rejects_bad_inputs() {
        let c = pc(0);
        assert!(matches!(
            c.evaluate_cost(-1.0, 1.0),
            Err(crate::DispatchError::InputDomain(_))
        ));
        assert!(c.evaluate_cost(f64::NAN, 1.0).is_err());
        assert!(c.evaluate_cost(1.0, 0.0).is_err());
        assert!(c.marginal_cost(1.0, f64::INFINITY).is_err());
        assert!(c.inverse_marginal_cost(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn customer_invariants() {
        assert!(ParticipatingCustomer::new("a", 0.0, 10.0, 1.0, 1.0, 1.0).is_err());
        assert!(ParticipatingCustomer::new("a", 10.0, 10.0, 1.0, 1.0, 1.0).is_err());
        assert!(ParticipatingCustomer::new("a", 1.0, 10.0, 1.0, 1.0, 0.0).is_err());
        assert!(ParticipatingCustomer::new("a", 1.0, 10.0, 1.0, -0.1, 1.0).is_err());
        assert!(ParticipatingCustomer::new("a", 1.0, 10.0, -1.0, 1.0, 1.0).is_err());
        assert!(ParticipatingCustomer::new("a", 1.0, f64::NAN, 1.0, 1.0, 1.0).is_err());
        assert!(ParticipatingCustomer::new("a", 1.0, 10.0, 0.0, 0.0, 0.5).is_ok());
    }

    #[test]
    fn problem_invariants() {
        let fleet = reference_fleet();
        let cs = fleet.customers().to_vec();
        assert!(DispatchProblem::new(vec![], 1.0, 1.0, 0.5).is_err());
        assert!(DispatchProblem::new(cs.clone(), 0.0, 1.0, 0.5).is_err());
        assert!(DispatchProblem::new(cs.clone(), 1.0, -1.0, 0.5).is_err());
        assert!(DispatchProblem::new(cs.clone(), 1.0, 1.0, 1.5).is_err());
        assert!(DispatchProblem::new(cs.clone(), 1.0, 1.0, -0.0).is_ok());
        let mut dup = cs.clone();
        dup.push(cs[0].clone());
        assert!(DispatchProblem::new(dup, 1.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn regime_examples() {
        let fleet = reference_fleet();
        assert_eq!(
            classify_regime(&fleet.with_demand(700.0).unwrap()).regime,
            Regime::Deficit
        );
        assert_eq!(
            classify_regime(&fleet.with_demand(500.0).unwrap()).regime,
            Regime::EqualityFeasible
        );
        assert_eq!(
            classify_regime(&fleet.with_demand(150.0).unwrap()).regime,
            Regime::EqualityFeasible
        );
        assert_eq!(
            classify_regime(&fleet.with_demand(100.0).unwrap()).regime,
            Regime::BelowMinimum
        );
        let r = classify_regime(&fleet);
        assert_eq!(r.capacity_max, 500.0);
        assert_eq!(r.capacity_min, 150.0);
    }
}
