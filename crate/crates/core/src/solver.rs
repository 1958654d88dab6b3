//! Dual-bisection solvers for the three dispatch problems.
//!
//! All three problems are separable convex programs with box constraints and
//! a single coupling constraint on total energy. For a fixed price on that
//! constraint every customer's best response is its clamped inverse marginal
//! cost, so the optimum reduces to a one-dimensional monotone root search.

use crate::error::{DispatchError, Result};
use crate::model::{
    classify_regime, BoundStatus, DispatchProblem, DispatchSolution, ParticipatingCustomer, Regime,
};

/// Number of times a bracket may be doubled before the search gives up.
const MAX_BRACKET_EXPANSIONS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Tolerance on the coupling-constraint residual, kWh.
    pub bisection_tol: f64,
    pub max_iters: usize,
    /// Largest accepted stationarity residual, cost-units/kWh.
    pub kkt_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            bisection_tol: 1e-9,
            max_iters: 200,
            kkt_tol: 1e-6,
        }
    }
}

impl SolverConfig {
    pub fn new(bisection_tol: f64, max_iters: usize, kkt_tol: f64) -> Result<Self> {
        let cfg = SolverConfig {
            bisection_tol,
            max_iters,
            kkt_tol,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.bisection_tol > 0.0 && self.bisection_tol.is_finite()) {
            return Err(DispatchError::InputDomain(format!(
                "bisection_tol must be finite and > 0, got {}",
                self.bisection_tol
            )));
        }
        if !(self.kkt_tol > 0.0 && self.kkt_tol.is_finite()) {
            return Err(DispatchError::InputDomain(format!(
                "kkt_tol must be finite and > 0, got {}",
                self.kkt_tol
            )));
        }
        if self.max_iters == 0 {
            return Err(DispatchError::InputDomain("max_iters must be >= 1".into()));
        }
        Ok(())
    }
}

/// Per-customer best responses to a marginal price, clamped to the boxes.
fn responses(customers: &[ParticipatingCustomer], t: f64, price: f64) -> Vec<f64> {
    customers
        .iter()
        .map(|c| c.inverse_marginal_unchecked(price, t))
        .collect()
}

fn supply_at(customers: &[ParticipatingCustomer], t: f64, price: f64) -> f64 {
    customers
        .iter()
        .map(|c| c.inverse_marginal_unchecked(price, t))
        .sum()
}

/// Finds a marginal price at which the fleet's clamped supply equals `target`.
///
/// `lo`/`hi` is the starting bracket; it is doubled outward (at most
/// [`MAX_BRACKET_EXPANSIONS`] times) if the residual does not change sign.
/// Returns the price together with the energy vector it induces.
pub fn clear_market(
    customers: &[ParticipatingCustomer],
    t: f64,
    target: f64,
    mut lo: f64,
    mut hi: f64,
    cfg: &SolverConfig,
) -> Result<(f64, Vec<f64>)> {
    cfg.validate()?;
    let residual = |p: f64| supply_at(customers, t, p) - target;

    let mut expansions = 0;
    let tol = cfg.bisection_tol;
    while residual(lo) > tol || residual(hi) < -tol {
        if expansions == MAX_BRACKET_EXPANSIONS {
            return Err(DispatchError::Numerical(format!(
                "could not bracket the clearing price for {target} kWh within [{lo}, {hi}]"
            )));
        }
        let width = (hi - lo).max(1.0);
        if residual(lo) > tol {
            lo -= width;
        }
        if residual(hi) < -tol {
            hi += width;
        }
        expansions += 1;
    }

    let mut price = if residual(lo).abs() <= tol {
        lo
    } else if residual(hi).abs() <= tol {
        hi
    } else {
        let mut converged = None;
        for _ in 0..cfg.max_iters {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let r = residual(mid);
            if r.abs() <= cfg.bisection_tol {
                converged = Some(mid);
                break;
            }
            if r < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        match converged {
            Some(p) => p,
            None => {
                let mid = 0.5 * (lo + hi);
                if residual(mid).abs() > cfg.bisection_tol {
                    return Err(DispatchError::Numerical(format!(
                        "dual bisection did not reach {} kWh within {} iterations (residual {:e})",
                        cfg.bisection_tol,
                        cfg.max_iters,
                        residual(mid)
                    )));
                }
                mid
            }
        }
    };

    // Newton step on the piecewise-affine supply curve with the active set frozen.
    let energies = responses(customers, t, price);
    let (mut slope, mut intercept) = (0.0, 0.0);
    for (c, &e) in customers.iter().zip(&energies) {
        let (elo, ehi) = c.energy_bounds(t);
        if e > elo && e < ehi {
            slope += t / (2.0 * c.c2());
            intercept += t * c.c1() / (2.0 * c.c2());
        } else {
            intercept -= e;
        }
    }
    if slope > 0.0 {
        let polished = (target + intercept) / slope;
        if polished.is_finite() && residual(polished).abs() <= residual(price).abs() {
            price = polished;
        }
    }
    Ok((price, responses(customers, t, price)))
}

fn statuses(problem: &DispatchProblem, energies: &[f64]) -> Vec<BoundStatus> {
    let t = problem.horizon_t();
    problem
        .customers()
        .iter()
        .zip(energies)
        .map(|(c, &e)| {
            let (lo, hi) = c.energy_bounds(t);
            BoundStatus::classify(e, lo, hi)
        })
        .collect()
}

/// Largest violation of the sign conditions on per-customer gradients
/// `g_i` of the Lagrangian: `g = 0` interior, `g >= 0` at the lower bound,
/// `g <= 0` at the upper bound.
fn stationarity_residual(gradients: impl Iterator<Item = f64>, status: &[BoundStatus]) -> f64 {
    gradients
        .zip(status)
        .map(|(g, s)| match s {
            BoundStatus::Interior => g.abs(),
            BoundStatus::AtLower => (-g).max(0.0),
            BoundStatus::AtUpper => g.max(0.0),
        })
        .fold(0.0, f64::max)
}

fn assemble(
    problem: &DispatchProblem,
    energies: Vec<f64>,
    multiplier: f64,
    kkt: f64,
) -> DispatchSolution {
    let bound_status = statuses(problem, &energies);
    DispatchSolution {
        total_energy: energies.iter().sum(),
        total_cost: problem.total_cost(&energies),
        coupling_multiplier: multiplier,
        bound_status,
        kkt_residual: kkt,
        energies,
    }
}

fn certify(sol: DispatchSolution, cfg: &SolverConfig) -> Result<DispatchSolution> {
    if sol.kkt_residual.is_nan() || sol.kkt_residual > cfg.kkt_tol {
        return Err(DispatchError::Numerical(format!(
            "stationarity residual {:e} exceeds kkt_tol {:e}",
            sol.kkt_residual, cfg.kkt_tol
        )));
    }
    Ok(sol)
}

fn infeasible(report: &crate::model::RegimeReport) -> DispatchError {
    let reason = match report.regime {
        Regime::Deficit => format!(
            "demand {} kWh exceeds fleet capacity T*sum(p_max) = {} kWh, so no dispatch clears the market",
            report.demand_e, report.capacity_max
        ),
        Regime::BelowMinimum => format!(
            "demand {} kWh is below the fleet minimum T*sum(p_min) = {} kWh",
            report.demand_e, report.capacity_min
        ),
        Regime::EqualityFeasible => unreachable!("feasible regime reported as infeasible"),
    };
    DispatchError::Infeasible {
        regime: report.regime,
        reason,
    }
}

/// Least-cost dispatch with `Σ e_i = demand` (market clearing as equality).
pub fn solve_cost_dispatch(
    problem: &DispatchProblem,
    cfg: &SolverConfig,
) -> Result<DispatchSolution> {
    let report = classify_regime(problem);
    if report.regime != Regime::EqualityFeasible {
        return Err(infeasible(&report));
    }
    cost_dispatch_at(problem, problem.demand_e(), cfg)
}

fn cost_dispatch_at(
    problem: &DispatchProblem,
    target: f64,
    cfg: &SolverConfig,
) -> Result<DispatchSolution> {
    let t = problem.horizon_t();
    let cs = problem.customers();
    let lo = cs.iter().map(|c| c.c1()).fold(f64::INFINITY, f64::min);
    let hi = cs
        .iter()
        .map(|c| c.marginal_unchecked(c.energy_bounds(t).1, t))
        .fold(f64::NEG_INFINITY, f64::max);
    let (mut price, energies) = clear_market(cs, t, target, lo, hi, cfg)?;
    let status = statuses(problem, &energies);

    // With no interior customer any price between the binding marginal costs
    // certifies the point; pick the one closest to the search result.
    if !status.contains(&BoundStatus::Interior) {
        let mut floor = f64::NEG_INFINITY;
        let mut ceil = f64::INFINITY;
        for ((c, &e), s) in cs.iter().zip(&energies).zip(&status) {
            let mc = c.marginal_unchecked(e, t);
            match s {
                BoundStatus::AtUpper => floor = floor.max(mc),
                BoundStatus::AtLower => ceil = ceil.min(mc),
                BoundStatus::Interior => {}
            }
        }
        if floor <= ceil {
            price = price.clamp(floor, ceil);
        }
    }

    let gradients = cs
        .iter()
        .zip(&energies)
        .map(|(c, &e)| c.marginal_unchecked(e, t) - price);
    let kkt = stationarity_residual(gradients, &status);
    certify(assemble(problem, energies, price, kkt), cfg)
}

/// Resilience dispatch: maximise `Σ e_i` subject to `Σ e_i <= demand`.
///
/// In deficit the optimum is unique (every customer at its upper bound).
/// Otherwise the maximisers form a face of the box and the least-cost point
/// at `Σ e_i = min(demand, T·Σp_max)` is returned as the representative.
pub fn solve_resilience_dispatch(
    problem: &DispatchProblem,
    cfg: &SolverConfig,
) -> Result<DispatchSolution> {
    cfg.validate()?;
    let report = classify_regime(problem);
    match report.regime {
        Regime::BelowMinimum => Err(infeasible(&report)),
        Regime::Deficit => {
            let t = problem.horizon_t();
            let energies: Vec<f64> = problem
                .customers()
                .iter()
                .map(|c| c.energy_bounds(t).1)
                .collect();
            // Coupling constraint is slack, so its multiplier is zero and each
            // gradient of -Σe is -1 <= 0 at the upper bound.
            Ok(assemble(problem, energies, 0.0, 0.0))
        }
        Regime::EqualityFeasible => {
            cost_dispatch_at(problem, problem.demand_e().min(report.capacity_max), cfg)
        }
    }
}

/// Weighted dispatch minimising `λ·ΣC_i − (1−λ)·Σe_i` subject to the boxes and
/// `Σ e_i <= demand`.
pub fn solve_multiobjective(
    problem: &DispatchProblem,
    cfg: &SolverConfig,
) -> Result<DispatchSolution> {
    cfg.validate()?;
    let lambda = problem.lambda();
    if !(0.0..=1.0).contains(&lambda) {
        return Err(DispatchError::InputDomain(format!(
            "lambda must lie in [0, 1], got {lambda}"
        )));
    }
    if lambda == 0.0 {
        return solve_resilience_dispatch(problem, cfg);
    }
    let report = classify_regime(problem);
    if report.regime == Regime::BelowMinimum {
        return Err(infeasible(&report));
    }

    let t = problem.horizon_t();
    let cs = problem.customers();
    let demand = problem.demand_e();
    // Stationarity of λ·C_i'(e) − (1−λ) + μ = 0 gives a marginal price of (1−λ−μ)/λ.
    let price_of = |mu: f64| (1.0 - lambda - mu) / lambda;

    let free = responses(cs, t, price_of(0.0));
    let (energies, mu) = if free.iter().sum::<f64>() <= demand {
        (free, 0.0)
    } else {
        // Supply decreases in μ, so search on the price and map back.
        let (price, energies) = clear_market(cs, t, demand, price_of(1.0), price_of(0.0), cfg)?;
        (energies, (1.0 - lambda - lambda * price).max(0.0))
    };

    let status = statuses(problem, &energies);
    let gradients = cs
        .iter()
        .zip(&energies)
        .map(|(c, &e)| lambda * c.marginal_unchecked(e, t) - (1.0 - lambda) + mu);
    let kkt = stationarity_residual(gradients, &status);
    certify(assemble(problem, energies, mu, kkt), cfg)
}

/// Checks that pure cost weighting (λ = 1) drives every customer to its
/// minimum output `T·p_min`, within 1e-9 kWh.
pub fn verify_cost_weight_floor(problem: &DispatchProblem) -> Result<bool> {
    let p = problem.with_lambda(1.0)?;
    let sol = solve_multiobjective(&p, &SolverConfig::default())?;
    let t = p.horizon_t();
    Ok(p.customers()
        .iter()
        .zip(&sol.energies)
        .all(|(c, &e)| (e - c.energy_bounds(t).0).abs() <= 1e-9))
}
