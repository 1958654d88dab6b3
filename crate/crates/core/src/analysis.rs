//! Parameter sweeps and Pareto-frontier extraction.

use rayon::prelude::*;

use crate::error::{domain, DispatchError, Result};
use crate::model::{
    classify_regime, BoundStatus, DispatchProblem, DispatchSolution, ParetoPoint, Regime,
};
use crate::solver::{solve_cost_dispatch, solve_multiobjective, SolverConfig};

pub const DEFAULT_LAMBDA_STEP: f64 = 0.001;
pub const DEFAULT_DEMAND_STEP: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    Lambda,
    /// Shortage demand in kWh.
    Demand,
}

impl SweepParameter {
    pub fn column_name(self) -> &'static str {
        match self {
            SweepParameter::Lambda => "lambda",
            SweepParameter::Demand => "demand_kwh",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl SweepSpec {
    pub fn new(parameter: SweepParameter, start: f64, stop: f64, step: f64) -> Result<Self> {
        let spec = SweepSpec {
            parameter,
            start,
            stop,
            step,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if ![self.start, self.stop, self.step]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err(domain("sweep bounds and step must be finite"));
        }
        if self.step <= 0.0 {
            return Err(domain(format!("sweep step must be > 0, got {}", self.step)));
        }
        if self.start > self.stop {
            return Err(domain(format!(
                "sweep start {} exceeds stop {}",
                self.start, self.stop
            )));
        }
        if self.parameter == SweepParameter::Lambda && (self.start < 0.0 || self.stop > 1.0) {
            return Err(domain(format!(
                "lambda sweep [{}, {}] must lie within [0, 1]",
                self.start, self.stop
            )));
        }
        Ok(())
    }

    /// Sample points `start + k·step`, computed by index so no error accumulates.
    /// The last point is `stop` when the range is a whole number of steps.
    pub fn values(&self) -> Vec<f64> {
        let span = (self.stop - self.start) / self.step;
        let n = (span + 1e-9).floor() as usize;
        (0..=n)
            .map(|k| {
                if k == n && (span - n as f64).abs() < 1e-9 {
                    self.stop
                } else {
                    self.start + k as f64 * self.step
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub solution: DispatchSolution,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StatusChange {
    pub customer: usize,
    pub from: BoundStatus,
    pub to: BoundStatus,
}

/// First sampled parameter value at which one or more customers changed bound status.
#[derive(Debug, Clone, PartialEq)]
pub struct Breakpoint {
    pub value: f64,
    pub row: usize,
    pub changes: Vec<StatusChange>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub parameter: SweepParameter,
    pub rows: Vec<SweepRow>,
    pub breakpoints: Vec<Breakpoint>,
}

impl SweepResult {
    fn from_rows(parameter: SweepParameter, rows: Vec<SweepRow>) -> Self {
        let breakpoints = rows
            .windows(2)
            .enumerate()
            .filter_map(|(i, w)| {
                let changes: Vec<StatusChange> = w[0]
                    .solution
                    .bound_status
                    .iter()
                    .zip(&w[1].solution.bound_status)
                    .enumerate()
                    .filter(|(_, (a, b))| a != b)
                    .map(|(customer, (&from, &to))| StatusChange { customer, from, to })
                    .collect();
                (!changes.is_empty()).then(|| Breakpoint {
                    value: w[1].value,
                    row: i + 1,
                    changes,
                })
            })
            .collect();
        SweepResult {
            parameter,
            rows,
            breakpoints,
        }
    }

    /// First breakpoint at which `customer` moved from `from` to something else.
    pub fn first_departure(&self, customer: usize, from: BoundStatus) -> Option<f64> {
        self.breakpoints
            .iter()
            .find(|b| {
                b.changes
                    .iter()
                    .any(|c| c.customer == customer && c.from == from)
            })
            .map(|b| b.value)
    }

    /// First breakpoint at which `customer` arrived at `to`.
    pub fn first_arrival(&self, customer: usize, to: BoundStatus) -> Option<f64> {
        self.breakpoints
            .iter()
            .find(|b| {
                b.changes
                    .iter()
                    .any(|c| c.customer == customer && c.to == to)
            })
            .map(|b| b.value)
    }
}

fn run_rows<F>(values: Vec<f64>, solve: F) -> Result<Vec<SweepRow>>
where
    F: Fn(f64) -> Result<DispatchSolution> + Sync,
{
    // Ordered collect: rows come back in parameter order whatever the scheduling.
    let solved: Vec<Result<DispatchSolution>> = values.par_iter().map(|&v| solve(v)).collect();
    values
        .into_iter()
        .zip(solved)
        .map(|(value, r)| r.map(|solution| SweepRow { value, solution }))
        .collect()
}

/// Weighted dispatch at each λ on the grid, demand held fixed.
pub fn sweep_lambda(
    problem: &DispatchProblem,
    spec: &SweepSpec,
    cfg: &SolverConfig,
) -> Result<SweepResult> {
    spec.validate()?;
    if spec.parameter != SweepParameter::Lambda {
        return Err(domain("sweep_lambda needs a Lambda sweep spec"));
    }
    let rows = run_rows(spec.values(), |lambda| {
        let p = problem.with_lambda(lambda)?;
        solve_multiobjective(&p, cfg).map_err(|e| at_point("lambda", lambda, e))
    })?;
    Ok(SweepResult::from_rows(SweepParameter::Lambda, rows))
}

/// Least-cost dispatch at each demand on the grid.
pub fn sweep_demand(
    problem: &DispatchProblem,
    spec: &SweepSpec,
    cfg: &SolverConfig,
) -> Result<SweepResult> {
    spec.validate()?;
    if spec.parameter != SweepParameter::Demand {
        return Err(domain("sweep_demand needs a Demand sweep spec"));
    }
    let values = spec.values();
    for &v in &values {
        let report = classify_regime(&problem.with_demand(v)?);
        if report.regime != Regime::EqualityFeasible {
            return Err(DispatchError::Infeasible {
                regime: report.regime,
                reason: format!(
                    "sweep point demand = {v} kWh lies outside [{}, {}] kWh",
                    report.capacity_min, report.capacity_max
                ),
            });
        }
    }
    let rows = run_rows(values, |demand| {
        let p = problem.with_demand(demand)?;
        solve_cost_dispatch(&p, cfg).map_err(|e| at_point("demand", demand, e))
    })?;
    Ok(SweepResult::from_rows(SweepParameter::Demand, rows))
}

fn at_point(name: &str, value: f64, err: DispatchError) -> DispatchError {
    match err {
        DispatchError::InputDomain(m) => {
            DispatchError::InputDomain(format!("at {name} = {value}: {m}"))
        }
        DispatchError::Numerical(m) => {
            DispatchError::Numerical(format!("at {name} = {value}: {m}"))
        }
        DispatchError::Infeasible { regime, reason } => DispatchError::Infeasible {
            regime,
            reason: format!("at {name} = {value}: {reason}"),
        },
    }
}

/// One frontier point per λ, sorted by λ; runs of identical outcomes are
/// merged into a single point spanning `[lambda, lambda_end]`.
pub fn pareto_frontier(
    problem: &DispatchProblem,
    lambda_grid: &[f64],
    cfg: &SolverConfig,
) -> Result<Vec<ParetoPoint>> {
    let mut grid = lambda_grid.to_vec();
    if let Some(bad) = grid.iter().find(|l| !(0.0..=1.0).contains(*l)) {
        return Err(domain(format!("frontier lambda {bad} outside [0, 1]")));
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let rows = run_rows(grid, |lambda| {
        let p = problem.with_lambda(lambda)?;
        solve_multiobjective(&p, cfg).map_err(|e| at_point("lambda", lambda, e))
    })?;

    let mut out: Vec<ParetoPoint> = Vec::new();
    for row in rows {
        let s = row.solution;
        if let Some(last) = out.last_mut() {
            if same_outcome(last, &s) {
                last.lambda_end = row.value;
                continue;
            }
        }
        out.push(ParetoPoint {
            lambda: row.value,
            lambda_end: row.value,
            total_cost: s.total_cost,
            total_energy: s.total_energy,
            energies: s.energies,
        });
    }
    Ok(out)
}

fn same_outcome(p: &ParetoPoint, s: &DispatchSolution) -> bool {
    const TOL: f64 = 1e-9;
    (p.total_energy - s.total_energy).abs() <= TOL
        && (p.total_cost - s.total_cost).abs() <= TOL * p.total_cost.abs().max(1.0)
}

/// Evenly spaced λ grid with `points` samples over `[0, 1]`.
pub fn uniform_lambda_grid(points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(domain(format!(
            "lambda grid needs at least 2 points, got {points}"
        )));
    }
    let last = (points - 1) as f64;
    Ok((0..points).map(|k| k as f64 / last).collect())
}
