//! Exhaustive grid search used to validate the solvers.
//!
//! Each customer's energy is restricted to the lattice
//! `T·p_min + k·resolution` inside its box. Because every lattice offset is
//! fixed, the total energy of any grid point is `Σ T·p_min + K·resolution`
//! for an integer `K`, and the exact minimum over the full product grid can be
//! found by min-plus accumulation over `K` one customer at a time. No
//! marginal-cost or dual reasoning is involved.

use crate::error::{domain, Result};
use crate::model::{BoundStatus, DispatchProblem, DispatchSolution};

/// Cap on state transitions of the enumeration.
pub const MAX_GRID_WORK: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleConstraint {
    /// Total energy must equal demand to within half a grid step.
    Equality,
    /// Total energy at most demand; objective `λ·ΣC − (1−λ)·Σe`.
    Relaxed,
}

/// Grid-optimal dispatch for `problem` at the given resolution (kWh).
///
/// The returned solution carries `coupling_multiplier = NaN` and
/// `kkt_residual = NaN`: a lattice point has no dual certificate.
pub fn brute_force_oracle(
    problem: &DispatchProblem,
    resolution: f64,
    constraint: OracleConstraint,
) -> Result<DispatchSolution> {
    if !(resolution.is_finite() && resolution > 0.0) {
        return Err(domain(format!(
            "resolution must be finite and > 0, got {resolution}"
        )));
    }
    let t = problem.horizon_t();
    let lambda = problem.lambda();
    let customers = problem.customers();

    let steps: Vec<usize> = customers
        .iter()
        .map(|c| {
            let (lo, hi) = c.energy_bounds(t);
            ((hi - lo) / resolution + 1e-9).floor() as usize
        })
        .collect();
    let max_k: usize = steps.iter().sum();
    let work: f64 = steps
        .iter()
        .map(|&s| (s + 1) as f64 * (max_k + 1) as f64)
        .sum();
    if work > MAX_GRID_WORK {
        return Err(domain(format!(
            "grid search at resolution {resolution} kWh needs {work:.3e} steps (limit {MAX_GRID_WORK:.0e})"
        )));
    }

    let base: f64 = customers.iter().map(|c| c.energy_bounds(t).0).sum();
    let objective = |i: usize, e: f64| {
        let cost = customers[i].cost_unchecked(e, t);
        match constraint {
            OracleConstraint::Equality => cost,
            OracleConstraint::Relaxed => lambda * cost - (1.0 - lambda) * e,
        }
    };
    let energy = |i: usize, k: usize| customers[i].energy_bounds(t).0 + k as f64 * resolution;

    // best[K] = minimal objective over the customers seen so far with grid-sum index K.
    let mut best = vec![f64::INFINITY; max_k + 1];
    best[0] = 0.0;
    let mut reach = 0;
    let mut choices: Vec<Vec<usize>> = Vec::with_capacity(customers.len());
    for (i, &s) in steps.iter().enumerate() {
        let values: Vec<f64> = (0..=s).map(|k| objective(i, energy(i, k))).collect();
        let mut next = vec![f64::INFINITY; max_k + 1];
        let mut arg = vec![0usize; max_k + 1];
        for (prev_k, &prev) in best.iter().enumerate().take(reach + 1) {
            if !prev.is_finite() {
                continue;
            }
            for (k, &v) in values.iter().enumerate() {
                let cand = prev + v;
                if cand < next[prev_k + k] {
                    next[prev_k + k] = cand;
                    arg[prev_k + k] = k;
                }
            }
        }
        reach += s;
        best = next;
        choices.push(arg);
    }

    let demand = problem.demand_e();
    let target_k = match constraint {
        OracleConstraint::Equality => {
            let k = ((demand - base) / resolution).round();
            if k < 0.0
                || k > max_k as f64
                || (base + k * resolution - demand).abs() > 0.5 * resolution + 1e-9
            {
                return Err(domain(format!(
                    "no grid point sums to {demand} kWh at resolution {resolution} kWh"
                )));
            }
            k as usize
        }
        OracleConstraint::Relaxed => {
            if demand < base {
                return Err(domain(format!(
                    "no grid point has total energy <= {demand} kWh"
                )));
            }
            let limit = (((demand - base) / resolution + 1e-9).floor() as usize).min(max_k);
            (0..=limit)
                .min_by(|&a, &b| best[a].total_cmp(&best[b]))
                .expect("non-empty range")
        }
    };

    let mut energies = vec![0.0; customers.len()];
    let mut k = target_k;
    for i in (0..customers.len()).rev() {
        let ki = choices[i][k];
        energies[i] = energy(i, ki);
        k -= ki;
    }

    let bound_status = customers
        .iter()
        .zip(&energies)
        .map(|(c, &e)| {
            let (lo, hi) = c.energy_bounds(t);
            BoundStatus::classify(e, lo, hi)
        })
        .collect();
    Ok(DispatchSolution {
        total_energy: energies.iter().sum(),
        total_cost: problem.total_cost(&energies),
        coupling_multiplier: f64::NAN,
        bound_status,
        kkt_residual: f64::NAN,
        energies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture::reference_fleet;
    use crate::model::ParticipatingCustomer;

    #[test]
    fn single_customer_hits_demand() {
        let p = DispatchProblem::new(
            vec![ParticipatingCustomer::new("a", 30.0, 60.0, 96.6, 7.588, 0.0414).unwrap()],
            1.0,
            45.0,
            1.0,
        )
        .unwrap();
        let s = brute_force_oracle(&p, 1.0, OracleConstraint::Equality).unwrap();
        assert_eq!(s.energies, vec![45.0]);
    }

    #[test]
    fn identical_pair_splits_evenly() {
        let pc =
            |id: &str| ParticipatingCustomer::new(id, 30.0, 60.0, 96.6, 7.588, 0.0414).unwrap();
        let p = DispatchProblem::new(vec![pc("a"), pc("b")], 1.0, 90.0, 1.0).unwrap();
        let s = brute_force_oracle(&p, 0.5, OracleConstraint::Equality).unwrap();
        assert_eq!(s.energies, vec![45.0, 45.0]);
    }

    #[test]
    fn three_customer_golden() {
        // Frozen from an independent enumeration: PCs {1, 4, 5}, 200 kWh, 0.25 kWh grid.
        let f = reference_fleet();
        let cs = [0, 3, 4].map(|i| f.customers()[i].clone()).to_vec();
        let p = DispatchProblem::new(cs, 1.0, 200.0, 1.0).unwrap();
        let s = brute_force_oracle(&p, 0.25, OracleConstraint::Equality).unwrap();
        assert_eq!(s.energies, vec![60.0, 67.5, 72.5]);
        assert!((s.total_cost - 2392.563325).abs() < 1e-9);
    }

    #[test]
    fn five_customer_golden() {
        let p = reference_fleet().with_demand(300.0).unwrap();
        let s = brute_force_oracle(&p, 0.25, OracleConstraint::Equality).unwrap();
        assert_eq!(s.energies, vec![60.0, 63.75, 62.75, 55.25, 58.25]);
        assert!((s.total_cost - 3520.91840625).abs() < 1e-9);
    }

    #[test]
    fn relaxed_pure_cost_goes_to_floor() {
        let p = reference_fleet()
            .with_demand(700.0)
            .unwrap()
            .with_lambda(1.0)
            .unwrap();
        let s = brute_force_oracle(&p, 1.0, OracleConstraint::Relaxed).unwrap();
        assert_eq!(s.energies, vec![30.0; 5]);
    }

    #[test]
    fn guard_rejects_huge_grids() {
        let p = reference_fleet().with_demand(300.0).unwrap();
        assert!(brute_force_oracle(&p, 1e-4, OracleConstraint::Equality).is_err());
        assert!(brute_force_oracle(&p, 0.0, OracleConstraint::Equality).is_err());
    }

    #[test]
    fn unreachable_demand_rejected() {
        let p = reference_fleet().with_demand(100.0).unwrap();
        assert!(brute_force_oracle(&p, 1.0, OracleConstraint::Equality).is_err());
        assert!(brute_force_oracle(&p, 1.0, OracleConstraint::Relaxed).is_err());
    }
}
