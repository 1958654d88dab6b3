//! TOML problem files.
//!
//! ```toml
//! horizon_t_h = 1.0
//! demand_e_kwh = 700.0
//! lambda = 0.5            # optional, defaults to 0.5
//!
//! [[customers]]
//! id = "PC1"
//! p_min_kw = 30.0
//! p_max_kw = 60.0
//! c0 = 96.6               # cost-units/h
//! c1 = 7.588              # cost-units/kWh
//! c2 = 0.0414             # cost-units*h/kWh^2
//! ```

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::DispatchError;
use crate::model::{DispatchProblem, ParticipatingCustomer};

pub const DEFAULT_LAMBDA: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub horizon_t_h: f64,
    pub demand_e_kwh: f64,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    pub customers: Vec<CustomerEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomerEntry {
    pub id: String,
    pub p_min_kw: f64,
    pub p_max_kw: f64,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
}

fn default_lambda() -> f64 {
    DEFAULT_LAMBDA
}

#[derive(Debug, Error)]
pub enum ProblemFileError {
    #[error("syntax error: {0}")]
    Syntax(#[from] toml::de::Error),
    #[error("{field}: {message}")]
    Invalid { field: String, message: String },
}

fn invalid(field: impl Into<String>, err: DispatchError) -> ProblemFileError {
    let message = match err {
        DispatchError::InputDomain(m) => m,
        other => other.to_string(),
    };
    ProblemFileError::Invalid {
        field: field.into(),
        message,
    }
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self, ProblemFileError> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("problem file fields are all TOML-representable")
    }

    pub fn from_problem(problem: &DispatchProblem) -> Self {
        ProblemFile {
            horizon_t_h: problem.horizon_t(),
            demand_e_kwh: problem.demand_e(),
            lambda: problem.lambda(),
            customers: problem
                .customers()
                .iter()
                .map(|c| CustomerEntry {
                    id: c.id().to_string(),
                    p_min_kw: c.p_min(),
                    p_max_kw: c.p_max(),
                    c0: c.c0(),
                    c1: c.c1(),
                    c2: c.c2(),
                })
                .collect(),
        }
    }

    /// Validates field by field so errors name the offending entry.
    pub fn to_problem(&self) -> Result<DispatchProblem, ProblemFileError> {
        if self.customers.is_empty() {
            return Err(ProblemFileError::Invalid {
                field: "customers".into(),
                message: "at least one customer is required".into(),
            });
        }
        let mut customers = Vec::with_capacity(self.customers.len());
        for (i, c) in self.customers.iter().enumerate() {
            let pc =
                ParticipatingCustomer::new(c.id.as_str(), c.p_min_kw, c.p_max_kw, c.c0, c.c1, c.c2)
                    .map_err(|e| invalid(format!("customers[{i}] ({})", c.id), e))?;
            if customers
                .iter()
                .any(|p: &ParticipatingCustomer| p.id() == pc.id())
            {
                return Err(ProblemFileError::Invalid {
                    field: format!("customers[{i}].id"),
                    message: format!("duplicate customer id {}", c.id),
                });
            }
            customers.push(pc);
        }
        // Customers are already checked, so only the horizon can fail here.
        let problem = DispatchProblem::new(customers, self.horizon_t_h, 0.0, DEFAULT_LAMBDA)
            .map_err(|e| invalid("horizon_t_h", e))?;
        let problem = problem
            .with_demand(self.demand_e_kwh)
            .map_err(|e| invalid("demand_e_kwh", e))?;
        problem
            .with_lambda(self.lambda)
            .map_err(|e| invalid("lambda", e))
    }
}

pub fn parse_problem(text: &str) -> Result<DispatchProblem, ProblemFileError> {
    ProblemFile::parse(text)?.to_problem()
}
