use thiserror::Error;

use crate::model::Regime;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DispatchError {
    /// An argument is non-finite, negative where it must not be, or violates
    /// a structural invariant (bounds ordering, duplicate ids, ...).
    #[error("invalid input: {0}")]
    InputDomain(String),

    /// The requested problem has an empty feasible set.
    #[error("infeasible ({regime}): {reason}")]
    Infeasible { regime: Regime, reason: String },

    /// A dual search failed to converge or produced an uncertified point.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T, E = DispatchError> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> DispatchError {
    DispatchError::InputDomain(msg.into())
}
