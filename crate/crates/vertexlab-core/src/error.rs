//! Error type shared by all modules.
//!
//! Purpose
//! - Distinguish the four failure classes that the solvers and enumerators
//!   can hit: invalid input parameters, non-convergence (carrying the last
//!   residual so callers can report it), size/memory budgets, and
//!   numerically degenerate results (e.g. a vanishing Bethe eigenvector).
//!
//! Notes
//! - Pure-math kernel functions (Θ, Ξ, k) treat precondition violations as
//!   programming errors and assert; only operations whose inputs come from
//!   users or from iterative processes return [`Error`].

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Failure classes for fallible operations.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An input parameter is outside the documented domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An iterative solver exhausted its budget; carries the last residual.
    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { residual: f64, iterations: usize },

    /// A requested object exceeds the configured size/memory budget.
    #[error("size budget exceeded: {0}")]
    BudgetExceeded(String),

    /// A computation produced a numerically degenerate result.
    #[error("degenerate result: {0}")]
    Degenerate(String),
}
