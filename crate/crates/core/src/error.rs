use alloc::string::String;

/// Errors raised by the engine.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A parameter failed validation.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// The requested accuracy or size needs more work than allowed.
    #[error("budget exceeded for {what}: needs {needed}, limit is {limit}")]
    BudgetExceeded {
        what: &'static str,
        needed: u128,
        limit: u128,
    },
    /// A bracketing root solve found no sign change.
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    /// An iteration stopped before meeting its tolerance.
    #[error("{what} did not converge after {iterations} iterations")]
    NotConverged { what: &'static str, iterations: usize },
    /// A sequence expected to be nondecreasing went down.
    #[error("monotonicity violated at index {index}: {detail}")]
    NotMonotone { index: usize, detail: String },
    /// A mathematically forced ordering failed numerically.
    #[error("ordering violated: {0}")]
    Ordering(String),
}

impl Error {
    /// True for errors caused by running out of budget or iterations, as
    /// opposed to invalid input.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::BudgetExceeded { .. }
                | Error::NotConverged { .. }
                | Error::NoSignChange { .. }
                | Error::NotMonotone { .. }
                | Error::Ordering(_)
        )
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
