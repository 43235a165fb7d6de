use thiserror::Error;

/// Errors produced by the computational routes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A request would exceed a configured work budget.
    #[error("{what}: requested {requested} exceeds the budget of {budget}")]
    BudgetExceeded {
        what: &'static str,
        requested: u128,
        budget: u128,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// LU factorization hit a (numerically) zero pivot.
    #[error("matrix is numerically singular (condition estimate {condition:e})")]
    Singular { condition: f64 },

    #[error("coefficient of order {requested} requested from a series truncated at order {order}")]
    TruncationOrder { requested: usize, order: usize },

    #[error("tail estimate does not converge: {0}")]
    Nonconvergent(String),

    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepFailure { t: f64, h: f64 },

    /// The sigma-form residual drifted away from zero along a trajectory.
    #[error(
        "sigma-form residual {residual:e} exceeds {limit:e} at t = {t}; \
         restart from a Toeplitz-derived state (hybrid trajectory) to continue"
    )]
    TrajectoryDrift { t: f64, residual: f64, limit: f64 },

    #[error("evaluation at a pole of the equation: {factor} vanishes at t = {t}")]
    Pole { factor: &'static str, t: f64 },

    #[error("Monte Carlo standard error {achieved:e} above requested {requested:e} (estimate {estimate})")]
    MonteCarloPrecision {
        estimate: f64,
        achieved: f64,
        requested: f64,
    },

    #[error(
        "Painlevé II solution blew up at s = {s}; start the backward integration from a larger s0"
    )]
    Blowup { s: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
