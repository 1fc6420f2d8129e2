use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("a set needs at least one element")]
    EmptySet,

    /// The input was a multiset.
    #[error("duplicate element {0}")]
    DuplicateElement(i64),

    #[error("element {value} exceeds the magnitude headroom 2^61")]
    OverflowRisk { value: i128 },

    #[error("derivative of order {k} needs more than {k} elements, set has {n}")]
    OrderTooHigh { k: usize, n: usize },

    #[error("derivative profile violated: {0}")]
    ProfileViolation(String),

    #[error("rounding repair failed after {retries} scale doublings")]
    RepairFailed { retries: u32 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("budget exceeded: {needed} operations requested, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("no dyadic band anchored in [{lower}, {upper}]")]
    EmptyRange { lower: f64, upper: f64 },

    #[error("power iteration did not converge after {iterations} steps (last {last}, gap {gap:e})")]
    NonConvergence { iterations: usize, last: f64, gap: f64 },

    #[error("degenerate fit input: {0}")]
    Degenerate(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("no valid move found within {retries} proposals")]
    Stuck { retries: u32 },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
