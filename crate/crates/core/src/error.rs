use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} coordinates, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("coordinate {coord}: expected {expected} fields, found {found}")]
    FieldMismatch {
        coord: usize,
        expected: usize,
        found: usize,
    },

    #[error("coordinate {coord} field {field}: value {value} exceeds bound {max}")]
    OutOfBounds {
        coord: usize,
        field: usize,
        value: u64,
        max: u64,
    },

    #[error("function {function} wrote coordinate {coord} outside its write set")]
    ContractViolation { function: usize, coord: usize },

    #[error("function {function} is not local to coordinate {function}: {reason}")]
    LocalityViolation { function: usize, reason: String },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("negative-weight cycle detected")]
    NegativeCycle,

    #[error("instance is not envy-freeable: the envy graph has a positive-weight cycle")]
    NotEnvyFreeable,

    #[error("no envy-eliminating payment vector exists under cap {cap}")]
    Infeasible { cap: u64 },

    #[error("schedule space exceeds guard: at least {explored} schedules (limit {limit})")]
    ExplosionGuard { explored: u64, limit: u64 },

    #[error("search space of {size} points exceeds limit {limit}")]
    SearchSpace { size: u128, limit: u128 },

    #[error("no common fixed point reached within {steps} steps")]
    StepLimit { steps: usize },

    #[error("unknown counterexample scenario `{0}`")]
    UnknownScenario(String),

    #[error("trace line {line}: {message}")]
    TraceParse { line: usize, message: String },
}
