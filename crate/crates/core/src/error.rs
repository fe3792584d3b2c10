use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("modulus must be at least 2, got {0}")]
    ModulusTooSmall(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u64, right: u64 },
    #[error("interval step must be nonzero")]
    ZeroStep,
    #[error("at least one interval spec is required")]
    EmptySpecList,
    #[error("weight {weight} is outside [1, {max}]")]
    InvalidWeight { weight: u64, max: u64 },
    #[error("weight set must be nonempty")]
    EmptyWeightSet,
    #[error("tuple has {got} components, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("tuple component {0} is not a unit")]
    NonUnitComponent(u64),
    #[error("target Davenport bound must be at least 4, got {0}")]
    TargetTooSmall(u32),
    #[error("constant C must exceed 8, got {0}")]
    ConstantTooSmall(f64),
    #[error("p = {p} too small for k = {k_total}, C = {c}: need 8·k·L < p; smallest admissible prime is {min_prime}")]
    PrimeTooSmall {
        p: u64,
        k_total: u32,
        c: f64,
        min_prime: u64,
    },
    #[error("{0}")]
    InvalidParams(String),
    #[error("cover search stalled after {steps} steps with {residual} tuples left in the intersection")]
    CoverFailure { steps: u32, residual: u64 },
    #[error("tier {tier} is inadmissible: {reason}")]
    InadmissibleTier { tier: String, reason: String },
    #[error("certificate error: {0}")]
    Certificate(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
