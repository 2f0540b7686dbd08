use thiserror::Error;

/// Errors raised by validation and by the analytic routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("hierarchy has no layers")]
    EmptySpec,
    #[error("group size {0} is even; majority votes need an odd size")]
    EvenGroupSize(u64),
    #[error("group size {0} is below the minimum of 3")]
    GroupTooSmall(u64),
    #[error("number of groups {0} is even; the top-level majority needs an odd count")]
    EvenGroupCount(usize),
    #[error("system has no groups")]
    EmptySystem,
    #[error("probability {0} is outside [0, 1]")]
    ProbabilityOutOfRange(f64),
    #[error("input {0} is not a finite nonnegative number")]
    NonFiniteInput(f64),
    #[error("abstention {alpha} exceeds the admissible maximum {limit}")]
    AlphaOutOfRange { alpha: f64, limit: f64 },
    #[error("group {group}: effective size {size} is even")]
    EffectiveSizeEven { group: usize, size: u64 },
    #[error("group {group}: effective size {size} is below 3")]
    EffectiveSizeTooSmall { group: usize, size: u64 },
    #[error("input lists have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("{0} has no factorization into {1} odd factors of at least 3")]
    NoValidFactorization(u64, usize),
    #[error("electorate size {0} exceeds the supported maximum of 1e9")]
    ElectorateTooLarge(u64),
    #[error("expected a positive argument, got {0}")]
    NonPositive(f64),
    #[error("hierarchy {0:?} does not use one group size on every layer")]
    NonUniformHierarchy(Vec<u64>),
    #[error("epsilon grid is not strictly increasing at index {0}")]
    UnorderedGrid(usize),
    #[error("simulation needs at least one trial")]
    ZeroTrials,
    #[error("layer count must be at least 1")]
    ZeroLayers,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
