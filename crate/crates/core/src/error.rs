use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("denominator {0} is not coprime to 2 and 3; need gcd(n, 6) = 1")]
    NotCoprimeToSix(u64),
    #[error("denominator {0} is too small (need n >= 5)")]
    ModulusTooSmall(u64),
    #[error("numerator {k} is not in (0, {n})")]
    NumeratorOutOfRange { k: u64, n: u64 },
    #[error("{k}/{n} is not in lowest terms")]
    NotReduced { k: u64, n: u64 },
    #[error("cannot factor {n}: exceeds trial-division bound {bound}")]
    FactorizationBound { n: u64, bound: u64 },
    #[error("invalid outlier criterion: {0}")]
    InvalidCriterion(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("orbit has no mass near zero")]
    NoNearZeroMass,
    #[error("point {k}/{n} is not in [0, 1/2)")]
    NotNearZero { k: u64, n: u64 },
    #[error("bitmap dimensions differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
}

pub type Result<T> = std::result::Result<T, Error>;
