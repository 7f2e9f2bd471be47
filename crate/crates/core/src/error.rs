use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("degree parameter d must be at least 1, got {0}")]
    InvalidDegree(i64),
    #[error("cross term of two distinct abstract divisor classes is undefined")]
    UndefinedCrossTerm,
    #[error("divisor class violates the Hodge index bound: {0}")]
    InfeasibleDivisor(String),
    #[error("vector {0} is not spherical")]
    NotSpherical(String),
    #[error("vector {0} is not primitive")]
    NonPrimitive(String),
    #[error("operation needs an exact divisor part, got {0}")]
    NotExact(String),
    #[error("lattice expects degree d = {expected}, got d = {found}")]
    DegreeMismatch { expected: u32, found: u32 },
    #[error("isometry does not fix {0}")]
    NotInvariant(String),
    #[error("result is not integral: {0}")]
    NonIntegral(String),
    #[error("linear data does not preserve the Mukai pairing")]
    NotIsometry,
    #[error("imaginary part of the target is not positive")]
    NonPositiveIm,
    #[error("empty parameter range [{0}, {1}]")]
    EmptyRange(String, String),
    #[error("family is undefined or degenerate at t = {0}")]
    OutsideDomain(String),
    #[error("expected a rank-2 lattice, kernel has rank {0}")]
    RankMismatch(usize),
    #[error("vector {0} is not in the lattice")]
    VectorNotInLattice(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
