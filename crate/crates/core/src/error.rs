use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot add exact values with different pi exponents ({left} vs {right})")]
    MixedPiExponent { left: i32, right: i32 },
    #[error("operands use different backends (exact vs float)")]
    MixedBackend,
    #[error("derivative slot {0} is already in use")]
    SlotCollision(u32),
    #[error("index {index} is not valid in dimension {dim}")]
    BadIndex { index: usize, dim: usize },
    #[error("slots {i} and {j} are lightlike separated (x_ij^2 = 0)")]
    LightconeSingularity { i: usize, j: usize },
    #[error("slot {0} used twice where distinct slots are required")]
    SameSlot(usize),
    #[error("expected {expected} slots, got {got}")]
    WrongArity { expected: usize, got: usize },
    #[error("operation requires dimension {expected}, frame has dimension {got}")]
    WrongDimension { expected: usize, got: usize },
    #[error("tensor is not antisymmetric")]
    NotAntisymmetric,
    #[error("point mapped to infinity at slot {0}")]
    PointAtInfinity(usize),
    #[error("Lorentz matrix does not have unit determinant")]
    NotUnimodular,
    #[error("{0} is not the square of an exact rational; use the float backend")]
    NotPerfectSquare(String),
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("odd power of rho requested in exact mode")]
    OddRhoPower,
    #[error("too many insertions: {got} (limit {limit})")]
    TooManyInsertions { got: usize, limit: usize },
    #[error("mode {mode} out of range 1..={modes}")]
    BadMode { mode: usize, modes: usize },
    #[error("combinatorial budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("invalid spin label: {0}")]
    BadSpin(String),
    #[error("cannot parse {input:?} as a scalar: {reason}")]
    Parse { input: String, reason: String },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
