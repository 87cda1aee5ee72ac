use thiserror::Error;

/// Every failure mode of the library.
///
/// Variants fall into three families which the command-line driver maps to
/// distinct exit codes: integrity failures (a computed identity did not
/// hold), precision or budget failures (recompute with more digits or a
/// bigger cap), and invalid input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid tower datum: {0}")]
    InvalidSpec(String),
    #[error("operands belong to different field contexts")]
    CtxMismatch,
    #[error("base modulus has no root in the target field")]
    NoRoot,
    #[error("Teichmuller trace has non-rational coordinates at precision {0}")]
    TraceNotRational(u32),
    #[error("cyclotomic elements have different conductors")]
    ConductorMismatch,
    #[error("guard digits {have} below required {need}")]
    InsufficientGuard { have: u32, need: u32 },
    #[error("division by {0} is not exact")]
    NonIntegralResult(u64),
    #[error("series variables differ")]
    VarMismatch,
    #[error("series linear coefficient is not a unit")]
    NonUnitLinearTerm,
    #[error("valuation at index {0} is not determined at the working precision")]
    InsufficientPrecision(usize),
    #[error("enumeration of {size} elements exceeds budget {budget}")]
    BudgetExceeded { size: u128, budget: u64 },
    #[error("L-function coefficient {index} beyond degree {degree} is nonzero")]
    DegreeViolation { index: usize, degree: usize },
    #[error("the Dwork pathway supports a = 1 only (got a = {0})")]
    UnsupportedA(u32),
    #[error("coefficient {0} of an assembled zeta factor is not a rational integer")]
    NonIntegerCoefficient(usize),
    #[error("conductor exponent {m} exceeds histogram precision {n}")]
    ConductorExceedsPrecision { m: u32, n: u32 },
    #[error("T-adic polygon has no vertex at x = {0}")]
    NoGapAtVertex(usize),
    #[error("slope factorization failed to converge at component {0}")]
    NonConvergence(usize),
    #[error("weight with conductor exponent {0} lies outside the boundary annulus")]
    WeightOutsideAnnulus(u32),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("cache i/o: {0}")]
    Io(String),
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Integrity,
    Precision,
    Config,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            InvalidSpec(_) | UnsupportedA(_) | WeightOutsideAnnulus(_) | Io(_) => ErrorKind::Config,
            InsufficientGuard { .. }
            | InsufficientPrecision(_)
            | BudgetExceeded { .. }
            | ConductorExceedsPrecision { .. }
            | NoGapAtVertex(_)
            | NonConvergence(_) => ErrorKind::Precision,
            _ => ErrorKind::Integrity,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
