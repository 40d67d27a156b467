use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("empty word")]
    EmptyWord,
    #[error("not a Morse factor")]
    NotMorseFactor,
    #[error("window too short: candidate offsets {0:?}")]
    WindowTooShort(Vec<u64>),
    #[error("upward projection from stage {from} to stage {to}")]
    UpwardProjection { from: u32, to: u32 },
    #[error("invalid template request: {0}")]
    InvalidTemplate(String),
    #[error("non-basic template: {0}")]
    NonBasic(String),
    #[error("mixed systems")]
    MixedSystems,
    #[error("untyped match")]
    UntypedMatch,
    #[error("overlap mismatch: {0}")]
    OverlapMismatch(String),
    #[error("interval mismatch: {0}")]
    IntervalMismatch(String),
    #[error("geometry infeasible: {0}")]
    GeometryInfeasible(String),
    #[error("two-cases violation: {0}")]
    TwoCasesViolation(String),
    #[error("stage too small")]
    StageTooSmall,
    #[error("infeasible chain: {0}")]
    InfeasibleChain(String),
    #[error("seventh case: {0}")]
    SeventhCase(String),
    #[error("level not in good set: {0}")]
    NotGood(String),
    #[error("disagreement across targets: {0}")]
    Disagreement(String),
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
    #[error("r too large for desk stages")]
    RTooLarge,
    #[error("stage not available: {0}")]
    StageUnavailable(String),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
