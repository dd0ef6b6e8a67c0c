use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("q-integer argument must be nonnegative, got {0}")]
    NegativeArgument(i64),

    #[error("exact division failed: ({dividend}) is not divisible by ({divisor})")]
    InexactDivision { dividend: String, divisor: String },

    #[error("division by the zero polynomial")]
    DivisionByZero,

    #[error("cannot evaluate a Laurent polynomial at q = 0")]
    EvaluateAtZero,

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("ambient dimension mismatch: {left} vs {right}")]
    AmbientMismatch { left: usize, right: usize },

    #[error("generator index {index} out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("rewrite step budget of {0} steps exceeded")]
    StepBudgetExceeded(usize),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("deformation parameter q = {0} lies outside (0, 1)")]
    DeformationOutOfRange(String),

    #[error("cannot certify pairing <mu_{k}, P_-{big_n}>: value {value}, tail {tail}")]
    Uncertified {
        k: usize,
        big_n: usize,
        value: f64,
        tail: f64,
    },

    #[error("enumeration incomplete: eigenvalue {lambda} exceeds cutoff {cutoff}")]
    IncompleteEnumeration { lambda: u64, cutoff: u32 },

    #[error("radicand {0} too large to factor")]
    RadicandTooLarge(String),
}

pub type Result<T> = std::result::Result<T, Error>;
