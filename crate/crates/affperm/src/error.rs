use thiserror::Error;

/// Domain errors. Every variant names the invariant it violates so the CLI
/// can surface it verbatim.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("DuplicateResidue: window entries at positions {first} and {second} are congruent mod {size}")]
    DuplicateResidue {
        first: usize,
        second: usize,
        size: usize,
    },
    #[error("BadSum: window sums to {actual}, centering requires {expected}")]
    BadSum { expected: i64, actual: i64 },
    #[error("EmptyWindow: window must be non-empty")]
    EmptyWindow,
    #[error("NotAPermutation: values are not a bijection on 1..={size}")]
    NotAPermutation { size: usize },
    #[error("UnboundedInput: |σ({index}) - {index}| >= {size}")]
    UnboundedInput { index: i64, size: usize },
    #[error("TooManyRanks: position {position} has rank {rank} > {max}")]
    TooManyRanks {
        position: i64,
        rank: usize,
        max: usize,
    },
    #[error("SizeTooSmall: need N >= {needed}, got {size}")]
    SizeTooSmall { size: usize, needed: usize },
    #[error("CapExceeded: N = {size} exceeds the brute-force cap {cap} (set AFFPERM_CAP to raise)")]
    CapExceeded { size: usize, cap: usize },
    #[error("InvalidTuple: {0}")]
    InvalidTuple(String),
    #[error("EmptyDomain: Dom(N={size}, alpha={alpha}, A={a}, B={b}) contains no tuple")]
    EmptyDomain {
        size: usize,
        alpha: f64,
        a: f64,
        b: f64,
    },
    #[error("SampleOutsideUniverse: sample {index} is not a member of the universe")]
    SampleOutsideUniverse { index: usize },
    #[error("BadMeasure: {0}")]
    BadMeasure(String),
    #[error("BadInput: {0}")]
    BadInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
