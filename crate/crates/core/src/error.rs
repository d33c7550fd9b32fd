use thiserror::Error;

/// Errors produced by the samplers, exact tables and the trial harness.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("pair count must be at least 1")]
    EmptyDeal,

    #[error("malformed deal: {0}")]
    MalformedDeal(String),

    #[error("malformed chord diagram: {0}")]
    MalformedChords(String),

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("enumeration of n = {n} exceeds the cap of {cap} pairs")]
    EnumerationCap { n: usize, cap: usize },

    #[error("work budget exceeded: n * trials = {requested} > {budget}")]
    Budget { requested: u128, budget: u128 },

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
