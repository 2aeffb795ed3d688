use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Line-numbered configuration diagnostic.
    #[error("line {line}: {message}")]
    Config { line: usize, message: String },

    /// Configuration problem not tied to one line.
    #[error("{0}")]
    InvalidConfig(String),

    #[error("missing required key: {0}")]
    MissingKey(&'static str),

    #[error("group starved: {kind} group {index} has weight {weight} but receives 0 of {n_agents} agents")]
    GroupStarved {
        kind: &'static str,
        index: usize,
        weight: f64,
        n_agents: usize,
    },

    #[error("no stubborn mass")]
    NoStubbornMass,

    #[error("alpha0 zero")]
    Alpha0Zero,

    #[error("zero total persuasion")]
    ZeroPersuasion,

    #[error("{name} violated: residual {residual:e}")]
    IdentityViolation { name: &'static str, residual: f64 },

    #[error("unstable step at t = {t}: |M| = {value}")]
    UnstableStep { t: f64, value: f64 },

    #[error("monotonicity violated in group {group} at t = {t}")]
    MonotonicityViolated { group: usize, t: f64 },

    #[error("insufficient points above floor: {found} (need 3)")]
    InsufficientPoints { found: usize },

    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}
