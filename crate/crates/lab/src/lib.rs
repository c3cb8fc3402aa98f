//! Simulation and classification laboratory for the random difference equation
//! `X_n = M_n X_{n-1} + Q_n` with nonnegative iid coefficient pairs `(M, Q)`,
//! in the contractive regime where the partial products `M_1 ... M_n` tend to
//! zero almost surely.
//!
//! The crate has three layers:
//!
//! * exact machinery — affine-map algebra ([`affine`]), distribution families
//!   with analytic tail functionals ([`model`]), series-based classification
//!   criteria ([`classify`]) and attractor-set construction ([`attractor`]);
//! * a seeded simulation engine for forward/backward iterations, ladder
//!   epochs, subsampled and coupled chains ([`chain`]);
//! * a Monte Carlo verification harness that cross-checks every classifier
//!   verdict and pathwise inequality against simulation ([`diagnostics`]).
//!
//! Everything that consumes randomness takes an explicit master seed and a
//! stream index; see [`rng`] for the stream-splitting rule.

pub mod affine;
pub mod attractor;
pub mod chain;
pub mod classify;
pub mod config;
pub mod diagnostics;
pub mod model;
pub mod numeric;
pub mod rng;
pub mod stats;

use thiserror::Error;

/// Crate-wide error type. Variants carry the operation-specific context
/// needed to report which precondition failed.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// A fixed point was requested for a map with slope 1 (or within 1e-9 of it).
    #[error("affine map has slope within 1e-9 of 1; no unique fixed point")]
    SlopeOne,
    /// Semigroup enumeration would exceed the configured element budget.
    #[error("semigroup enumeration of {requested} elements exceeds budget {budget}")]
    BudgetExceeded { requested: u64, budget: u64 },
    /// `log_- M = 0` almost surely, so J_-(y) = y / E(y ∧ log_- M) is undefined.
    #[error("M >= 1 almost surely: E(y ∧ log_- M) = 0, J_- undefined")]
    DegenerateM,
    /// A distribution spec violates the standing contractive assumptions.
    #[error("invalid distribution spec: {0}")]
    InvalidSpec(String),
    /// Too few exceedances at the top of the requested grid for a tail estimate.
    #[error("insufficient tail data: {observed} exceedances at t = {at} (need >= {needed})")]
    InsufficientTailData { at: f64, observed: usize, needed: usize },
    /// A simulated state left the representable range.
    #[error("state overflow at step {step} (explosive parameterization?)")]
    Overflow { step: usize },
    /// No ladder epoch was found within the trajectory horizon.
    #[error("no ladder epoch within horizon {horizon} (possibly defective sequence)")]
    HorizonExhausted { horizon: usize },
    /// A bounding-chain call got a schedule with the wrong direction.
    #[error("ladder schedule direction mismatch: {0}")]
    ScheduleDirectionMismatch(String),
    /// A pathwise coupling inequality failed, i.e. the tail-domination
    /// precondition did not actually hold for the supplied laws.
    #[error("coupling violation at step {step}: {detail}")]
    CouplingViolation { step: usize, detail: String },
    /// Series criterion requires M supported in a compact subset of (0, ∞).
    #[error("criterion requires M bounded away from 0 and ∞: {0}")]
    PreconditionUnbounded(String),
    /// Series criterion requires M degenerate at a point.
    #[error("criterion requires M degenerate at a single point e^m")]
    PreconditionNotDegenerateM,
    /// The evaluation level carries no mass, so every partial product vanishes.
    #[error("P(Q <= y) = 0 at y = {0}; series criterion is uninformative at this level")]
    ZeroMassAtLevel(f64),
    /// One-sided support of M could not be certified for the family.
    #[error("one-sided support condition unverifiable: {0}")]
    SupportConditionUnverifiable(String),
    /// No tilting constant produces negative drift.
    #[error("tilting infeasible: the contractive part of the law carries no mass")]
    TiltingInfeasible,
    /// Config file could not be parsed.
    #[error("config parse error: {0}")]
    ConfigParse(String),
    /// Unknown distribution family name in a config or spec file.
    #[error("unknown family '{0}' (known: {1})")]
    UnknownFamily(String, String),
    /// A required parameter is missing or out of range.
    #[error("bad parameter: {0}")]
    BadParameter(String),
    /// Filesystem-level failure while reading or writing reports.
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
