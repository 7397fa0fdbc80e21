use std::fmt;

use thiserror::Error;

/// Which structural rule a subject record broke.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum ValidationRule {
    MonotonicityViolation,
    IndicatorViolation,
    CensorMismatch,
    NegativeTime,
    NonFiniteTime,
    LengthMismatch,
}

impl fmt::Display for ValidationRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ValidationRule::MonotonicityViolation => "MonotonicityViolation",
            ValidationRule::IndicatorViolation => "IndicatorViolation",
            ValidationRule::CensorMismatch => "CensorMismatch",
            ValidationRule::NegativeTime => "NegativeTime",
            ValidationRule::NonFiniteTime => "NonFiniteTime",
            ValidationRule::LengthMismatch => "LengthMismatch",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("subject {subject_id}: {rule}")]
    Validation {
        subject_id: String,
        rule: ValidationRule,
    },
    #[error("invalid state space: {0}")]
    StateSpace(String),
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("arm mismatch: {0}")]
    ArmMismatch(String),
    #[error("death transition must be retained in every endpoint subset")]
    DeathExcluded,
    #[error("invalid endpoint subset: {0}")]
    InvalidSubset(String),
    #[error("empty sample")]
    EmptySample,
    #[error("horizon must be positive, got {0}")]
    NonPositiveHorizon(f64),
    #[error("alpha must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),
    #[error("invalid step curve: {0}")]
    InvalidCurve(String),
    #[error("influence-function variance is not finite")]
    DegenerateVariance,
    #[error("control arm burden is zero; ratio undefined")]
    ZeroControlBurden,
    #[error("censored input where complete data are required")]
    CensoredInput,
    #[error("state spaces of the two arms differ")]
    StateSpaceMismatch,
    #[error("utility scores must be finite, non-negative and non-decreasing")]
    NonMonotoneScores,
    #[error("no events in {0}")]
    NoEvents(String),
    #[error("monotone partial likelihood: the hazard ratio estimate diverges")]
    MonotoneLikelihood,
    #[error("Newton-Raphson failed to converge after {0} iterations")]
    NoConvergence(usize),
    #[error("bootstrap needs at least {min} replicates, got {got}")]
    TooFewReplicates { min: usize, got: usize },
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("line {line}: {msg}")]
    Parse { line: u64, msg: String },
    #[error("line {line}: subject {subject_id}: {rule}")]
    RowValidation {
        line: u64,
        subject_id: String,
        rule: ValidationRule,
    },
    #[error("header mismatch: {0}")]
    HeaderMismatch(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
