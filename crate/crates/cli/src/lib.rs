//! Batch front end for `halfline-core`: reads a problem configuration and
//! writes deterministic CSV/JSON artifacts.

pub mod commands;
pub mod config;
pub mod output;

use halfline_core::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_PARSE: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation failed: {kind}: {source}")]
    Validation { kind: &'static str, source: Error },
    #[error("numerical failure: {kind}: {source}")]
    Numerical { kind: &'static str, source: Error },
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Validation { .. } => EXIT_VALIDATION,
            CliError::Numerical { .. } | CliError::Io(_) => EXIT_NUMERICAL,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let kind = error_kind(&e);
        if is_validation(&e) {
            CliError::Validation { kind, source: e }
        } else {
            CliError::Numerical { kind, source: e }
        }
    }
}

/// Whether an error describes bad input rather than a failed computation.
pub fn is_validation(e: &Error) -> bool {
    matches!(
        e,
        Error::DimensionMismatch { .. }
            | Error::NotSquare { .. }
            | Error::NonFinite
            | Error::SelfadjointnessViolated { .. }
            | Error::RankDeficient { .. }
            | Error::SingularTransform
            | Error::NotSelfadjoint { .. }
            | Error::BadGrid(_)
            | Error::NegativeCoordinate(_)
            | Error::NotDirichlet
            | Error::InvalidArgument(_)
    )
}

/// The variant name, e.g. `RankDeficient`.
pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::DimensionMismatch { .. } => "DimensionMismatch",
        Error::NotSquare { .. } => "NotSquare",
        Error::NonFinite => "NonFinite",
        Error::NotHermitian { .. } => "NotHermitian",
        Error::NotPositiveDefinite { .. } => "NotPositiveDefinite",
        Error::NotUnitary { .. } => "NotUnitary",
        Error::Singular => "Singular",
        Error::SelfadjointnessViolated { .. } => "SelfadjointnessViolated",
        Error::RankDeficient { .. } => "RankDeficient",
        Error::SingularTransform => "SingularTransform",
        Error::NotSelfadjoint { .. } => "NotSelfadjoint",
        Error::BadGrid(_) => "BadGrid",
        Error::NegativeCoordinate(_) => "NegativeCoordinate",
        Error::QuadratureFailure { .. } => "QuadratureFailure",
        Error::IntegratorFailure { .. } => "IntegratorFailure",
        Error::ToleranceNotMet { .. } => "ToleranceNotMet",
        Error::LowerHalfPlane { .. } => "LowerHalfPlane",
        Error::SingularJost { .. } => "SingularJost",
        Error::SingularJ0 => "SingularJ0",
        Error::ExtrapolationDivergence => "ExtrapolationDivergence",
        Error::MultiplicityMismatch { .. } => "MultiplicityMismatch",
        Error::RefinementStall { .. } => "RefinementStall",
        Error::PhaseStepTooLarge { .. } => "PhaseStepTooLarge",
        Error::EigenvalueNotPlusMinusOne { .. } => "EigenvalueNotPlusMinusOne",
        Error::BetaMatchFailure { .. } => "BetaMatchFailure",
        Error::UnsettledTail { .. } => "UnsettledTail",
        Error::NotDirichlet => "NotDirichlet",
        Error::InvalidArgument(_) => "InvalidArgument",
    }
}
