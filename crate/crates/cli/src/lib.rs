//! Declarative experiment runner around `nhsub-core`: a flat `key = value`
//! config format, CSV and binary artifact writers, deterministic seeding and
//! fixed-chunk threading.

pub mod config;
pub mod csvio;
pub mod experiments;
pub mod parallel;

/// Process exit contract: 0 pass, 1 check failure, 2 usage/config error,
/// 3 numeric failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    CheckFailed,
    UsageError,
    NumericError,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::CheckFailed => 1,
            Outcome::UsageError => 2,
            Outcome::NumericError => 3,
        }
    }
}
