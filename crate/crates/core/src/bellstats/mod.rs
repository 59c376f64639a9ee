//! Classical statistics of coincidence experiments: expectation values, the
//! CHSH combination, marginal-law deviations and a one-sample t-test.

mod chsh;
mod table;
mod ttest;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use chsh::{
    chsh, expectation, expectation_from_probs, marginal_deviations, singles_factorization,
    ChshReport, FactorizationRow, MarginalRow, TSIRELSON_BOUND,
};
pub use table::{
    counts_to_probabilities, CoincidenceTable, ExperimentDataset, SinglesTable, EXACT_SUM_TOL,
    ROUNDED_SUM_TOL,
};
pub use ttest::{student_t_upper_tail, t_test_vs_threshold, TTest};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("probability {value} at position {index} is outside [0, 1]")]
    ProbabilityOutOfRange { index: usize, value: f64 },
    #[error("probabilities sum to {sum}, expected 1 within {tol}")]
    BadSum { sum: f64, tol: f64 },
    #[error("counts sum to {sum} but n = {n}")]
    CountMismatch { sum: u64, n: u64 },
    #[error("n must be positive")]
    ZeroTotal,
    #[error("missing experiment {0}")]
    MissingExperiment(Experiment),
    #[error("experiment {0} given more than once")]
    DuplicateExperiment(Experiment),
    #[error("single measurement {side}: outcomes sum to {sum}")]
    BadSingles { side: Side, sum: f64 },
    #[error("need at least two samples, got {0}")]
    TooFewSamples(usize),
    #[error("samples have zero variance")]
    ZeroVariance,
    #[error("dataset has no singles table")]
    NoSingles,
    #[error("unknown experiment key {0:?}")]
    UnknownExperiment(String),
    #[error("unknown measurement key {0:?}")]
    UnknownSide(String),
}

/// One of the four coincidence experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Experiment {
    #[serde(rename = "AB")]
    AB,
    #[serde(rename = "AB'")]
    ABp,
    #[serde(rename = "A'B")]
    ApB,
    #[serde(rename = "A'B'")]
    ApBp,
}

impl Experiment {
    pub const ALL: [Experiment; 4] = [Experiment::AB, Experiment::ABp, Experiment::ApB, Experiment::ApBp];

    pub fn label(self) -> &'static str {
        match self {
            Experiment::AB => "AB",
            Experiment::ABp => "AB'",
            Experiment::ApB => "A'B",
            Experiment::ApBp => "A'B'",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// The two single measurements combined in this experiment.
    pub fn sides(self) -> (Side, Side) {
        match self {
            Experiment::AB => (Side::A, Side::B),
            Experiment::ABp => (Side::A, Side::Bp),
            Experiment::ApB => (Side::Ap, Side::B),
            Experiment::ApBp => (Side::Ap, Side::Bp),
        }
    }

    pub fn from_sides(first: Side, second: Side) -> Option<Experiment> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.sides() == (first, second))
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Experiment {
    type Err = StatsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.label() == s)
            .ok_or_else(|| StatsError::UnknownExperiment(s.to_string()))
    }
}

/// A single two-outcome measurement; `A`, `A'` act on the first factor, `B`, `B'` on the second.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    #[serde(rename = "A")]
    A,
    #[serde(rename = "A'")]
    Ap,
    #[serde(rename = "B")]
    B,
    #[serde(rename = "B'")]
    Bp,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::A, Side::Ap, Side::B, Side::Bp];

    pub fn label(self) -> &'static str {
        match self {
            Side::A => "A",
            Side::Ap => "A'",
            Side::B => "B",
            Side::Bp => "B'",
        }
    }

    pub fn is_first_factor(self) -> bool {
        matches!(self, Side::A | Side::Ap)
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Side {
    type Err = StatsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Side::ALL
            .into_iter()
            .find(|e| e.label() == s)
            .ok_or_else(|| StatsError::UnknownSide(s.to_string()))
    }
}
