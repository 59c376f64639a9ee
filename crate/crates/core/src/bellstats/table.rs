use serde::{Deserialize, Serialize};

use super::{Experiment, Side, StatsError};

/// Sum tolerance for tables computed from exact data.
pub const EXACT_SUM_TOL: f64 = 1e-6;
/// Sum tolerance for tables transcribed from values rounded to three decimals.
pub const ROUNDED_SUM_TOL: f64 = 0.005;

const SINGLES_SUM_TOL: f64 = 1e-4;

/// Joint outcome probabilities of one coincidence experiment, ordered
/// `(1,1), (1,2), (2,1), (2,2)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoincidenceTable {
    labels: [String; 4],
    probs: [f64; 4],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    counts: Option<[u64; 4]>,
}

fn default_labels() -> [String; 4] {
    ["11", "12", "21", "22"].map(String::from)
}

impl CoincidenceTable {
    pub fn new(labels: [String; 4], probs: [f64; 4]) -> Result<Self, StatsError> {
        Self::with_tolerance(labels, probs, EXACT_SUM_TOL)
    }

    /// Accepts probabilities rounded for print, whose sum may miss 1 by a few thousandths.
    pub fn from_rounded(labels: [String; 4], probs: [f64; 4]) -> Result<Self, StatsError> {
        Self::with_tolerance(labels, probs, ROUNDED_SUM_TOL)
    }

    pub fn with_tolerance(labels: [String; 4], probs: [f64; 4], sum_tol: f64) -> Result<Self, StatsError> {
        check_probs(&probs)?;
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > sum_tol {
            return Err(StatsError::BadSum { sum, tol: sum_tol });
        }
        Ok(CoincidenceTable {
            labels,
            probs,
            counts: None,
        })
    }

    pub fn from_counts(labels: [String; 4], counts: [u64; 4], n: u64) -> Result<Self, StatsError> {
        if n == 0 {
            return Err(StatsError::ZeroTotal);
        }
        let sum: u64 = counts.iter().sum();
        if sum != n {
            return Err(StatsError::CountMismatch { sum, n });
        }
        Ok(CoincidenceTable {
            labels,
            probs: counts.map(|c| c as f64 / n as f64),
            counts: Some(counts),
        })
    }

    /// Unlabelled table from raw probabilities.
    pub fn from_probs(probs: [f64; 4]) -> Result<Self, StatsError> {
        Self::new(default_labels(), probs)
    }

    pub fn uniform() -> Self {
        Self::from_probs([0.25; 4]).unwrap()
    }

    pub fn labels(&self) -> &[String; 4] {
        &self.labels
    }

    pub fn probs(&self) -> [f64; 4] {
        self.probs
    }

    pub fn counts(&self) -> Option<[u64; 4]> {
        self.counts
    }

    pub fn total(&self) -> Option<u64> {
        self.counts.map(|c| c.iter().sum())
    }

    pub fn sum(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Probabilities rescaled to sum to exactly one.
    pub fn normalized(&self) -> [f64; 4] {
        let s = self.sum();
        self.probs.map(|p| p / s)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.probs[2 * i + j]
    }

    /// Marginal of the first factor: `(p11 + p12, p21 + p22)`.
    pub fn first_marginal(&self) -> [f64; 2] {
        [self.probs[0] + self.probs[1], self.probs[2] + self.probs[3]]
    }

    /// Marginal of the second factor: `(p11 + p21, p12 + p22)`.
    pub fn second_marginal(&self) -> [f64; 2] {
        [self.probs[0] + self.probs[2], self.probs[1] + self.probs[3]]
    }
}

pub(crate) fn check_probs(probs: &[f64]) -> Result<(), StatsError> {
    for (index, &value) in probs.iter().enumerate() {
        if !(0.0..=1.0).contains(&value) || value.is_nan() {
            return Err(StatsError::ProbabilityOutOfRange { index, value });
        }
    }
    Ok(())
}

pub fn counts_to_probabilities(counts: [u64; 4], n: u64) -> Result<CoincidenceTable, StatsError> {
    CoincidenceTable::from_counts(default_labels(), counts, n)
}

/// Outcome probabilities of the four single measurements.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SinglesTable {
    probs: [[f64; 2]; 4],
    labels: [[String; 2]; 4],
}

impl SinglesTable {
    /// `entries` indexed like [`Side::ALL`]: `A, A', B, B'`.
    pub fn new(labels: [[String; 2]; 4], probs: [[f64; 2]; 4]) -> Result<Self, StatsError> {
        for (side, pair) in Side::ALL.iter().zip(&probs) {
            check_probs(pair)?;
            let sum = pair[0] + pair[1];
            if (sum - 1.0).abs() > SINGLES_SUM_TOL {
                return Err(StatsError::BadSingles { side: *side, sum });
            }
        }
        Ok(SinglesTable { probs, labels })
    }

    pub fn get(&self, side: Side) -> [f64; 2] {
        self.probs[side_index(side)]
    }

    pub fn labels(&self, side: Side) -> &[String; 2] {
        &self.labels[side_index(side)]
    }
}

fn side_index(side: Side) -> usize {
    Side::ALL.iter().position(|&s| s == side).unwrap()
}

/// The four coincidence tables of a Bell-type experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentDataset {
    pub name: String,
    pub n_subjects: Option<u64>,
    tables: [CoincidenceTable; 4],
    singles: Option<SinglesTable>,
}

impl ExperimentDataset {
    pub fn from_tables(
        name: impl Into<String>,
        n_subjects: Option<u64>,
        tables: impl IntoIterator<Item = (Experiment, CoincidenceTable)>,
        singles: Option<SinglesTable>,
    ) -> Result<Self, StatsError> {
        let mut slots: [Option<CoincidenceTable>; 4] = Default::default();
        for (exp, table) in tables {
            let slot = &mut slots[exp.index()];
            if slot.is_some() {
                return Err(StatsError::DuplicateExperiment(exp));
            }
            *slot = Some(table);
        }
        let [ab, abp, apb, apbp] = slots;
        let take = |t: Option<CoincidenceTable>, e| t.ok_or(StatsError::MissingExperiment(e));
        Ok(ExperimentDataset {
            name: name.into(),
            n_subjects,
            tables: [
                take(ab, Experiment::AB)?,
                take(abp, Experiment::ABp)?,
                take(apb, Experiment::ApB)?,
                take(apbp, Experiment::ApBp)?,
            ],
            singles,
        })
    }

    pub fn table(&self, exp: Experiment) -> &CoincidenceTable {
        &self.tables[exp.index()]
    }

    pub fn tables(&self) -> impl Iterator<Item = (Experiment, &CoincidenceTable)> {
        Experiment::ALL.into_iter().zip(self.tables.iter())
    }

    pub fn singles(&self) -> Option<&SinglesTable> {
        self.singles.as_ref()
    }

    /// Copy with one table replaced.
    pub fn with_table(&self, exp: Experiment, table: CoincidenceTable) -> Self {
        let mut out = self.clone();
        out.tables[exp.index()] = table;
        out
    }
}
