use serde::{Deserialize, Serialize};

use super::table::check_probs;
use super::{CoincidenceTable, Experiment, ExperimentDataset, Side, StatsError};

/// Quantum maximum of the CHSH combination, `2√2`.
pub const TSIRELSON_BOUND: f64 = 2.0 * std::f64::consts::SQRT_2;

/// `p11 + p22 - p12 - p21` under the ±1 outcome assignment.
pub fn expectation(t: &CoincidenceTable) -> f64 {
    let p = t.probs();
    p[0] + p[3] - p[1] - p[2]
}

pub fn expectation_from_probs(probs: &[f64; 4]) -> Result<f64, StatsError> {
    check_probs(probs)?;
    Ok(probs[0] + probs[3] - probs[1] - probs[2])
}

/// One marginal-law comparison: the probability of `outcome` on `measurement`,
/// computed from two experiments that share it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginalRow {
    pub measurement: Side,
    pub outcome: u8,
    pub experiments: (Experiment, Experiment),
    pub lhs: f64,
    pub rhs: f64,
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChshReport {
    pub e_ab: f64,
    pub e_abp: f64,
    pub e_apb: f64,
    pub e_apbp: f64,
    /// `E(A',B') + E(A',B) + E(A,B') - E(A,B)`
    pub chsh: f64,
    pub violates: bool,
    /// `2√2 - |chsh|`
    pub tsirelson_gap: f64,
    pub marginal_deviations: Vec<MarginalRow>,
}

impl ChshReport {
    pub fn expectation(&self, exp: Experiment) -> f64 {
        match exp {
            Experiment::AB => self.e_ab,
            Experiment::ABp => self.e_abp,
            Experiment::ApB => self.e_apb,
            Experiment::ApBp => self.e_apbp,
        }
    }

    pub fn max_marginal_deviation(&self) -> f64 {
        self.marginal_deviations
            .iter()
            .map(|r| r.deviation)
            .fold(0.0, f64::max)
    }
}

pub fn chsh(ds: &ExperimentDataset) -> ChshReport {
    let e = |x| expectation(ds.table(x));
    let (e_ab, e_abp, e_apb, e_apbp) = (
        e(Experiment::AB),
        e(Experiment::ABp),
        e(Experiment::ApB),
        e(Experiment::ApBp),
    );
    let value = e_apbp + e_apb + e_abp - e_ab;
    ChshReport {
        e_ab,
        e_abp,
        e_apb,
        e_apbp,
        chsh: value,
        violates: value.abs() > 2.0,
        tsirelson_gap: TSIRELSON_BOUND - value.abs(),
        marginal_deviations: marginal_deviations(ds),
    }
}

/// Eight rows: for each single measurement, both outcome marginals as seen
/// from the two experiments that contain it.
pub fn marginal_deviations(ds: &ExperimentDataset) -> Vec<MarginalRow> {
    let pairs = [
        (Side::A, Experiment::AB, Experiment::ABp),
        (Side::Ap, Experiment::ApB, Experiment::ApBp),
        (Side::B, Experiment::AB, Experiment::ApB),
        (Side::Bp, Experiment::ABp, Experiment::ApBp),
    ];
    let mut rows = Vec::with_capacity(8);
    for (side, left, right) in pairs {
        let marginal = |t: &CoincidenceTable| {
            if side.is_first_factor() {
                t.first_marginal()
            } else {
                t.second_marginal()
            }
        };
        let (l, r) = (marginal(ds.table(left)), marginal(ds.table(right)));
        for outcome in 0..2 {
            rows.push(MarginalRow {
                measurement: side,
                outcome: outcome as u8 + 1,
                experiments: (left, right),
                lhs: l[outcome],
                rhs: r[outcome],
                deviation: (l[outcome] - r[outcome]).abs(),
            });
        }
    }
    rows
}

/// Joint probability against the product of single-measurement probabilities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorizationRow {
    pub outcome: (u8, u8),
    pub joint: f64,
    pub product_of_singles: f64,
    pub deviation: f64,
}

/// Compares each joint probability of `exp` with the product of the
/// corresponding single-measurement probabilities.
pub fn singles_factorization(ds: &ExperimentDataset, exp: Experiment) -> Result<Vec<FactorizationRow>, StatsError> {
    let singles = ds.singles().ok_or(StatsError::NoSingles)?;
    let (first, second) = exp.sides();
    let (pa, pb) = (singles.get(first), singles.get(second));
    let t = ds.table(exp);
    let mut rows = Vec::with_capacity(4);
    for i in 0..2 {
        for j in 0..2 {
            let joint = t.get(i, j);
            let product = pa[i] * pb[j];
            rows.push(FactorizationRow {
                outcome: (i as u8 + 1, j as u8 + 1),
                joint,
                product_of_singles: product,
                deviation: (joint - product).abs(),
            });
        }
    }
    Ok(rows)
}
