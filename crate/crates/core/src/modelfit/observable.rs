use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ModelError;
use crate::bellstats::CoincidenceTable;
use crate::hilbert::{
    inner, orthonormality_defect, repair_basis, CMat, CVec, RepairMethod, RoundingPrecision,
};

/// Outcome values `(+1, -1, -1, +1)`: equal-sign outcome pairs count `+1`.
pub const DEFAULT_EIGENVALUES: [f64; 4] = [1.0, -1.0, -1.0, 1.0];

/// Largest Gram-matrix deviation accepted before repair.
pub const MAX_REPAIRABLE_DEFECT: f64 = 0.05;

/// A four-outcome measurement given by an eigenbasis of C^4 and outcome values.
#[derive(Clone, Debug)]
pub struct ObservableModel {
    raw: Vec<CVec>,
    eigenvectors: Vec<CVec>,
    eigenvalues: [f64; 4],
    labels: [String; 4],
    operator: CMat,
    repair: RepairMethod,
}

/// `Σ λ_k |v_k⟩⟨v_k|` over the repaired eigenbasis.
pub fn synthesize(eigenvectors: &[CVec], eigenvalues: [f64; 4]) -> Result<ObservableModel, ModelError> {
    ObservableModel::new(
        eigenvectors,
        eigenvalues,
        ["11", "12", "21", "22"].map(String::from),
        RoundingPrecision::default(),
    )
}

impl ObservableModel {
    pub fn new(
        eigenvectors: &[CVec],
        eigenvalues: [f64; 4],
        labels: [String; 4],
        precision: RoundingPrecision,
    ) -> Result<Self, ModelError> {
        if eigenvectors.len() != 4 || eigenvectors.iter().any(|v| v.dim() != 4) {
            return Err(ModelError::BasisShape(eigenvectors.len()));
        }
        let (defect, pair) = orthonormality_defect(eigenvectors)?;
        if defect > MAX_REPAIRABLE_DEFECT {
            return Err(ModelError::NotOrthonormal { defect, pair });
        }
        let repaired = repair_basis(eigenvectors, precision)?;
        let operator = spectral_sum(&repaired.vectors, &eigenvalues)?;
        Ok(ObservableModel {
            raw: eigenvectors.to_vec(),
            eigenvectors: repaired.vectors,
            eigenvalues,
            labels,
            operator,
            repair: repaired.method,
        })
    }

    /// Model whose eigenvectors are the columns of a unitary.
    pub fn from_unitary(u: &CMat, eigenvalues: [f64; 4]) -> Result<Self, ModelError> {
        let cols: Vec<CVec> = (0..4).map(|k| u.column(k)).collect();
        synthesize(&cols, eigenvalues)
    }

    pub fn with_labels(mut self, labels: [String; 4]) -> Self {
        self.labels = labels;
        self
    }

    /// Eigenvectors exactly as supplied.
    pub fn raw_eigenvectors(&self) -> &[CVec] {
        &self.raw
    }

    /// Orthonormal eigenvectors used for all computation.
    pub fn eigenvectors(&self) -> &[CVec] {
        &self.eigenvectors
    }

    pub fn eigenvalues(&self) -> [f64; 4] {
        self.eigenvalues
    }

    pub fn labels(&self) -> &[String; 4] {
        &self.labels
    }

    pub fn operator(&self) -> &CMat {
        &self.operator
    }

    pub fn repair_method(&self) -> RepairMethod {
        self.repair
    }

    /// Unitary whose columns are the eigenvectors.
    pub fn eigenbasis_matrix(&self) -> CMat {
        CMat::from_columns(&self.eigenvectors).expect("four vectors of dimension 4")
    }

    /// Projector onto the eigenspace of `value`.
    pub fn eigenprojector(&self, value: f64) -> CMat {
        let mut p = CMat::zeros(4, 4).unwrap();
        for (v, &l) in self.eigenvectors.iter().zip(&self.eigenvalues) {
            if (l - value).abs() < 1e-12 {
                p = p.add(&CMat::outer(v, v).unwrap()).unwrap();
            }
        }
        p
    }
}

fn spectral_sum(vs: &[CVec], values: &[f64; 4]) -> Result<CMat, ModelError> {
    let mut op = CMat::zeros(4, 4)?;
    for (v, &l) in vs.iter().zip(values) {
        op = op.add(&CMat::outer(v, v)?.scale(Complex64::new(l, 0.0)))?;
    }
    Ok(op)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    PaperFixture,
    Fitted,
    User,
}

/// Unit state vector in C^4.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    raw: CVec,
    vector: CVec,
    provenance: Provenance,
}

impl StateVector {
    /// Norm tolerance for states transcribed from two-decimal amplitudes.
    pub const FIXTURE_NORM_TOL: f64 = 0.02;
    pub const NORM_TOL: f64 = 1e-9;

    /// Norm tolerance 0.02 for the built-in fixture and 1e-9 otherwise.
    pub fn new(v: CVec, provenance: Provenance) -> Result<Self, ModelError> {
        let tol = match provenance {
            Provenance::PaperFixture => Self::FIXTURE_NORM_TOL,
            _ => Self::NORM_TOL,
        };
        Self::with_norm_tol(v, provenance, tol)
    }

    pub fn with_norm_tol(v: CVec, provenance: Provenance, tol: f64) -> Result<Self, ModelError> {
        if v.dim() != 4 {
            return Err(ModelError::StateDimension(v.dim()));
        }
        if !v.is_unit(tol) {
            return Err(ModelError::NotUnit { norm: v.norm(), tol });
        }
        Ok(StateVector {
            vector: v.normalized()?,
            raw: v,
            provenance,
        })
    }

    pub fn vector(&self) -> &CVec {
        &self.vector
    }

    pub fn raw(&self) -> &CVec {
        &self.raw
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }
}

/// `|⟨v_k|state⟩|²` for each eigenvector.
pub fn outcome_probabilities(state: &CVec, m: &ObservableModel) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (k, v) in m.eigenvectors().iter().enumerate() {
        out[k] = inner(v, state).expect("dimension 4").norm_sqr();
    }
    out
}

pub fn probabilities_from_model(state: &StateVector, m: &ObservableModel) -> CoincidenceTable {
    let p = outcome_probabilities(state.vector(), m).map(|x| x.clamp(0.0, 1.0));
    CoincidenceTable::new(m.labels().clone(), p).expect("orthonormal basis and unit state")
}

/// `⟨state|E|state⟩`.
pub fn expectation_from_model(state: &StateVector, m: &ObservableModel) -> f64 {
    let s = state.vector();
    let value = inner(s, &m.operator().apply(s).expect("dimension 4")).expect("dimension 4");
    debug_assert!(value.im.abs() < 1e-9);
    value.re
}
