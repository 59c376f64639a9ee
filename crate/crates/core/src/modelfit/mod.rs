//! Observables from eigenbases, forward probabilities, the embedded animal-acts
//! model and numerical fitting of eigenbases and states.

mod fixture;
mod observable;
mod optimize;

use thiserror::Error;

use crate::bellstats::StatsError;
use crate::hilbert::LinalgError;

pub use fixture::{
    animal_acts_counts_json, animal_acts_json, animal_acts_model_json, paper_dataset,
    paper_dataset_rounded, paper_fixture, Fixture,
};
pub use observable::{
    expectation_from_model, outcome_probabilities, probabilities_from_model, synthesize,
    ObservableModel, Provenance, StateVector, DEFAULT_EIGENVALUES, MAX_REPAIRABLE_DEFECT,
};
pub use optimize::{
    fit_basis, fit_state, misfit, unitary_from_generator, FitConfig, FitResult, StateFit,
    TracePoint,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("an eigenbasis needs four vectors of dimension 4, got {0} vectors")]
    BasisShape(usize),
    #[error("eigenbasis is not orthonormal: Gram deviation {defect:.4} at pair ({}, {})", pair.0 + 1, pair.1 + 1)]
    NotOrthonormal { defect: f64, pair: (usize, usize) },
    #[error("state must have dimension 4, got {0}")]
    StateDimension(usize),
    #[error("state norm {norm} is not 1 within {tol}")]
    NotUnit { norm: f64, tol: f64 },
    #[error("invalid fit configuration: {0}")]
    BadConfig(String),
    #[error("embedded fixture is malformed: {0}")]
    Fixture(String),
}
