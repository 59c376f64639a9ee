//! The embedded animal-acts data: coincidence tables over 81 subjects and the
//! published four-dimensional model (state, eigenbases, operator matrices).

use super::{ModelError, ObservableModel, Provenance, StateVector};
use crate::bellstats::{Experiment, ExperimentDataset};
use crate::cli::schema::{DatasetFile, ModelFile};
use crate::hilbert::CMat;

const ROUNDED_JSON: &str = include_str!("../../data/animal_acts.json");
const COUNTS_JSON: &str = include_str!("../../data/animal_acts_counts.json");
const MODEL_JSON: &str = include_str!("../../data/animal_acts_model.json");

/// Probabilities as printed, to three or four decimals.
pub fn animal_acts_json() -> &'static str {
    ROUNDED_JSON
}

/// Integer counts over 81 subjects.
pub fn animal_acts_counts_json() -> &'static str {
    COUNTS_JSON
}

pub fn animal_acts_model_json() -> &'static str {
    MODEL_JSON
}

fn load_dataset(text: &str, path: &str) -> Result<ExperimentDataset, ModelError> {
    let (file, _) = DatasetFile::parse(text, path, true).map_err(|e| ModelError::Fixture(e.to_string()))?;
    file.to_dataset(path).map_err(|e| ModelError::Fixture(e.to_string()))
}

/// Exact-count form of the animal-acts dataset.
pub fn paper_dataset() -> ExperimentDataset {
    load_dataset(COUNTS_JSON, "animal_acts_counts.json").expect("embedded dataset is valid")
}

/// Three-decimal probability form of the animal-acts dataset.
pub fn paper_dataset_rounded() -> ExperimentDataset {
    load_dataset(ROUNDED_JSON, "animal_acts.json").expect("embedded dataset is valid")
}

#[derive(Clone, Debug)]
pub struct Fixture {
    pub state: StateVector,
    /// Indexed by [`Experiment::index`].
    pub models: [ObservableModel; 4],
    /// Operator matrices as printed, to three decimals.
    pub reference_operators: [CMat; 4],
    pub dataset: ExperimentDataset,
    pub rounded_dataset: ExperimentDataset,
    /// The model file as embedded, errata not applied.
    pub model_file: ModelFile,
}

impl Fixture {
    pub fn model(&self, exp: Experiment) -> &ObservableModel {
        &self.models[exp.index()]
    }

    pub fn reference_operator(&self, exp: Experiment) -> &CMat {
        &self.reference_operators[exp.index()]
    }
}

pub fn paper_fixture() -> Fixture {
    build_fixture().expect("embedded model is valid")
}

fn build_fixture() -> Result<Fixture, ModelError> {
    let path = "animal_acts_model.json";
    let fixture_err = |e: String| ModelError::Fixture(e);
    let (raw, _) = ModelFile::parse(MODEL_JSON, path, true).map_err(|e| fixture_err(e.to_string()))?;
    let file = raw.with_errata_applied().map_err(fixture_err)?;
    let state = file.state(Provenance::PaperFixture)?;
    let mut slots: [Option<ObservableModel>; 4] = Default::default();
    let mut ops: [Option<CMat>; 4] = Default::default();
    for (exp, m) in file.models(path).map_err(|e| fixture_err(e.to_string()))? {
        let block = &file.measurements[exp.label()];
        let op = block
            .reference_operator
            .as_ref()
            .ok_or_else(|| fixture_err(format!("{exp}: no reference operator")))?
            .to_matrix()?;
        ops[exp.index()] = Some(op);
        slots[exp.index()] = Some(m);
    }
    if slots.iter().any(Option::is_none) {
        return Err(fixture_err("missing experiment".into()));
    }
    Ok(Fixture {
        state,
        models: slots.map(Option::unwrap),
        reference_operators: ops.map(Option::unwrap),
        dataset: paper_dataset(),
        rounded_dataset: paper_dataset_rounded(),
        model_file: raw,
    })
}
