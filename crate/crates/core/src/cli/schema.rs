//! JSON file formats for datasets, states, operators and models.
//!
//! Files written by [`to_canonical_json`] parse back to equal values and
//! re-serialize byte for byte.

use indexmap::IndexMap;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bellstats::{
    CoincidenceTable, Experiment, ExperimentDataset, Side, SinglesTable, StatsError, EXACT_SUM_TOL,
    ROUNDED_SUM_TOL,
};
use crate::hilbert::{CMat, CVec, Complex64, LinalgError};
use crate::modelfit::{ModelError, ObservableModel, Provenance, StateVector};
use crate::hilbert::RoundingPrecision;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SchemaError {
    #[error("{path}: line {line}, column {column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: unknown field `{field}`")]
    UnknownField { path: String, field: String },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl SchemaError {
    fn invalid(path: &str, message: impl ToString) -> Self {
        SchemaError::Invalid {
            path: path.to_string(),
            message: message.to_string(),
        }
    }

    /// Malformed input as opposed to well-formed but invalid content.
    pub fn is_parse_error(&self) -> bool {
        matches!(self, SchemaError::Parse { .. } | SchemaError::UnknownField { .. } | SchemaError::Io { .. })
    }
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// Parses `text`, collecting the paths of fields the schema does not know.
/// Under `strict` the first unknown field is an error; otherwise it is returned
/// as a warning.
pub fn parse_json<T: DeserializeOwned>(text: &str, path: &str, strict: bool) -> Result<(T, Vec<String>), SchemaError> {
    let mut unknown = Vec::new();
    let mut de = serde_json::Deserializer::from_str(text);
    let value: Result<T, _> = serde_ignored::deserialize(&mut de, |p| unknown.push(p.to_string()));
    let value = value.and_then(|v| de.end().map(|_| v)).map_err(|e| SchemaError::Parse {
        path: path.to_string(),
        line: e.line(),
        column: e.column(),
        message: {
            let m = e.to_string();
            m.split(" at line ").next().unwrap_or(&m).to_string()
        },
    })?;
    if strict {
        if let Some(field) = unknown.into_iter().next() {
            return Err(SchemaError::UnknownField {
                path: path.to_string(),
                field,
            });
        }
        return Ok((value, Vec::new()));
    }
    let warnings = unknown
        .into_iter()
        .map(|f| format!("{path}: ignoring unknown field `{f}`"))
        .collect();
    Ok((value, warnings))
}

/// Pretty JSON with a trailing newline. Numbers use the shortest representation
/// that parses back to the same `f64`.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableBlock {
    pub labels: [String; 4],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probabilities: Option<[f64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counts: Option<[u64; 4]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SinglesBlock {
    pub labels: [String; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probabilities: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counts: Option<[u64; 2]>,
}

/// Four coincidence tables keyed `AB`, `AB'`, `A'B`, `A'B'`, each with either
/// probabilities or counts, and optional singles keyed `A`, `A'`, `B`, `B'`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetFile {
    pub schema_version: u32,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_subjects: Option<u64>,
    /// Probabilities are printed to a few decimals and may miss a unit sum by up to 0.005.
    #[serde(default, skip_serializing_if = "is_false")]
    pub rounded: bool,
    pub experiments: IndexMap<String, TableBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub singles: Option<IndexMap<String, SinglesBlock>>,
}

impl DatasetFile {
    pub fn parse(text: &str, path: &str, strict: bool) -> Result<(Self, Vec<String>), SchemaError> {
        let (file, warnings): (DatasetFile, _) = parse_json(text, path, strict)?;
        if file.schema_version != SCHEMA_VERSION {
            return Err(SchemaError::invalid(
                path,
                format!("unsupported schema_version {}", file.schema_version),
            ));
        }
        Ok((file, warnings))
    }

    pub fn to_dataset(&self, path: &str) -> Result<ExperimentDataset, SchemaError> {
        let err = |key: &str, e: StatsError| SchemaError::invalid(path, format!("{key}: {e}"));
        let sum_tol = if self.rounded { ROUNDED_SUM_TOL } else { EXACT_SUM_TOL };
        let mut tables = Vec::with_capacity(4);
        for (key, block) in &self.experiments {
            let exp: Experiment = key.parse().map_err(|e| err(key, e))?;
            let table = match (block.probabilities, block.counts) {
                (None, None) => return Err(SchemaError::invalid(path, format!("{key}: needs probabilities or counts"))),
                (Some(p), None) => CoincidenceTable::with_tolerance(block.labels.clone(), p, sum_tol),
                (p, Some(c)) => {
                    let n = self.n_subjects.unwrap_or_else(|| c.iter().sum());
                    let t = CoincidenceTable::from_counts(block.labels.clone(), c, n).map_err(|e| err(key, e))?;
                    if let Some(p) = p {
                        let dev = p.iter().zip(t.probs()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                        if dev > 1e-9 {
                            return Err(SchemaError::invalid(
                                path,
                                format!("{key}: probabilities disagree with counts by {dev:.3e}"),
                            ));
                        }
                    }
                    Ok(t)
                }
            }
            .map_err(|e| err(key, e))?;
            tables.push((exp, table));
        }
        let singles = match &self.singles {
            None => None,
            Some(blocks) => Some(singles_table(blocks, path)?),
        };
        ExperimentDataset::from_tables(self.name.clone(), self.n_subjects, tables, singles)
            .map_err(|e| SchemaError::invalid(path, e))
    }

    /// Probability-form file of a dataset; counts are kept when present.
    pub fn from_dataset(ds: &ExperimentDataset) -> Self {
        let experiments = ds
            .tables()
            .map(|(e, t)| {
                (
                    e.label().to_string(),
                    TableBlock {
                        labels: t.labels().clone(),
                        probabilities: t.counts().is_none().then(|| t.probs()),
                        counts: t.counts(),
                    },
                )
            })
            .collect();
        let singles = ds.singles().map(|s| {
            Side::ALL
                .iter()
                .map(|&side| {
                    (
                        side.label().to_string(),
                        SinglesBlock {
                            labels: s.labels(side).clone(),
                            probabilities: Some(s.get(side)),
                            counts: None,
                        },
                    )
                })
                .collect()
        });
        DatasetFile {
            schema_version: SCHEMA_VERSION,
            name: ds.name.clone(),
            n_subjects: ds.n_subjects,
            rounded: false,
            experiments,
            singles,
        }
    }
}

fn singles_table(blocks: &IndexMap<String, SinglesBlock>, path: &str) -> Result<SinglesTable, SchemaError> {
    let mut labels: [[String; 2]; 4] = Default::default();
    let mut probs = [[f64::NAN; 2]; 4];
    for (key, block) in blocks {
        let side: Side = key
            .parse()
            .map_err(|e: StatsError| SchemaError::invalid(path, format!("singles: {e}")))?;
        let k = Side::ALL.iter().position(|&s| s == side).unwrap();
        labels[k] = block.labels.clone();
        probs[k] = match (block.probabilities, block.counts) {
            (_, Some(c)) => {
                let n = c[0] + c[1];
                if n == 0 {
                    return Err(SchemaError::invalid(path, format!("singles {key}: zero counts")));
                }
                [c[0] as f64 / n as f64, c[1] as f64 / n as f64]
            }
            (Some(p), None) => p,
            (None, None) => {
                return Err(SchemaError::invalid(path, format!("singles {key}: needs probabilities or counts")))
            }
        };
    }
    if let Some(k) = probs.iter().position(|p| p[0].is_nan()) {
        return Err(SchemaError::invalid(
            path,
            format!("singles: missing measurement {}", Side::ALL[k]),
        ));
    }
    SinglesTable::new(labels, probs).map_err(|e| SchemaError::invalid(path, e))
}

/// A state as `[amplitude, phase in degrees]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    #[serde(default = "default_version")]
    pub schema_version: u32,
    pub polar_deg: Vec<[f64; 2]>,
    /// Amplitudes are printed to two decimals; the norm may miss 1 by up to 0.02.
    #[serde(default, skip_serializing_if = "is_false")]
    pub rounded: bool,
}

fn default_version() -> u32 {
    SCHEMA_VERSION
}

impl StateFile {
    pub fn from_vector(v: &CVec) -> Self {
        StateFile {
            schema_version: SCHEMA_VERSION,
            polar_deg: v.to_polar_deg().iter().map(|p| [p.amplitude, p.phase_deg]).collect(),
            rounded: false,
        }
    }

    pub fn to_vector(&self) -> Result<CVec, LinalgError> {
        let pairs: Vec<(f64, f64)> = self.polar_deg.iter().map(|p| (p[0], p[1])).collect();
        CVec::from_polar_deg(&pairs)
    }

    pub fn to_state(&self, provenance: Provenance) -> Result<StateVector, ModelError> {
        let v = self.to_vector()?;
        let tol = if self.rounded {
            StateVector::FIXTURE_NORM_TOL
        } else {
            StateVector::NORM_TOL
        };
        StateVector::with_norm_tol(v, provenance, tol)
    }
}

/// A 4x4 matrix as separate real and imaginary parts, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorFile {
    #[serde(default = "default_version")]
    pub schema_version: u32,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl OperatorFile {
    pub fn from_matrix(m: &CMat) -> Self {
        let part = |f: fn(&Complex64) -> f64| (0..m.rows()).map(|i| (0..m.cols()).map(|j| f(&m.get(i, j))).collect()).collect();
        OperatorFile {
            schema_version: SCHEMA_VERSION,
            re: part(|z| z.re),
            im: part(|z| z.im),
        }
    }

    pub fn to_matrix(&self) -> Result<CMat, LinalgError> {
        let rows = self.re.len();
        let cols = self.re.first().map_or(0, Vec::len);
        let shape_ok = self.im.len() == rows
            && self.re.iter().chain(&self.im).all(|r| r.len() == cols);
        if !shape_ok {
            return Err(LinalgError::DimensionMismatch { left: rows, right: self.im.len() });
        }
        let data = (0..rows)
            .flat_map(|i| (0..cols).map(move |j| (i, j)))
            .map(|(i, j)| Complex64::new(self.re[i][j], self.im[i][j]))
            .collect();
        CMat::new(rows, cols, data)
    }
}

/// One measurement: eigenvectors as `[amplitude, phase in degrees]` rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementBlock {
    pub labels: [String; 4],
    pub eigenvalues: [f64; 4],
    pub eigenvectors: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_operator: Option<OperatorFile>,
}

impl MeasurementBlock {
    pub fn from_model(m: &ObservableModel) -> Self {
        MeasurementBlock {
            labels: m.labels().clone(),
            eigenvalues: m.eigenvalues(),
            eigenvectors: m
                .eigenvectors()
                .iter()
                .map(|v| v.to_polar_deg().iter().map(|p| [p.amplitude, p.phase_deg]).collect())
                .collect(),
            reference_operator: None,
        }
    }

    pub fn vectors(&self) -> Result<Vec<CVec>, LinalgError> {
        self.eigenvectors
            .iter()
            .map(|v| CVec::from_polar_deg(&v.iter().map(|p| (p[0], p[1])).collect::<Vec<_>>()))
            .collect()
    }

    pub fn to_model(&self, precision: RoundingPrecision) -> Result<ObservableModel, ModelError> {
        ObservableModel::new(&self.vectors()?, self.eigenvalues, self.labels.clone(), precision)
    }
}

/// A component of a printed eigenvector known to be misprinted, with its replacement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Erratum {
    pub experiment: String,
    /// 1-based eigenvector index.
    pub vector: usize,
    /// 1-based component index.
    pub component: usize,
    pub field: String,
    pub printed: f64,
    pub corrected: f64,
    pub note: String,
}

/// A state and one measurement per experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub schema_version: u32,
    pub name: String,
    /// Values are printed to two decimals: relaxed norm checks and repair of the bases.
    #[serde(default, skip_serializing_if = "is_false")]
    pub rounded: bool,
    pub state: StateFile,
    pub measurements: IndexMap<String, MeasurementBlock>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub errata: Vec<Erratum>,
}

impl ModelFile {
    pub fn parse(text: &str, path: &str, strict: bool) -> Result<(Self, Vec<String>), SchemaError> {
        let (file, warnings): (ModelFile, _) = parse_json(text, path, strict)?;
        if file.schema_version != SCHEMA_VERSION {
            return Err(SchemaError::invalid(
                path,
                format!("unsupported schema_version {}", file.schema_version),
            ));
        }
        Ok((file, warnings))
    }

    /// Copy with every erratum's corrected value substituted.
    pub fn with_errata_applied(&self) -> Result<ModelFile, String> {
        let mut out = self.clone();
        for e in &self.errata {
            let block = out
                .measurements
                .get_mut(&e.experiment)
                .ok_or_else(|| format!("erratum names unknown experiment {}", e.experiment))?;
            let entry = block
                .eigenvectors
                .get_mut(e.vector.wrapping_sub(1))
                .and_then(|v| v.get_mut(e.component.wrapping_sub(1)))
                .ok_or_else(|| format!("erratum position {}:{} out of range", e.vector, e.component))?;
            let slot = match e.field.as_str() {
                "amplitude" => &mut entry[0],
                "phase_deg" => &mut entry[1],
                other => return Err(format!("erratum field {other:?} unknown")),
            };
            if *slot != e.printed {
                return Err(format!("erratum expects printed value {} but found {}", e.printed, slot));
            }
            *slot = e.corrected;
        }
        out.errata.clear();
        Ok(out)
    }

    pub fn state(&self, provenance: Provenance) -> Result<StateVector, ModelError> {
        let mut s = self.state.clone();
        s.rounded |= self.rounded;
        s.to_state(provenance)
    }

    /// Models keyed by experiment; bases are repaired with two-decimal precision
    /// when the file is marked `rounded`.
    pub fn models(&self, path: &str) -> Result<Vec<(Experiment, ObservableModel)>, SchemaError> {
        let precision = if self.rounded {
            RoundingPrecision::default()
        } else {
            RoundingPrecision {
                amplitude: 1e-12,
                phase_deg: 1e-10,
            }
        };
        self.measurements
            .iter()
            .map(|(key, block)| {
                let exp: Experiment = key.parse().map_err(|e| SchemaError::invalid(path, e))?;
                let m = block
                    .to_model(precision)
                    .map_err(|e| SchemaError::invalid(path, format!("{key}: {e}")))?;
                Ok((exp, m))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"{
  "schema_version": 1,
  "name": "tiny",
  "experiments": {
    "AB": {"labels": ["a","b","c","d"], "probabilities": [0.25, 0.25, 0.25, 0.25]},
    "AB'": {"labels": ["a","b","c","d"], "probabilities": [0.25, 0.25, 0.25, 0.25]},
    "A'B": {"labels": ["a","b","c","d"], "counts": [1, 1, 1, 1]},
    "A'B'": {"labels": ["a","b","c","d"], "probabilities": [0.25, 0.25, 0.25, 0.25]}
  },
  "colour": "blue"
}"#;

    #[test]
    fn unknown_fields_warn_or_fail() {
        let (_, warnings) = DatasetFile::parse(SMALL, "x.json", false).unwrap();
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("colour"));
        assert!(matches!(
            DatasetFile::parse(SMALL, "x.json", true),
            Err(SchemaError::UnknownField { .. })
        ));
    }

    #[test]
    fn parse_error_carries_position() {
        match DatasetFile::parse("{\n  \"schema_version\": 1,\n  \"name\": ", "t.json", false) {
            Err(SchemaError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_experiment_is_named() {
        let text = SMALL.replace(r#""A'B'": {"labels": ["a","b","c","d"], "probabilities": [0.25, 0.25, 0.25, 0.25]}"#, r#""AB''": {"labels": ["a","b","c","d"], "probabilities": [0.25, 0.25, 0.25, 0.25]}"#);
        let (f, _) = DatasetFile::parse(&text, "x", false).unwrap();
        let e = f.to_dataset("x").unwrap_err().to_string();
        assert!(e.contains("AB''"), "{e}");
    }

    #[test]
    fn canonical_round_trip() {
        let (f, _) = DatasetFile::parse(SMALL, "x", false).unwrap();
        let text = to_canonical_json(&f);
        let (g, w) = DatasetFile::parse(&text, "x", true).unwrap();
        assert!(w.is_empty());
        assert_eq!(f, g);
        assert_eq!(to_canonical_json(&g), text);
    }

    #[test]
    fn operator_file_round_trip() {
        let m = CMat::from_fn(4, 4, |i, j| Complex64::new(i as f64 * 0.1, j as f64 - 0.3)).unwrap();
        let f = OperatorFile::from_matrix(&m);
        assert_eq!(f.to_matrix().unwrap(), m);
        let bad = OperatorFile { schema_version: 1, re: vec![vec![1.0]], im: vec![] };
        assert!(bad.to_matrix().is_err());
    }
}
