//! Strict parsing of criteria, survey, matrix, weight, fleet and config
//! files. Unknown fields are rejected and every error names its source.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{
    validate_survey, ComparisonSurvey, CriterionSet, DecisionMatrix, InvalidSurvey, Stage,
    WeightVector,
};
use crate::tco::VehicleSpec;

/// Position of a problem inside an input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

fn at(location: &Option<Location>) -> String {
    location.map(|l| format!(":{l}")).unwrap_or_default()
}

#[derive(Debug, Error)]
pub enum InputError {
    #[error("{source_name}: {error}")]
    Io {
        source_name: String,
        #[source]
        error: std::io::Error,
    },
    #[error("{source_name}{}: parse error: {message}", at(.location))]
    Parse {
        source_name: String,
        location: Option<Location>,
        message: String,
    },
    #[error("{source_name}{}: schema error: {message}", at(.location))]
    Schema {
        source_name: String,
        location: Option<Location>,
        message: String,
    },
    #[error("{source_name}: {message}")]
    CrossReference {
        source_name: String,
        message: String,
    },
    #[error("{source_name} (record {index}): {error}")]
    InvalidSurvey {
        source_name: String,
        index: usize,
        error: InvalidSurvey,
    },
}

impl InputError {
    pub fn code(&self) -> &'static str {
        match self {
            InputError::Io { .. } => "IoError",
            InputError::Parse { .. } => "ParseError",
            InputError::Schema { .. } => "SchemaError",
            InputError::CrossReference { .. } => "CrossReferenceError",
            InputError::InvalidSurvey { .. } => "InvalidSurvey",
        }
    }

    pub fn is_not_found(&self) -> bool {
        matches!(self, InputError::Io { error, .. } if error.kind() == std::io::ErrorKind::NotFound)
    }

    fn schema(source_name: &str, message: impl fmt::Display) -> Self {
        InputError::Schema {
            source_name: source_name.to_string(),
            location: None,
            message: message.to_string(),
        }
    }
}

/// A value tagged with the input it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Sourced<T> {
    pub source: String,
    pub value: T,
}

/// Strict JSON decoding: syntax errors become `Parse`, shape errors `Schema`,
/// both with line and column.
pub fn from_json<T: DeserializeOwned>(bytes: &[u8], source_name: &str) -> Result<T, InputError> {
    serde_json::from_slice(bytes).map_err(|e| {
        let location = (e.line() > 0).then(|| Location {
            line: e.line(),
            column: e.column(),
        });
        let message = e.to_string();
        match e.classify() {
            serde_json::error::Category::Data => InputError::Schema {
                source_name: source_name.to_string(),
                location,
                message,
            },
            _ => InputError::Parse {
                source_name: source_name.to_string(),
                location,
                message,
            },
        }
    })
}

pub fn read_file(path: &Path) -> Result<Vec<u8>, InputError> {
    fs::read(path).map_err(|error| InputError::Io {
        source_name: path.display().to_string(),
        error,
    })
}

pub fn parse_criteria(bytes: &[u8], source_name: &str) -> Result<CriterionSet, InputError> {
    from_json(bytes, source_name)
}

/// Parses a survey and checks it against the criteria it refers to.
pub fn parse_survey(
    bytes: &[u8],
    source_name: &str,
    criteria: &CriterionSet,
) -> Result<ComparisonSurvey, InputError> {
    let survey: ComparisonSurvey = from_json(bytes, source_name)?;
    validate_survey(&survey, criteria.len()).map_err(|error| InputError::InvalidSurvey {
        source_name: source_name.to_string(),
        index: 0,
        error,
    })?;
    Ok(survey)
}

pub fn parse_weights(bytes: &[u8], source_name: &str) -> Result<WeightVector, InputError> {
    from_json(bytes, source_name)
}

pub fn parse_fleet(bytes: &[u8], source_name: &str) -> Result<Vec<VehicleSpec>, InputError> {
    let fleet: Vec<VehicleSpec> = from_json(bytes, source_name)?;
    for (index, spec) in fleet.iter().enumerate() {
        spec.validate()
            .map_err(|e| InputError::schema(source_name, format!("record {index}: {e}")))?;
    }
    Ok(fleet)
}

/// On-disk form of a decision matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub alternatives: Vec<String>,
    pub criteria_ref: Vec<String>,
    pub stage: Stage,
    pub values: Vec<Vec<f64>>,
}

impl From<&DecisionMatrix> for MatrixFile {
    fn from(m: &DecisionMatrix) -> Self {
        MatrixFile {
            alternatives: m.alternatives().to_vec(),
            criteria_ref: m.criteria().ids().into_iter().map(String::from).collect(),
            stage: m.stage(),
            values: m.values().to_vec(),
        }
    }
}

fn check_criteria_ref(
    ids: &[String],
    criteria: &CriterionSet,
    source_name: &str,
) -> Result<(), InputError> {
    let expected = criteria.ids();
    if ids.len() != expected.len() || ids.iter().zip(&expected).any(|(a, b)| a != b) {
        return Err(InputError::CrossReference {
            source_name: source_name.to_string(),
            message: format!(
                "matrix columns [{}] do not match criteria [{}]",
                ids.join(", "),
                expected.join(", ")
            ),
        });
    }
    Ok(())
}

pub fn parse_matrix_json(
    bytes: &[u8],
    source_name: &str,
    criteria: &CriterionSet,
) -> Result<DecisionMatrix, InputError> {
    let file: MatrixFile = from_json(bytes, source_name)?;
    check_criteria_ref(&file.criteria_ref, criteria, source_name)?;
    DecisionMatrix::new(file.alternatives, criteria.clone(), file.values, file.stage)
        .map_err(|e| InputError::schema(source_name, e))
}

/// CSV matrix: a header of criterion ids after one label column, then one
/// row per alternative. Comma-delimited, dot decimals, UTF-8.
pub fn parse_matrix_csv(
    bytes: &[u8],
    source_name: &str,
    criteria: &CriterionSet,
    stage: Stage,
) -> Result<DecisionMatrix, InputError> {
    let text = std::str::from_utf8(bytes).map_err(|e| InputError::Parse {
        source_name: source_name.to_string(),
        location: None,
        message: format!("not valid UTF-8: {e}"),
    })?;
    if text.trim().is_empty() {
        return Err(InputError::Parse {
            source_name: source_name.to_string(),
            location: None,
            message: "empty file".into(),
        });
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let csv_error = |e: csv::Error| {
        let location = e.position().map(|p| Location {
            line: p.line() as usize,
            column: 1,
        });
        InputError::Parse {
            source_name: source_name.to_string(),
            location,
            message: e.to_string(),
        }
    };
    let header = reader.headers().map_err(csv_error)?.clone();
    let ids: Vec<String> = header.iter().skip(1).map(String::from).collect();
    check_criteria_ref(&ids, criteria, source_name)?;

    let mut alternatives = Vec::new();
    let mut values = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.iter().all(str::is_empty) {
            continue;
        }
        let mut fields = record.iter();
        alternatives.push(fields.next().unwrap_or_default().to_string());
        let row = fields
            .enumerate()
            .map(|(j, field)| {
                field.parse::<f64>().map_err(|_| InputError::Schema {
                    source_name: source_name.to_string(),
                    location: Some(Location {
                        line,
                        column: j + 2,
                    }),
                    message: format!("`{field}` is not a number"),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        values.push(row);
    }
    DecisionMatrix::new(alternatives, criteria.clone(), values, stage)
        .map_err(|e| InputError::schema(source_name, e))
}

pub fn load_criteria(path: &Path) -> Result<CriterionSet, InputError> {
    parse_criteria(&read_file(path)?, &path.display().to_string())
}

pub fn load_weights(path: &Path) -> Result<WeightVector, InputError> {
    parse_weights(&read_file(path)?, &path.display().to_string())
}

pub fn load_fleet(path: &Path) -> Result<Vec<VehicleSpec>, InputError> {
    parse_fleet(&read_file(path)?, &path.display().to_string())
}

/// Loads a matrix by extension: `.csv` needs `stage`; JSON carries its own
/// stage, and a conflicting `stage` argument is an error.
pub fn load_matrix(
    path: &Path,
    criteria: &CriterionSet,
    stage: Option<Stage>,
) -> Result<DecisionMatrix, InputError> {
    let bytes = read_file(path)?;
    let name = path.display().to_string();
    let is_csv = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        let stage = stage
            .ok_or_else(|| InputError::schema(&name, "CSV matrices need an explicit stage"))?;
        parse_matrix_csv(&bytes, &name, criteria, stage)
    } else {
        let matrix = parse_matrix_json(&bytes, &name, criteria)?;
        match stage {
            Some(s) if s != matrix.stage() => Err(InputError::schema(
                &name,
                format!(
                    "file declares stage {} but {s} was requested",
                    matrix.stage()
                ),
            )),
            _ => Ok(matrix),
        }
    }
}

/// Surveys from a single file or every `*.json` in a directory, sorted by
/// file name.
pub fn load_surveys(
    path: &Path,
    criteria: &CriterionSet,
) -> Result<Vec<Sourced<ComparisonSurvey>>, InputError> {
    let files: Vec<PathBuf> = if path.is_dir() {
        let entries = fs::read_dir(path).map_err(|error| InputError::Io {
            source_name: path.display().to_string(),
            error,
        })?;
        let mut files = Vec::new();
        for entry in entries {
            let entry = entry.map_err(|error| InputError::Io {
                source_name: path.display().to_string(),
                error,
            })?;
            let p = entry.path();
            if p.extension().is_some_and(|e| e == "json") {
                files.push(p);
            }
        }
        files.sort();
        files
    } else {
        vec![path.to_path_buf()]
    };
    if files.is_empty() {
        return Err(InputError::schema(
            &path.display().to_string(),
            "no survey files found",
        ));
    }
    files
        .iter()
        .map(|p| {
            let name = p.display().to_string();
            Ok(Sourced {
                value: parse_survey(&read_file(p)?, &name, criteria)?,
                source: name,
            })
        })
        .collect()
}

/// One path or a list of paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PathList {
    One(PathBuf),
    Many(Vec<PathBuf>),
}

/// `pipeline --config` document. Paths are relative to the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub criteria: PathBuf,
    #[serde(default)]
    pub surveys: Option<PathList>,
    #[serde(default)]
    pub weights: Option<PathBuf>,
    pub matrix: PathBuf,
    #[serde(default)]
    pub stage: Option<Stage>,
    #[serde(default)]
    pub store: Option<PathBuf>,
    #[serde(default)]
    pub created_at: Option<chrono::DateTime<chrono::Utc>>,
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<(Self, PathBuf), InputError> {
        let config: PipelineConfig = from_json(&read_file(path)?, &path.display().to_string())?;
        if config.surveys.is_some() == config.weights.is_some() {
            return Err(InputError::schema(
                &path.display().to_string(),
                "exactly one of `surveys` or `weights` is required",
            ));
        }
        let base = path
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("."));
        Ok((config, base))
    }
}
