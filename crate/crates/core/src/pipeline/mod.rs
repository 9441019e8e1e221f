//! End-to-end orchestration: surveys to weights, weights and matrix to a
//! ranking, with persisted and exportable runs.

pub mod export;
pub mod io;
pub mod sensitivity;
pub mod store;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bwm::{aggregate_weights, solve_bwm, AggregateError, BwmError};
use crate::domain::{
    ComparisonSurvey, ConsistencyRatio, CriterionSet, DecisionMatrix, RankingResult, Stage,
    WeightVector,
};
use crate::topsis::{self, TopsisError};
use io::{InputError, MatrixFile, Sourced};
use store::{sha256_hex, RunStore, StoreError};

/// Where the criterion weights come from.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightSource {
    Surveys(Vec<Sourced<ComparisonSurvey>>),
    Fixed(Sourced<WeightVector>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineInputs {
    pub criteria: Sourced<CriterionSet>,
    pub weights: WeightSource,
    pub matrix: Sourced<DecisionMatrix>,
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Timestamp recorded on the run; defaults to now.
    pub created_at: Option<DateTime<Utc>>,
}

/// A reference to one canonicalized input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputRef {
    pub role: InputRole,
    pub source: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputRole {
    Criteria,
    Survey,
    Weights,
    Matrix,
}

/// Solved weights of a single respondent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RespondentWeights {
    pub respondent: String,
    pub weights: Vec<f64>,
    pub xi_star: f64,
    pub consistency_ratio: ConsistencyRatio,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineRun {
    pub run_id: String,
    pub inputs: Vec<InputRef>,
    pub stage: Stage,
    pub criteria: Vec<String>,
    pub respondents: Vec<RespondentWeights>,
    pub weights: WeightVector,
    pub ranking: RankingResult,
    pub created_at: String,
}

impl PipelineRun {
    /// Equal apart from the timestamp.
    pub fn same_result(&self, other: &PipelineRun) -> bool {
        PipelineRun {
            created_at: String::new(),
            ..self.clone()
        } == PipelineRun {
            created_at: String::new(),
            ..other.clone()
        }
    }

    pub fn input(&self, role: InputRole) -> Option<&InputRef> {
        self.inputs.iter().find(|i| i.role == role)
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error("{source_name} (record {index}): {error}")]
    Survey {
        source_name: String,
        index: usize,
        #[source]
        error: BwmError,
    },
    #[error(transparent)]
    Aggregate(#[from] AggregateError),
    #[error("{source_name}: {error}")]
    Topsis {
        source_name: String,
        #[source]
        error: TopsisError,
    },
    #[error("{source_name}: {message}")]
    CrossReference {
        source_name: String,
        message: String,
    },
    #[error(transparent)]
    Store(#[from] StoreError),
}

impl PipelineError {
    /// True for errors caused by the inputs rather than the engine itself.
    pub fn is_validation(&self) -> bool {
        match self {
            PipelineError::Input(_)
            | PipelineError::Aggregate(_)
            | PipelineError::CrossReference { .. } => true,
            PipelineError::Survey { error, .. } => matches!(error, BwmError::InvalidSurvey(_)),
            PipelineError::Topsis { .. } => true,
            PipelineError::Store(StoreError::UnknownRun(_)) => true,
            PipelineError::Store(_) => false,
        }
    }
}

/// Canonical JSON used for hashing and for the object store.
pub fn canonical_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    serde_json::to_vec(value).expect("domain values serialize")
}

/// Solves every survey and averages the results.
pub fn survey_weights(
    surveys: &[Sourced<ComparisonSurvey>],
    criteria: &CriterionSet,
) -> Result<(Vec<RespondentWeights>, WeightVector), PipelineError> {
    let mut respondents = Vec::with_capacity(surveys.len());
    let mut vectors = Vec::with_capacity(surveys.len());
    for (index, s) in surveys.iter().enumerate() {
        if s.value.n() != criteria.len() {
            return Err(PipelineError::CrossReference {
                source_name: s.source.clone(),
                message: format!(
                    "survey has {} comparisons but there are {} criteria",
                    s.value.n(),
                    criteria.len()
                ),
            });
        }
        let solution = solve_bwm(&s.value).map_err(|error| PipelineError::Survey {
            source_name: s.source.clone(),
            index,
            error,
        })?;
        respondents.push(RespondentWeights {
            respondent: s.value.respondent.clone(),
            weights: solution.weights.weights.clone(),
            xi_star: solution.xi_star,
            consistency_ratio: solution.weights.consistency_ratio,
        });
        vectors.push(solution.weights);
    }
    let aggregate = aggregate_weights(&vectors)?;
    Ok((respondents, aggregate))
}

/// Ranks `matrix` with `weights`. Raw and normalized matrices are brought to
/// the weighted stage first; weighted matrices are ranked as given.
pub fn rank_matrix(
    matrix: &DecisionMatrix,
    weights: &WeightVector,
) -> Result<RankingResult, TopsisError> {
    if matrix.stage() != Stage::Weighted && weights.len() != matrix.n() {
        return Err(TopsisError::LengthMismatch {
            what: "weights",
            expected: matrix.n(),
            actual: weights.len(),
        });
    }
    topsis::rank_weighted(&topsis::to_weighted(matrix, weights)?)
}

fn input_refs(inputs: &PipelineInputs) -> Vec<(InputRef, Vec<u8>)> {
    let mut refs = Vec::new();
    let mut push = |role, source: &str, bytes: Vec<u8>| {
        refs.push((
            InputRef {
                role,
                source: source.to_string(),
                sha256: sha256_hex(&bytes),
            },
            bytes,
        ));
    };
    push(
        InputRole::Criteria,
        &inputs.criteria.source,
        canonical_bytes(&inputs.criteria.value),
    );
    match &inputs.weights {
        WeightSource::Surveys(surveys) => {
            for s in surveys {
                push(InputRole::Survey, &s.source, canonical_bytes(&s.value));
            }
        }
        WeightSource::Fixed(w) => push(InputRole::Weights, &w.source, canonical_bytes(&w.value)),
    }
    push(
        InputRole::Matrix,
        &inputs.matrix.source,
        canonical_bytes(&MatrixFile::from(&inputs.matrix.value)),
    );
    refs
}

/// Run id: the first 16 hex digits of the hash over every input hash and
/// role, in order. Source names do not contribute.
fn run_id(refs: &[InputRef]) -> String {
    let mut text = String::new();
    for r in refs {
        let role = serde_json::to_string(&r.role).expect("roles serialize");
        text.push_str(&format!("{role}:{}\n", r.sha256));
    }
    sha256_hex(text.as_bytes())[..16].to_string()
}

/// Full pipeline without persistence.
pub fn run_pipeline(
    inputs: &PipelineInputs,
    options: &RunOptions,
) -> Result<PipelineRun, PipelineError> {
    compute(inputs, options).map(|(run, _)| run)
}

fn compute(
    inputs: &PipelineInputs,
    options: &RunOptions,
) -> Result<(PipelineRun, Vec<Vec<u8>>), PipelineError> {
    let criteria = &inputs.criteria.value;
    let matrix = &inputs.matrix.value;
    if matrix.criteria() != criteria {
        return Err(PipelineError::CrossReference {
            source_name: inputs.matrix.source.clone(),
            message: "matrix criteria differ from the criteria file".into(),
        });
    }

    let (respondents, weights) = match &inputs.weights {
        WeightSource::Surveys(surveys) => survey_weights(surveys, criteria)?,
        WeightSource::Fixed(w) => {
            if w.value.len() != criteria.len() {
                return Err(PipelineError::CrossReference {
                    source_name: w.source.clone(),
                    message: format!("{} weights for {} criteria", w.value.len(), criteria.len()),
                });
            }
            (Vec::new(), w.value.clone())
        }
    };

    let ranking = rank_matrix(matrix, &weights).map_err(|error| PipelineError::Topsis {
        source_name: inputs.matrix.source.clone(),
        error,
    })?;

    let (refs, blobs): (Vec<InputRef>, Vec<Vec<u8>>) = input_refs(inputs).into_iter().unzip();
    let created_at = options
        .created_at
        .unwrap_or_else(Utc::now)
        .to_rfc3339_opts(SecondsFormat::Secs, true);
    let run = PipelineRun {
        run_id: run_id(&refs),
        inputs: refs,
        stage: matrix.stage(),
        criteria: criteria.ids().into_iter().map(String::from).collect(),
        respondents,
        weights,
        ranking,
        created_at,
    };
    Ok((run, blobs))
}

/// Runs the pipeline and persists the run and its canonical inputs.
pub fn run_and_persist(
    inputs: &PipelineInputs,
    options: &RunOptions,
    store: &RunStore,
) -> Result<PipelineRun, PipelineError> {
    let (run, blobs) = compute(inputs, options)?;
    for blob in &blobs {
        store.put_object(blob)?;
    }
    Ok(store.persist(run)?)
}

/// Inputs of a stored run, rebuilt from the object store.
#[derive(Debug, Clone, PartialEq)]
pub struct StoredInputs {
    pub criteria: CriterionSet,
    pub matrix: DecisionMatrix,
    pub weights: WeightVector,
}

pub fn load_run_inputs(store: &RunStore, run: &PipelineRun) -> Result<StoredInputs, PipelineError> {
    let object = |role: InputRole| -> Result<(String, Vec<u8>), PipelineError> {
        let r = run
            .input(role)
            .ok_or_else(|| PipelineError::CrossReference {
                source_name: run.run_id.clone(),
                message: format!("run has no {role:?} input"),
            })?;
        Ok((r.source.clone(), store.get_object(&r.sha256)?))
    };
    let (criteria_source, criteria_bytes) = object(InputRole::Criteria)?;
    let criteria = io::parse_criteria(&criteria_bytes, &criteria_source)?;
    let (matrix_source, matrix_bytes) = object(InputRole::Matrix)?;
    let matrix = io::parse_matrix_json(&matrix_bytes, &matrix_source, &criteria)?;
    Ok(StoredInputs {
        criteria,
        matrix,
        weights: run.weights.clone(),
    })
}

/// Re-runs a stored run from its hashed inputs.
pub fn replay(store: &RunStore, run: &PipelineRun) -> Result<PipelineRun, PipelineError> {
    let criteria_ref = run.input(InputRole::Criteria);
    let stored = load_run_inputs(store, run)?;
    let weights = match run.input(InputRole::Weights) {
        Some(w) => WeightSource::Fixed(Sourced {
            source: w.source.clone(),
            value: io::parse_weights(&store.get_object(&w.sha256)?, &w.source)?,
        }),
        None => WeightSource::Surveys(
            run.inputs
                .iter()
                .filter(|i| i.role == InputRole::Survey)
                .map(|i| {
                    let bytes = store.get_object(&i.sha256)?;
                    Ok(Sourced {
                        source: i.source.clone(),
                        value: io::parse_survey(&bytes, &i.source, &stored.criteria)?,
                    })
                })
                .collect::<Result<Vec<_>, PipelineError>>()?,
        ),
    };
    let inputs = PipelineInputs {
        criteria: Sourced {
            source: criteria_ref.map(|r| r.source.clone()).unwrap_or_default(),
            value: stored.criteria,
        },
        weights,
        matrix: Sourced {
            source: run
                .input(InputRole::Matrix)
                .map(|r| r.source.clone())
                .unwrap_or_default(),
            value: stored.matrix,
        },
    };
    let created_at = DateTime::parse_from_rfc3339(&run.created_at)
        .ok()
        .map(|t| t.with_timezone(&Utc));
    run_pipeline(&inputs, &RunOptions { created_at })
}

#[derive(Debug, Error)]
pub enum RunSensitivityError {
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Sensitivity(#[from] sensitivity::SensitivityError),
}

impl From<StoreError> for RunSensitivityError {
    fn from(e: StoreError) -> Self {
        RunSensitivityError::Pipeline(e.into())
    }
}

/// Sensitivity scan over a persisted run, using the inputs it hashed.
pub fn scan_run(
    store: &RunStore,
    run_id: &str,
    criterion: &str,
    deltas: &[f64],
) -> Result<sensitivity::SensitivityReport, RunSensitivityError> {
    let run = store.load(run_id)?;
    let stored = load_run_inputs(store, &run)?;
    Ok(sensitivity::sensitivity_scan(
        &stored.matrix,
        &stored.weights,
        criterion,
        deltas,
    )?)
}
