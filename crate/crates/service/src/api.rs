//! HTTP API. Sessions live in memory; every request that changes a session
//! holds that session's lock for the whole computation, so concurrent edits
//! to one session serialize and other sessions are untouched.

use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::Router;
use mcdm_core::pipeline::export::to_json;
use mcdm_core::pipeline::io::{self, Sourced};
use mcdm_core::pipeline::store::RunStore;
use mcdm_core::pipeline::{run_and_persist, PipelineInputs, RunOptions, WeightSource};
use mcdm_core::{
    ComparisonSurvey, CriterionSet, DecisionMatrix, RankingResult, Stage, WeightVector,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{ErrorBody, ErrorClass, ServiceError};
use crate::ops;

const BODY: &str = "request body";

#[derive(Debug)]
pub struct Session {
    pub id: String,
    pub criteria: CriterionSet,
    /// Keyed by respondent; a later PUT replaces the earlier survey.
    pub surveys: BTreeMap<String, ComparisonSurvey>,
    pub matrix: Option<DecisionMatrix>,
    pub last_result: Option<(Option<WeightVector>, RankingResult)>,
}

impl Session {
    fn sourced_surveys(&self) -> Vec<Sourced<ComparisonSurvey>> {
        self.surveys
            .values()
            .map(|s| Sourced {
                source: format!("sessions/{}/surveys/{}", self.id, s.respondent),
                value: s.clone(),
            })
            .collect()
    }

    fn matrix(&self) -> Result<&DecisionMatrix, ServiceError> {
        self.matrix.as_ref().ok_or_else(|| {
            ServiceError::new(
                ErrorClass::Conflict,
                "NoMatrix",
                "no decision matrix has been uploaded",
                Value::Null,
            )
        })
    }

    /// Explicit weights, else the aggregate of the submitted surveys.
    fn weights(
        &self,
        explicit: Option<WeightVector>,
    ) -> Result<Option<WeightVector>, ServiceError> {
        if explicit.is_some() {
            return Ok(explicit);
        }
        if self.surveys.is_empty() {
            return Ok(None);
        }
        let report = ops::weights_report(&self.criteria, &self.sourced_surveys())?;
        Ok(Some(WeightVector::new(
            report.weights,
            report.xi_star,
            report.consistency_ratio,
        )?))
    }
}

#[derive(Default)]
struct Registry {
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
    created: AtomicU64,
}

/// Shared service state. Session ids are sequential, so a restarted service
/// replaying the same requests hands out the same ids.
#[derive(Clone, Default)]
pub struct AppState {
    registry: Arc<Registry>,
    store: Option<RunStore>,
}

impl AppState {
    pub fn new(store: Option<RunStore>) -> Self {
        AppState {
            registry: Arc::default(),
            store,
        }
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, ServiceError> {
        self.registry
            .sessions
            .read()
            .expect("session registry poisoned")
            .get(id)
            .cloned()
            .ok_or_else(|| ServiceError::unknown_session(id))
    }
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.class.http_status())
            .unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        json_response(status, &self.body)
    }
}

fn json_response<T: Serialize>(status: StatusCode, value: &T) -> Response {
    (
        status,
        [(header::CONTENT_TYPE, "application/json")],
        to_json(value),
    )
        .into_response()
}

type ApiResult = Result<Response, ServiceError>;

fn ok<T: Serialize>(value: &T) -> ApiResult {
    Ok(json_response(StatusCode::OK, value))
}

fn lock(session: &Mutex<Session>) -> std::sync::MutexGuard<'_, Session> {
    session
        .lock()
        .unwrap_or_else(|poisoned| poisoned.into_inner())
}

fn is_blank(body: &[u8]) -> bool {
    body.iter().all(u8::is_ascii_whitespace)
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/healthz", get(healthz))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/surveys/{respondent}", put(put_survey))
        .route("/sessions/{id}/weights", get(get_weights))
        .route("/sessions/{id}/matrix", put(put_matrix))
        .route("/sessions/{id}/rank", post(post_rank))
        .route("/sessions/{id}/sensitivity", post(post_sensitivity))
        .route("/sessions/{id}/snapshot", post(post_snapshot))
        .fallback(unknown_route)
        .with_state(state)
}

async fn healthz() -> &'static str {
    "ok\n"
}

async fn unknown_route() -> Response {
    json_response(
        StatusCode::NOT_FOUND,
        &ErrorBody {
            code: "UnknownRoute".into(),
            message: "no such endpoint".into(),
            detail: Value::Null,
        },
    )
}

#[derive(Serialize)]
struct SessionSummary<'a> {
    session_id: &'a str,
    criteria: &'a CriterionSet,
    respondents: Vec<&'a str>,
    matrix: Option<MatrixSummary>,
}

#[derive(Serialize)]
struct MatrixSummary {
    valid: bool,
    alternatives: Vec<String>,
    criteria: usize,
    stage: Stage,
}

impl MatrixSummary {
    fn of(m: &DecisionMatrix) -> Self {
        MatrixSummary {
            valid: true,
            alternatives: m.alternatives().to_vec(),
            criteria: m.n(),
            stage: m.stage(),
        }
    }
}

fn summary(s: &Session) -> SessionSummary<'_> {
    SessionSummary {
        session_id: &s.id,
        criteria: &s.criteria,
        respondents: s.surveys.keys().map(String::as_str).collect(),
        matrix: s.matrix.as_ref().map(MatrixSummary::of),
    }
}

async fn create_session(State(state): State<AppState>, body: Bytes) -> ApiResult {
    let criteria = io::parse_criteria(&body, BODY)?;
    let n = state.registry.created.fetch_add(1, Ordering::SeqCst) + 1;
    let id = format!("session-{n}");
    let session = Session {
        id: id.clone(),
        criteria,
        surveys: BTreeMap::new(),
        matrix: None,
        last_result: None,
    };
    let response = json_response(StatusCode::CREATED, &summary(&session));
    state
        .registry
        .sessions
        .write()
        .expect("session registry poisoned")
        .insert(id, Arc::new(Mutex::new(session)));
    Ok(response)
}

async fn get_session(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult {
    let session = state.session(&id)?;
    let s = lock(&session);
    ok(&summary(&s))
}

/// Survey body; `respondent` comes from the path and may be repeated here.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SurveyBody {
    #[serde(default)]
    respondent: Option<String>,
    best: usize,
    worst: usize,
    bo: Vec<f64>,
    ow: Vec<f64>,
}

async fn put_survey(
    State(state): State<AppState>,
    Path((id, respondent)): Path<(String, String)>,
    body: Bytes,
) -> ApiResult {
    let session = state.session(&id)?;
    let parsed: SurveyBody = io::from_json(&body, BODY)?;
    if let Some(named) = parsed.respondent.as_deref().filter(|r| *r != respondent) {
        return Err(ServiceError::new(
            ErrorClass::BadInput,
            "RespondentMismatch",
            format!("body names respondent `{named}` but the path names `{respondent}`"),
            json!({ "path": respondent, "body": named }),
        ));
    }
    let survey = ComparisonSurvey {
        respondent,
        best: parsed.best,
        worst: parsed.worst,
        bo: parsed.bo,
        ow: parsed.ow,
    };
    let mut s = lock(&session);
    let solved = ops::solve_one(&s.criteria, &survey)?;
    s.surveys.insert(survey.respondent.clone(), survey);
    s.last_result = None;
    ok(&solved)
}

async fn get_weights(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult {
    let session = state.session(&id)?;
    let s = lock(&session);
    ok(&ops::weights_report(&s.criteria, &s.sourced_surveys())?)
}

async fn put_matrix(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(query): Query<HashMap<String, String>>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult {
    let session = state.session(&id)?;
    let is_csv = headers
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|v| v.starts_with("text/csv"));
    let mut s = lock(&session);
    let matrix = if is_csv {
        let stage: Stage = query
            .get("stage")
            .ok_or_else(|| {
                ServiceError::new(
                    ErrorClass::BadInput,
                    "MissingStage",
                    "CSV matrices need a `stage` query parameter",
                    Value::Null,
                )
            })?
            .parse()
            .map_err(|e: String| {
                ServiceError::new(ErrorClass::BadInput, "InvalidStage", e, Value::Null)
            })?;
        io::parse_matrix_csv(&body, BODY, &s.criteria, stage)?
    } else {
        io::parse_matrix_json(&body, BODY, &s.criteria)?
    };
    let response = MatrixSummary::of(&matrix);
    s.matrix = Some(matrix);
    s.last_result = None;
    ok(&response)
}

fn optional_weights(body: &[u8]) -> Result<Option<WeightVector>, ServiceError> {
    if is_blank(body) {
        Ok(None)
    } else {
        Ok(Some(io::parse_weights(body, BODY)?))
    }
}

async fn post_rank(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult {
    let session = state.session(&id)?;
    let explicit = optional_weights(&body)?;
    let mut s = lock(&session);
    let weights = s.weights(explicit)?;
    let ranking = ops::rank(s.matrix()?, weights.as_ref())?;
    s.last_result = Some((weights, ranking.clone()));
    ok(&ranking)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SensitivityBody {
    criterion: String,
    deltas: Vec<f64>,
    #[serde(default)]
    weights: Option<Vec<f64>>,
    #[serde(default)]
    threshold: Option<String>,
}

async fn post_sensitivity(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult {
    let session = state.session(&id)?;
    let req: SensitivityBody = io::from_json(&body, BODY)?;
    let explicit = req.weights.map(WeightVector::fixed).transpose()?;
    let direction = req
        .threshold
        .as_deref()
        .map(ops::parse_direction)
        .transpose()?;
    let s = lock(&session);
    // explicit weights, then those of the last ranking, then the surveys
    let weights = match explicit {
        Some(w) => Some(w),
        None => match &s.last_result {
            Some((Some(w), _)) => Some(w.clone()),
            _ => s.weights(None)?,
        },
    };
    ok(&ops::sensitivity(
        s.matrix()?,
        weights.as_ref(),
        &req.criterion,
        &req.deltas,
        direction,
    )?)
}

async fn post_snapshot(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult {
    let session = state.session(&id)?;
    let store = state.store.as_ref().ok_or_else(|| {
        ServiceError::new(
            ErrorClass::Conflict,
            "StoreDisabled",
            "the service was started without a run store",
            Value::Null,
        )
    })?;
    let explicit = optional_weights(&body)?;
    let s = lock(&session);
    let weights = match explicit {
        Some(w) => WeightSource::Fixed(Sourced {
            source: BODY.into(),
            value: w,
        }),
        None if !s.surveys.is_empty() => WeightSource::Surveys(s.sourced_surveys()),
        None => match &s.last_result {
            Some((Some(w), _)) => WeightSource::Fixed(Sourced {
                source: format!("sessions/{}/rank", s.id),
                value: w.clone(),
            }),
            _ => {
                return Err(ServiceError::new(
                    ErrorClass::Conflict,
                    "NoWeights",
                    "weights are required: supply them or submit surveys first",
                    Value::Null,
                ))
            }
        },
    };
    let inputs = PipelineInputs {
        criteria: Sourced {
            source: format!("sessions/{}/criteria", s.id),
            value: s.criteria.clone(),
        },
        weights,
        matrix: Sourced {
            source: format!("sessions/{}/matrix", s.id),
            value: s.matrix()?.clone(),
        },
    };
    ok(&run_and_persist(&inputs, &RunOptions::default(), store)?)
}

/// Serves until Ctrl-C.
pub async fn serve(listener: tokio::net::TcpListener, state: AppState) -> std::io::Result<()> {
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
