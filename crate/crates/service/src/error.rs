//! One error shape for both front-ends: a stable code, a message, and a
//! structured detail. The class decides the HTTP status and CLI exit code.

use mcdm_core::bwm::{AggregateError, BwmError};
use mcdm_core::pipeline::io::InputError;
use mcdm_core::pipeline::sensitivity::SensitivityError;
use mcdm_core::pipeline::store::StoreError;
use mcdm_core::pipeline::{PipelineError, RunSensitivityError};
use mcdm_core::tco::TcoError;
use mcdm_core::topsis::TopsisError;
use mcdm_core::{CriteriaError, InvalidSurvey, MatrixError, WeightError};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Malformed request or input document.
    BadInput,
    /// Well-formed input that breaks a domain rule.
    Validation,
    NotFound,
    /// The request needs state the session does not have yet.
    Conflict,
    Internal,
}

impl ErrorClass {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorClass::Internal => 2,
            _ => 1,
        }
    }

    pub fn http_status(self) -> u16 {
        match self {
            ErrorClass::BadInput => 400,
            ErrorClass::NotFound => 404,
            ErrorClass::Conflict => 409,
            ErrorClass::Validation => 422,
            ErrorClass::Internal => 500,
        }
    }
}

/// Wire form of every error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
    pub detail: Value,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ServiceError {
    pub class: ErrorClass,
    pub body: ErrorBody,
}

impl ServiceError {
    pub fn new(class: ErrorClass, code: &str, message: impl Into<String>, detail: Value) -> Self {
        ServiceError {
            class,
            body: ErrorBody {
                code: code.to_string(),
                message: message.into(),
                detail,
            },
        }
    }

    pub fn code(&self) -> &str {
        &self.body.code
    }

    pub fn internal(message: impl Into<String>) -> Self {
        ServiceError::new(ErrorClass::Internal, "InternalError", message, Value::Null)
    }

    pub fn unknown_session(id: &str) -> Self {
        ServiceError::new(
            ErrorClass::NotFound,
            "UnknownSession",
            format!("no session `{id}`"),
            json!({ "session_id": id }),
        )
    }

    pub fn invalid_survey(e: &InvalidSurvey, source: Option<(&str, usize)>) -> Self {
        let mut detail = json!({
            "respondent": e.respondent,
            "violations": e.violations,
        });
        if let Some((name, index)) = source {
            detail["source"] = json!(name);
            detail["index"] = json!(index);
        }
        ServiceError::new(
            ErrorClass::Validation,
            "ValidationFailed",
            e.to_string(),
            detail,
        )
    }
}

impl std::fmt::Display for ServiceError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.body.code, self.body.message)
    }
}

impl std::error::Error for ServiceError {}

impl From<InputError> for ServiceError {
    fn from(e: InputError) -> Self {
        let message = e.to_string();
        match &e {
            InputError::Io { source_name, error } => {
                let (code, class) = if e.is_not_found() {
                    ("FileNotFound", ErrorClass::BadInput)
                } else {
                    ("IoError", ErrorClass::BadInput)
                };
                ServiceError::new(
                    class,
                    code,
                    message,
                    json!({ "source": source_name, "error": error.to_string() }),
                )
            }
            InputError::Parse {
                source_name,
                location,
                ..
            }
            | InputError::Schema {
                source_name,
                location,
                ..
            } => ServiceError::new(
                ErrorClass::BadInput,
                e.code(),
                message,
                json!({
                    "source": source_name,
                    "line": location.map(|l| l.line),
                    "column": location.map(|l| l.column),
                }),
            ),
            InputError::CrossReference { source_name, .. } => ServiceError::new(
                ErrorClass::Validation,
                e.code(),
                message,
                json!({ "source": source_name }),
            ),
            InputError::InvalidSurvey {
                source_name,
                index,
                error,
            } => ServiceError::invalid_survey(error, Some((source_name, *index))),
        }
    }
}

impl From<BwmError> for ServiceError {
    fn from(e: BwmError) -> Self {
        match &e {
            BwmError::InvalidSurvey(s) => ServiceError::invalid_survey(s, None),
            BwmError::MismatchedInputs { .. } => ServiceError::new(
                ErrorClass::Validation,
                "MismatchedInputs",
                e.to_string(),
                Value::Null,
            ),
            BwmError::Infeasible { .. } | BwmError::NumericalFailure(_) => ServiceError::new(
                ErrorClass::Internal,
                "SolverFailure",
                e.to_string(),
                Value::Null,
            ),
        }
    }
}

impl From<AggregateError> for ServiceError {
    fn from(e: AggregateError) -> Self {
        let code = match e {
            AggregateError::EmptyInput => "NoSurveys",
            AggregateError::LengthMismatch { .. } => "LengthMismatch",
        };
        ServiceError::new(ErrorClass::Validation, code, e.to_string(), Value::Null)
    }
}

impl From<TopsisError> for ServiceError {
    fn from(e: TopsisError) -> Self {
        let code = match &e {
            TopsisError::WrongStage { .. } => "WrongStage",
            TopsisError::DegenerateColumn { .. } => "DegenerateColumn",
            TopsisError::LengthMismatch { .. } => "LengthMismatch",
            TopsisError::EmptyMatrix => "EmptyMatrix",
            TopsisError::DimensionMismatch { .. } => "DimensionMismatch",
            TopsisError::DegenerateAlternative { .. } => "DegenerateAlternative",
            TopsisError::ZeroWeight { .. } => "ZeroWeight",
        };
        let class = match e {
            TopsisError::DimensionMismatch { .. } => ErrorClass::Internal,
            _ => ErrorClass::Validation,
        };
        ServiceError::new(class, code, e.to_string(), Value::Null)
    }
}

impl From<SensitivityError> for ServiceError {
    fn from(e: SensitivityError) -> Self {
        let (code, detail) = match &e {
            SensitivityError::WeightedEntryStage { criterion } => {
                ("WeightedEntryStage", json!({ "criterion": criterion }))
            }
            SensitivityError::DeltaOutOfRange {
                criterion,
                weight,
                delta,
            } => (
                "DeltaOutOfRange",
                json!({ "criterion": criterion, "weight": weight, "delta": delta }),
            ),
            SensitivityError::UnknownCriterion(c) => {
                ("UnknownCriterion", json!({ "criterion": c }))
            }
            SensitivityError::Topsis(t) => return t.clone().into(),
        };
        ServiceError::new(ErrorClass::Validation, code, e.to_string(), detail)
    }
}

impl From<StoreError> for ServiceError {
    fn from(e: StoreError) -> Self {
        match &e {
            StoreError::UnknownRun(id) => ServiceError::new(
                ErrorClass::NotFound,
                "UnknownRun",
                e.to_string(),
                json!({ "run_id": id }),
            ),
            _ => ServiceError::new(
                ErrorClass::Internal,
                "StoreError",
                e.to_string(),
                Value::Null,
            ),
        }
    }
}

impl From<PipelineError> for ServiceError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Input(e) => e.into(),
            PipelineError::Survey {
                source_name,
                index,
                error,
            } => {
                let mut err = ServiceError::from(error);
                if let Value::Object(map) = &mut err.body.detail {
                    map.insert("source".into(), json!(source_name));
                    map.insert("index".into(), json!(index));
                } else {
                    err.body.detail = json!({ "source": source_name, "index": index });
                }
                err
            }
            PipelineError::Aggregate(e) => e.into(),
            PipelineError::Topsis { source_name, error } => {
                let mut err = ServiceError::from(error);
                err.body.message = format!("{source_name}: {}", err.body.message);
                err.body.detail = json!({ "source": source_name });
                err
            }
            e @ PipelineError::CrossReference { .. } => ServiceError::new(
                ErrorClass::Validation,
                "CrossReferenceError",
                e.to_string(),
                Value::Null,
            ),
            PipelineError::Store(e) => e.into(),
        }
    }
}

impl From<RunSensitivityError> for ServiceError {
    fn from(e: RunSensitivityError) -> Self {
        match e {
            RunSensitivityError::Pipeline(e) => e.into(),
            RunSensitivityError::Sensitivity(e) => e.into(),
        }
    }
}

impl From<TcoError> for ServiceError {
    fn from(e: TcoError) -> Self {
        let code = match e {
            TcoError::InvalidSpec { .. } => "InvalidSpec",
            TcoError::NoMatchingVehicles { .. } => "NoMatchingVehicles",
        };
        ServiceError::new(ErrorClass::Validation, code, e.to_string(), Value::Null)
    }
}

impl From<CriteriaError> for ServiceError {
    fn from(e: CriteriaError) -> Self {
        ServiceError::new(
            ErrorClass::Validation,
            "InvalidCriteria",
            e.to_string(),
            Value::Null,
        )
    }
}

impl From<MatrixError> for ServiceError {
    fn from(e: MatrixError) -> Self {
        ServiceError::new(
            ErrorClass::Validation,
            "InvalidMatrix",
            e.to_string(),
            Value::Null,
        )
    }
}

impl From<WeightError> for ServiceError {
    fn from(e: WeightError) -> Self {
        ServiceError::new(
            ErrorClass::Validation,
            "InvalidWeights",
            e.to_string(),
            Value::Null,
        )
    }
}
