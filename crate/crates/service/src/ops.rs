//! Computations behind each command and endpoint. Both front-ends call these,
//! so identical inputs give identical payloads.

use mcdm_core::bwm::solve_bwm;
use mcdm_core::pipeline::io::Sourced;
use mcdm_core::pipeline::sensitivity::{flip_threshold, sensitivity_scan, Direction};
use mcdm_core::pipeline::{survey_weights, RespondentWeights};
use mcdm_core::topsis;
use mcdm_core::{
    validate_survey, ComparisonSurvey, CriterionSet, DecisionMatrix, RankingResult, Stage,
    WeightVector,
};
use serde_json::json;

use crate::error::{ErrorClass, ServiceError};
use crate::report::{SensitivityResponse, Threshold, WeightsReport};

pub fn weights_report(
    criteria: &CriterionSet,
    surveys: &[Sourced<ComparisonSurvey>],
) -> Result<WeightsReport, ServiceError> {
    if surveys.is_empty() {
        return Err(ServiceError::new(
            ErrorClass::Conflict,
            "NoSurveys",
            "no surveys have been submitted",
            serde_json::Value::Null,
        ));
    }
    let (respondents, weights) = survey_weights(surveys, criteria)?;
    Ok(WeightsReport {
        criteria: criteria.ids().into_iter().map(String::from).collect(),
        weights: weights.weights,
        xi_star: weights.xi_star,
        consistency_ratio: weights.consistency_ratio,
        respondents,
    })
}

/// Validates and solves a single survey.
pub fn solve_one(
    criteria: &CriterionSet,
    survey: &ComparisonSurvey,
) -> Result<RespondentWeights, ServiceError> {
    validate_survey(survey, criteria.len()).map_err(|e| ServiceError::invalid_survey(&e, None))?;
    let solution = solve_bwm(survey)?;
    Ok(RespondentWeights {
        respondent: survey.respondent.clone(),
        weights: solution.weights.weights,
        xi_star: solution.xi_star,
        consistency_ratio: solution.weights.consistency_ratio,
    })
}

fn check_weights(matrix: &DecisionMatrix, weights: &WeightVector) -> Result<(), ServiceError> {
    if weights.len() != matrix.n() {
        return Err(ServiceError::new(
            ErrorClass::Validation,
            "LengthMismatch",
            format!("{} weights for {} criteria", weights.len(), matrix.n()),
            json!({ "expected": matrix.n(), "actual": weights.len() }),
        ));
    }
    Ok(())
}

fn missing_weights() -> ServiceError {
    ServiceError::new(
        ErrorClass::Conflict,
        "NoWeights",
        "weights are required: supply them or submit surveys first",
        serde_json::Value::Null,
    )
}

/// Ranks `matrix`. Weighted-stage matrices need no weights; if weights are
/// given they must match the criteria but are otherwise unused.
pub fn rank(
    matrix: &DecisionMatrix,
    weights: Option<&WeightVector>,
) -> Result<RankingResult, ServiceError> {
    if let Some(w) = weights {
        check_weights(matrix, w)?;
    }
    let weighted = match (matrix.stage(), weights) {
        (Stage::Weighted, _) => matrix.clone(),
        (_, Some(w)) => topsis::to_weighted(matrix, w)?,
        (_, None) => return Err(missing_weights()),
    };
    Ok(topsis::rank_weighted(&weighted)?)
}

pub fn parse_direction(s: &str) -> Result<Direction, ServiceError> {
    match s {
        "down" => Ok(Direction::Down),
        "up" => Ok(Direction::Up),
        other => Err(ServiceError::new(
            ErrorClass::BadInput,
            "InvalidDirection",
            format!("threshold direction must be `down` or `up`, got `{other}`"),
            json!({ "direction": other }),
        )),
    }
}

pub fn sensitivity(
    matrix: &DecisionMatrix,
    weights: Option<&WeightVector>,
    criterion: &str,
    deltas: &[f64],
    threshold: Option<Direction>,
) -> Result<SensitivityResponse, ServiceError> {
    let weights = weights.ok_or_else(missing_weights)?;
    check_weights(matrix, weights)?;
    let report = sensitivity_scan(matrix, weights, criterion, deltas)?;
    let threshold = match threshold {
        Some(direction) => Some(Threshold {
            direction: match direction {
                Direction::Down => "down".into(),
                Direction::Up => "up".into(),
            },
            flip: flip_threshold(matrix, weights, criterion, direction)?,
        }),
        None => None,
    };
    Ok(SensitivityResponse { report, threshold })
}
