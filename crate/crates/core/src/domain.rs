//! Shared domain types: criteria, comparison surveys, weights, decision
//! matrices and rankings.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Lowest value on the pairwise comparison scale.
pub const SCALE_MIN: f64 = 1.0;
/// Highest value on the pairwise comparison scale.
pub const SCALE_MAX: f64 = 9.0;

/// Tolerance on `Σ w = 1` for a [`WeightVector`].
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

/// Whether larger values of a criterion are preferred.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Benefit,
    Cost,
}

impl Sense {
    pub fn flipped(self) -> Self {
        match self {
            Sense::Benefit => Sense::Cost,
            Sense::Cost => Sense::Benefit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Criterion {
    pub id: String,
    pub name: String,
    pub sense: Sense,
}

impl Criterion {
    pub fn new(id: impl Into<String>, name: impl Into<String>, sense: Sense) -> Self {
        Criterion {
            id: id.into(),
            name: name.into(),
            sense,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CriteriaError {
    #[error("at least two criteria are required, got {0}")]
    TooFewCriteria(usize),
    #[error("duplicate criterion id `{0}`")]
    DuplicateId(String),
    #[error("criterion `{0}` has an empty name")]
    EmptyName(String),
    #[error("criterion at position {0} has an empty id")]
    EmptyId(usize),
}

/// Ordered set of criteria. The order is preserved through every stage of
/// the pipeline and indexes every vector and matrix column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct CriterionSet {
    criteria: Vec<Criterion>,
}

impl CriterionSet {
    pub fn new(criteria: Vec<Criterion>) -> Result<Self, CriteriaError> {
        if criteria.len() < 2 {
            return Err(CriteriaError::TooFewCriteria(criteria.len()));
        }
        let mut seen = HashSet::new();
        for (pos, c) in criteria.iter().enumerate() {
            if c.id.trim().is_empty() {
                return Err(CriteriaError::EmptyId(pos));
            }
            if c.name.trim().is_empty() {
                return Err(CriteriaError::EmptyName(c.id.clone()));
            }
            if !seen.insert(c.id.as_str()) {
                return Err(CriteriaError::DuplicateId(c.id.clone()));
            }
        }
        Ok(CriterionSet { criteria })
    }

    pub fn len(&self) -> usize {
        self.criteria.len()
    }

    pub fn is_empty(&self) -> bool {
        self.criteria.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Criterion> {
        self.criteria.iter()
    }

    pub fn get(&self, index: usize) -> Option<&Criterion> {
        self.criteria.get(index)
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.criteria.iter().position(|c| c.id == id)
    }

    pub fn ids(&self) -> Vec<&str> {
        self.criteria.iter().map(|c| c.id.as_str()).collect()
    }

    pub fn senses(&self) -> Vec<Sense> {
        self.criteria.iter().map(|c| c.sense).collect()
    }

    /// Same criteria with every sense reversed.
    pub fn with_flipped_senses(&self) -> Self {
        CriterionSet {
            criteria: self
                .criteria
                .iter()
                .map(|c| Criterion {
                    sense: c.sense.flipped(),
                    ..c.clone()
                })
                .collect(),
        }
    }
}

impl<'de> Deserialize<'de> for CriterionSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let criteria = Vec::<Criterion>::deserialize(deserializer)?;
        CriterionSet::new(criteria).map_err(serde::de::Error::custom)
    }
}

impl<'a> IntoIterator for &'a CriterionSet {
    type Item = &'a Criterion;
    type IntoIter = std::slice::Iter<'a, Criterion>;

    fn into_iter(self) -> Self::IntoIter {
        self.criteria.iter()
    }
}

/// The seven vehicle-selection criteria, in the order used by the published
/// weight table.
///
/// Senses are not stated alongside the weights; they are read off the
/// published ideal-solution rows, where the positive ideal takes the column
/// minimum for cost of ownership and the column maximum everywhere else.
pub fn canonical_criteria() -> CriterionSet {
    use Sense::*;
    CriterionSet::new(vec![
        Criterion::new("cost_of_ownership", "Cost of Ownership", Cost),
        Criterion::new("safety_comfort", "Safety & Comfort", Benefit),
        Criterion::new("range", "Range", Benefit),
        Criterion::new("network_effect", "Network Effect", Benefit),
        Criterion::new(
            "refuelling_infrastructure",
            "Re-fuelling Infrastructure & Convenience",
            Benefit,
        ),
        Criterion::new("environmental_impact", "Environmental Impact", Benefit),
        Criterion::new("policy_push", "Policy Push & Regulations", Benefit),
    ])
    .expect("canonical criteria are valid")
}

/// Number of independent comparisons a respondent supplies for `n` criteria.
///
/// Best-to-others has `n` entries with the self comparison fixed at 1;
/// others-to-worst likewise, and its best entry is tied to the best-to-worst
/// entry, leaving `2n - 3` free values.
pub fn elicitation_slots(n: usize) -> Result<usize, CriteriaError> {
    if n < 2 {
        return Err(CriteriaError::TooFewCriteria(n));
    }
    Ok(2 * n - 3)
}

/// One respondent's best-worst judgements.
///
/// `best` and `worst` are zero-based criterion indices. Comparisons are whole
/// numbers on the 1..=9 scale at the boundary but are held as reals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComparisonSurvey {
    pub respondent: String,
    pub best: usize,
    pub worst: usize,
    pub bo: Vec<f64>,
    pub ow: Vec<f64>,
}

/// Which comparison vector a violation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Vector {
    Bo,
    Ow,
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Vector::Bo => "bo",
            Vector::Ow => "ow",
        })
    }
}

/// A single broken survey invariant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Error)]
#[serde(tag = "kind")]
pub enum SurveyViolation {
    #[error("{vector} has {actual} entries, expected {expected}")]
    LengthMismatch {
        vector: Vector,
        expected: usize,
        actual: usize,
    },
    #[error("{role} index {index} is out of range for {n} criteria")]
    IndexOutOfRange {
        role: String,
        index: usize,
        n: usize,
    },
    #[error("{vector}[{index}] = {value} is not an integer in 1..=9")]
    OutOfScale {
        vector: Vector,
        index: usize,
        value: f64,
    },
    #[error("{vector} self comparison is {value}, expected 1")]
    SelfComparisonNotUnit { vector: Vector, value: f64 },
    #[error("bo[worst] = {bo_worst} differs from ow[best] = {ow_best}")]
    BestWorstMismatch { bo_worst: f64, ow_best: f64 },
    #[error("best and worst are both criterion {index}")]
    BestEqualsWorst { index: usize },
}

impl SurveyViolation {
    /// Stable code used in structured error reports.
    pub fn code(&self) -> &'static str {
        match self {
            SurveyViolation::LengthMismatch { .. } => "LengthMismatch",
            SurveyViolation::IndexOutOfRange { .. } => "IndexOutOfRange",
            SurveyViolation::OutOfScale { .. } => "OutOfScale",
            SurveyViolation::SelfComparisonNotUnit { .. } => "SelfComparisonNotUnit",
            SurveyViolation::BestWorstMismatch { .. } => "BestWorstMismatch",
            SurveyViolation::BestEqualsWorst { .. } => "BestEqualsWorst",
        }
    }
}

/// Every violation found in one survey.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Error)]
#[error("survey `{respondent}` is invalid: {}", summarize(.violations))]
pub struct InvalidSurvey {
    pub respondent: String,
    pub violations: Vec<SurveyViolation>,
}

fn summarize(violations: &[SurveyViolation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

fn on_scale(value: f64) -> bool {
    value.fract() == 0.0 && (SCALE_MIN..=SCALE_MAX).contains(&value)
}

/// Checks every survey invariant against `n` criteria, collecting all
/// violations rather than stopping at the first.
pub fn validate_survey(survey: &ComparisonSurvey, n: usize) -> Result<(), InvalidSurvey> {
    let mut violations = Vec::new();
    for (vector, values) in [(Vector::Bo, &survey.bo), (Vector::Ow, &survey.ow)] {
        if values.len() != n {
            violations.push(SurveyViolation::LengthMismatch {
                vector,
                expected: n,
                actual: values.len(),
            });
        }
        for (index, &value) in values.iter().enumerate() {
            if !on_scale(value) {
                violations.push(SurveyViolation::OutOfScale {
                    vector,
                    index,
                    value,
                });
            }
        }
    }
    for (role, index) in [("best", survey.best), ("worst", survey.worst)] {
        if index >= n {
            violations.push(SurveyViolation::IndexOutOfRange {
                role: role.to_string(),
                index,
                n,
            });
        }
    }
    if survey.best == survey.worst {
        violations.push(SurveyViolation::BestEqualsWorst { index: survey.best });
    }

    let bo_best = survey.bo.get(survey.best).copied();
    let ow_worst = survey.ow.get(survey.worst).copied();
    if let Some(value) = bo_best.filter(|&v| v != 1.0) {
        violations.push(SurveyViolation::SelfComparisonNotUnit {
            vector: Vector::Bo,
            value,
        });
    }
    if let Some(value) = ow_worst.filter(|&v| v != 1.0) {
        violations.push(SurveyViolation::SelfComparisonNotUnit {
            vector: Vector::Ow,
            value,
        });
    }
    if survey.best != survey.worst {
        if let (Some(&bo_worst), Some(&ow_best)) =
            (survey.bo.get(survey.worst), survey.ow.get(survey.best))
        {
            if bo_worst != ow_best {
                violations.push(SurveyViolation::BestWorstMismatch { bo_worst, ow_best });
            }
        }
    }

    if violations.is_empty() {
        Ok(())
    } else {
        Err(InvalidSurvey {
            respondent: survey.respondent.clone(),
            violations,
        })
    }
}

impl ComparisonSurvey {
    pub fn n(&self) -> usize {
        self.bo.len()
    }

    /// The best-to-worst comparison `a_BW`.
    pub fn best_to_worst(&self) -> f64 {
        self.bo[self.worst]
    }

    /// True when `a_Bj * a_jW = a_BW` for every criterion.
    pub fn is_fully_consistent(&self) -> bool {
        let a_bw = self.best_to_worst();
        self.bo
            .iter()
            .zip(&self.ow)
            .all(|(b, w)| (b * w - a_bw).abs() < 1e-12)
    }
}

/// Consistency ratio of a solved survey. Infinite when the survey is
/// inconsistent but its consistency index is zero (`a_BW = 1`); that case
/// serializes as the string `"inconsistent"`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct ConsistencyRatio(pub f64);

impl ConsistencyRatio {
    pub const INCONSISTENT: ConsistencyRatio = ConsistencyRatio(f64::INFINITY);

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_inconsistent(self) -> bool {
        self.0.is_infinite()
    }
}

impl fmt::Display for ConsistencyRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_inconsistent() {
            f.write_str("inconsistent")
        } else {
            write!(f, "{:.6}", self.0)
        }
    }
}

impl Serialize for ConsistencyRatio {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.is_inconsistent() {
            serializer.serialize_str("inconsistent")
        } else {
            serializer.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for ConsistencyRatio {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Number(f64),
            Text(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Number(v) if v >= 0.0 => Ok(ConsistencyRatio(v)),
            Repr::Number(v) => Err(serde::de::Error::custom(format!(
                "consistency ratio must be non-negative, got {v}"
            ))),
            Repr::Text(s) if s == "inconsistent" => Ok(ConsistencyRatio::INCONSISTENT),
            Repr::Text(s) => Err(serde::de::Error::custom(format!(
                "expected a number or \"inconsistent\", got {s:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WeightError {
    #[error("weight vector is empty")]
    Empty,
    #[error("weight {index} is {value}, weights must be finite and non-negative")]
    Negative { index: usize, value: f64 },
    #[error("weights sum to {0}, expected 1")]
    NotNormalized(f64),
    #[error("xi* must be finite and non-negative, got {0}")]
    InvalidXi(f64),
}

/// Normalized criterion weights with the optimality gap and consistency of
/// the judgements that produced them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightVector {
    pub weights: Vec<f64>,
    pub xi_star: f64,
    pub consistency_ratio: ConsistencyRatio,
}

impl WeightVector {
    pub fn new(
        weights: Vec<f64>,
        xi_star: f64,
        consistency_ratio: ConsistencyRatio,
    ) -> Result<Self, WeightError> {
        if weights.is_empty() {
            return Err(WeightError::Empty);
        }
        if let Some((index, &value)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(w.is_finite() && **w >= 0.0))
        {
            return Err(WeightError::Negative { index, value });
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(WeightError::NotNormalized(sum));
        }
        if !(xi_star.is_finite() && xi_star >= 0.0) {
            return Err(WeightError::InvalidXi(xi_star));
        }
        Ok(WeightVector {
            weights,
            xi_star,
            consistency_ratio,
        })
    }

    /// Weights supplied directly rather than solved from surveys.
    pub fn fixed(weights: Vec<f64>) -> Result<Self, WeightError> {
        WeightVector::new(weights, 0.0, ConsistencyRatio(0.0))
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

impl<'de> Deserialize<'de> for WeightVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            weights: Vec<f64>,
            #[serde(default)]
            xi_star: f64,
            #[serde(default)]
            consistency_ratio: ConsistencyRatio,
        }
        let raw = Raw::deserialize(deserializer)?;
        WeightVector::new(raw.weights, raw.xi_star, raw.consistency_ratio)
            .map_err(serde::de::Error::custom)
    }
}

/// Processing stage of a decision matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Raw,
    Normalized,
    Weighted,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Raw => "raw",
            Stage::Normalized => "normalized",
            Stage::Weighted => "weighted",
        })
    }
}

impl std::str::FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "raw" => Ok(Stage::Raw),
            "normalized" | "normalised" => Ok(Stage::Normalized),
            "weighted" => Ok(Stage::Weighted),
            other => Err(format!("unknown stage `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatrixError {
    #[error("matrix has no alternatives")]
    NoAlternatives,
    #[error("row {row} has {actual} values, expected {expected}")]
    RowLength {
        row: usize,
        expected: usize,
        actual: usize,
    },
    #[error("value at ({row}, {col}) is {value}; entries must be finite and non-negative")]
    InvalidValue { row: usize, col: usize, value: f64 },
    #[error("duplicate alternative `{0}`")]
    DuplicateAlternative(String),
}

/// Alternatives scored against criteria at a declared stage.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionMatrix {
    alternatives: Vec<String>,
    criteria: CriterionSet,
    values: Vec<Vec<f64>>,
    stage: Stage,
}

impl DecisionMatrix {
    pub fn new(
        alternatives: Vec<String>,
        criteria: CriterionSet,
        values: Vec<Vec<f64>>,
        stage: Stage,
    ) -> Result<Self, MatrixError> {
        if alternatives.is_empty() {
            return Err(MatrixError::NoAlternatives);
        }
        let mut seen = HashSet::new();
        for a in &alternatives {
            if !seen.insert(a.as_str()) {
                return Err(MatrixError::DuplicateAlternative(a.clone()));
            }
        }
        if values.len() != alternatives.len() {
            return Err(MatrixError::RowLength {
                row: values.len().min(alternatives.len()),
                expected: alternatives.len(),
                actual: values.len(),
            });
        }
        let n = criteria.len();
        for (row, r) in values.iter().enumerate() {
            if r.len() != n {
                return Err(MatrixError::RowLength {
                    row,
                    expected: n,
                    actual: r.len(),
                });
            }
            for (col, &value) in r.iter().enumerate() {
                if !(value.is_finite() && value >= 0.0) {
                    return Err(MatrixError::InvalidValue { row, col, value });
                }
            }
        }
        Ok(DecisionMatrix {
            alternatives,
            criteria,
            values,
            stage,
        })
    }

    pub fn alternatives(&self) -> &[String] {
        &self.alternatives
    }

    pub fn criteria(&self) -> &CriterionSet {
        &self.criteria
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn stage(&self) -> Stage {
        self.stage
    }

    /// Number of alternatives (rows).
    pub fn m(&self) -> usize {
        self.alternatives.len()
    }

    /// Number of criteria (columns).
    pub fn n(&self) -> usize {
        self.criteria.len()
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().map(move |row| row[j])
    }

    /// Same values under a different criterion set of equal length.
    pub fn with_criteria(&self, criteria: CriterionSet) -> Result<Self, MatrixError> {
        DecisionMatrix::new(
            self.alternatives.clone(),
            criteria,
            self.values.clone(),
            self.stage,
        )
    }

    pub(crate) fn with_values(&self, values: Vec<Vec<f64>>, stage: Stage) -> Self {
        DecisionMatrix {
            alternatives: self.alternatives.clone(),
            criteria: self.criteria.clone(),
            values,
            stage,
        }
    }
}

/// Ranking of one alternative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RankedAlternative {
    pub alternative: String,
    pub s_plus: f64,
    pub s_minus: f64,
    pub score: f64,
    pub rank: usize,
    /// Another alternative has exactly the same score.
    pub tie: bool,
}

/// Per-alternative separations, scores and ranks, in input order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RankingResult {
    pub alternatives: Vec<RankedAlternative>,
}

impl RankingResult {
    /// Entries sorted by rank.
    pub fn by_rank(&self) -> Vec<&RankedAlternative> {
        let mut sorted: Vec<_> = self.alternatives.iter().collect();
        sorted.sort_by_key(|a| a.rank);
        sorted
    }

    pub fn top(&self) -> Option<&RankedAlternative> {
        self.alternatives.iter().find(|a| a.rank == 1)
    }

    pub fn get(&self, alternative: &str) -> Option<&RankedAlternative> {
        self.alternatives
            .iter()
            .find(|a| a.alternative == alternative)
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.alternatives.iter().map(|a| a.rank).collect()
    }

    pub fn scores(&self) -> Vec<f64> {
        self.alternatives.iter().map(|a| a.score).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn survey(best: usize, worst: usize, bo: &[f64], ow: &[f64]) -> ComparisonSurvey {
        ComparisonSurvey {
            respondent: "r".into(),
            best,
            worst,
            bo: bo.to_vec(),
            ow: ow.to_vec(),
        }
    }

    fn codes(err: InvalidSurvey) -> Vec<&'static str> {
        err.violations.iter().map(SurveyViolation::code).collect()
    }

    #[test]
    fn consistent_survey_is_valid() {
        let s = survey(0, 2, &[1.0, 2.0, 4.0], &[4.0, 2.0, 1.0]);
        assert!(validate_survey(&s, 3).is_ok());
        assert!(s.is_fully_consistent());
    }

    #[test]
    fn best_worst_mismatch() {
        let s = survey(0, 2, &[1.0, 2.0, 4.0], &[5.0, 2.0, 1.0]);
        assert_eq!(
            codes(validate_survey(&s, 3).unwrap_err()),
            ["BestWorstMismatch"]
        );
    }

    #[test]
    fn entry_ten_is_out_of_scale() {
        let s = survey(
            0,
            5,
            &[1.0, 5.0, 3.0, 3.0, 3.0, 10.0, 2.0],
            &[10.0, 2.0, 3.0, 3.0, 3.0, 1.0, 5.0],
        );
        let err = validate_survey(&s, 7).unwrap_err();
        assert!(codes(err).iter().all(|c| *c == "OutOfScale"));
    }

    #[test]
    fn fractional_and_zero_entries_are_out_of_scale() {
        let s = survey(0, 2, &[1.0, 2.5, 4.0], &[4.0, 0.0, 1.0]);
        assert_eq!(
            codes(validate_survey(&s, 3).unwrap_err()),
            ["OutOfScale", "OutOfScale"]
        );
    }

    #[test]
    fn self_comparisons_must_be_unit() {
        let s = survey(0, 2, &[2.0, 2.0, 4.0], &[4.0, 2.0, 3.0]);
        assert_eq!(
            codes(validate_survey(&s, 3).unwrap_err()),
            ["SelfComparisonNotUnit", "SelfComparisonNotUnit"]
        );
    }

    #[test]
    fn length_mismatch_and_best_equals_worst() {
        let s = survey(1, 1, &[1.0, 1.0], &[1.0, 1.0, 1.0]);
        let c = codes(validate_survey(&s, 3).unwrap_err());
        assert!(c.contains(&"LengthMismatch"));
        assert!(c.contains(&"BestEqualsWorst"));
    }

    #[test]
    fn index_out_of_range() {
        let s = survey(0, 3, &[1.0, 2.0, 4.0], &[4.0, 2.0, 1.0]);
        assert!(codes(validate_survey(&s, 3).unwrap_err()).contains(&"IndexOutOfRange"));
    }

    #[test]
    fn canonical_catalog() {
        let c = canonical_criteria();
        assert_eq!(c.len(), 7);
        assert_eq!(c.get(0).unwrap().name, "Cost of Ownership");
        assert_eq!(c.get(0).unwrap().sense, Sense::Cost);
        let policy = c.get(c.position("policy_push").unwrap()).unwrap();
        assert_eq!(policy.name, "Policy Push & Regulations");
        assert_eq!(policy.sense, Sense::Benefit);
        assert_eq!(c.iter().filter(|c| c.sense == Sense::Cost).count(), 1);
        assert_eq!(canonical_criteria(), c);
    }

    #[test]
    fn slots() {
        assert_eq!(elicitation_slots(7), Ok(11));
        assert_eq!(elicitation_slots(2), Ok(1));
        assert_eq!(elicitation_slots(3), Ok(3));
        assert_eq!(elicitation_slots(1), Err(CriteriaError::TooFewCriteria(1)));
    }

    #[test]
    fn criterion_set_rejects_duplicates_and_singletons() {
        let a = Criterion::new("a", "A", Sense::Benefit);
        assert_eq!(
            CriterionSet::new(vec![a.clone()]),
            Err(CriteriaError::TooFewCriteria(1))
        );
        assert_eq!(
            CriterionSet::new(vec![a.clone(), a]),
            Err(CriteriaError::DuplicateId("a".into()))
        );
        let blank = Criterion::new("b", " ", Sense::Cost);
        assert!(CriterionSet::new(vec![Criterion::new("a", "A", Sense::Cost), blank]).is_err());
    }

    #[test]
    fn weight_vector_checks_sum() {
        assert!(WeightVector::fixed(vec![0.5, 0.5]).is_ok());
        assert!(matches!(
            WeightVector::fixed(vec![0.5, 0.6]),
            Err(WeightError::NotNormalized(_))
        ));
        assert!(matches!(
            WeightVector::fixed(vec![1.5, -0.5]),
            Err(WeightError::Negative { index: 1, .. })
        ));
    }

    #[test]
    fn inconsistent_ratio_serializes_as_text() {
        let w = WeightVector::new(vec![0.5, 0.5], 0.2, ConsistencyRatio::INCONSISTENT).unwrap();
        let json = serde_json::to_string(&w).unwrap();
        assert!(json.contains("\"inconsistent\""));
        let back: WeightVector = serde_json::from_str(&json).unwrap();
        assert!(back.consistency_ratio.is_inconsistent());
    }

    #[test]
    fn survey_rejects_unknown_fields() {
        let json = r#"{"respondent":"x","best":0,"worst":1,"bo":[1,2],"ow":[2,1],"extra":1}"#;
        assert!(serde_json::from_str::<ComparisonSurvey>(json).is_err());
    }
}
