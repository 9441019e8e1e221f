//! What-if analysis: shift one criterion's weight and re-rank.
//!
//! Perturbing criterion `j` by `delta` sets `w_j' = w_j + delta` and scales
//! every other weight by `(1 - w_j') / (1 - w_j)`, which keeps the vector
//! summing to one and lets `delta = 1 - w_j` hand the whole weight to `j`.
//! `delta` must satisfy `0 < w_j + delta <= 1`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{DecisionMatrix, RankingResult, Stage, WeightVector};
use crate::topsis::{self, TopsisError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SensitivityError {
    #[error("weighted-stage matrix cannot be reweighted: weight of `{criterion}` is zero")]
    WeightedEntryStage { criterion: String },
    #[error("delta {delta} moves weight {weight} of `{criterion}` outside (0, 1]")]
    DeltaOutOfRange {
        criterion: String,
        weight: f64,
        delta: f64,
    },
    #[error("unknown criterion `{0}`")]
    UnknownCriterion(String),
    #[error(transparent)]
    Topsis(#[from] TopsisError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensitivityEntry {
    pub delta: f64,
    pub weights: Vec<f64>,
    pub reranking: RankingResult,
    /// The rank-1 alternative differs from the base ranking.
    pub flipped: bool,
    /// Alternatives whose rank differs from the base ranking.
    pub rank_changes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensitivityReport {
    pub criterion: String,
    pub base_weights: Vec<f64>,
    pub base_ranking: RankingResult,
    pub entries: Vec<SensitivityEntry>,
}

/// Smallest perturbation in one direction that changes the top alternative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlipThreshold {
    pub criterion: String,
    /// First delta (to within the search tolerance) at which the top changes.
    pub delta: f64,
    /// Largest delta of the same sign that keeps the base top.
    pub last_stable: f64,
    pub base_top: String,
    pub new_top: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Down,
    Up,
}

/// Search resolution of [`flip_threshold`] in delta.
pub const THRESHOLD_TOLERANCE: f64 = 1e-9;
const COARSE_STEPS: usize = 400;

/// Perturbed weight vector; `delta = 0` returns `weights` unchanged.
pub fn perturb_weights(
    weights: &[f64],
    j: usize,
    delta: f64,
    criterion: &str,
) -> Result<Vec<f64>, SensitivityError> {
    let w = weights[j];
    let target = w + delta;
    if !(delta.is_finite() && target > 0.0 && target <= 1.0) {
        return Err(SensitivityError::DeltaOutOfRange {
            criterion: criterion.to_string(),
            weight: w,
            delta,
        });
    }
    if delta == 0.0 {
        return Ok(weights.to_vec());
    }
    let rest = 1.0 - w;
    let others = weights.len() - 1;
    Ok(weights
        .iter()
        .enumerate()
        .map(|(k, &wk)| {
            if k == j {
                target
            } else if rest > 0.0 {
                wk * (1.0 - target) / rest
            } else {
                // all weight sat on `j`; spread the freed share evenly
                (1.0 - target) / others as f64
            }
        })
        .collect())
}

/// A matrix that can be re-weighted, plus the ranking it had when entered.
#[derive(Debug, Clone)]
pub struct Reweightable {
    normalized: DecisionMatrix,
    original: DecisionMatrix,
    weights: WeightVector,
}

impl Reweightable {
    /// Weighted-stage matrices are divided column-wise by `weights`; any zero
    /// weight makes that impossible.
    pub fn new(matrix: &DecisionMatrix, weights: &WeightVector) -> Result<Self, SensitivityError> {
        let normalized = match matrix.stage() {
            Stage::Raw => topsis::normalize(matrix)?,
            Stage::Normalized => matrix.clone(),
            Stage::Weighted => topsis::remove_weights(matrix, weights).map_err(|e| match e {
                TopsisError::ZeroWeight { criterion } => {
                    SensitivityError::WeightedEntryStage { criterion }
                }
                other => other.into(),
            })?,
        };
        if weights.len() != matrix.n() {
            return Err(TopsisError::LengthMismatch {
                what: "weights",
                expected: matrix.n(),
                actual: weights.len(),
            }
            .into());
        }
        Ok(Reweightable {
            normalized,
            original: matrix.clone(),
            weights: weights.clone(),
        })
    }

    pub fn criterion_index(&self, criterion: &str) -> Result<usize, SensitivityError> {
        self.original
            .criteria()
            .position(criterion)
            .ok_or_else(|| SensitivityError::UnknownCriterion(criterion.to_string()))
    }

    pub fn base_ranking(&self) -> Result<RankingResult, SensitivityError> {
        Ok(topsis::rank_weighted(&topsis::to_weighted(
            &self.original,
            &self.weights,
        )?)?)
    }

    /// Weights after perturbation and the resulting ranking. A zero delta
    /// ranks the matrix as entered, so it reproduces the base exactly.
    pub fn rerank(
        &self,
        criterion: &str,
        delta: f64,
    ) -> Result<(Vec<f64>, RankingResult), SensitivityError> {
        let j = self.criterion_index(criterion)?;
        let weights = perturb_weights(&self.weights.weights, j, delta, criterion)?;
        if delta == 0.0 {
            return Ok((weights, self.base_ranking()?));
        }
        let wv = WeightVector::fixed(weights.clone()).expect("perturbed weights stay normalized");
        let ranking = topsis::rank_weighted(&topsis::apply_weights(&self.normalized, &wv)?)?;
        Ok((weights, ranking))
    }
}

fn top(ranking: &RankingResult) -> &str {
    ranking.top().map(|a| a.alternative.as_str()).unwrap_or("")
}

pub fn sensitivity_scan(
    matrix: &DecisionMatrix,
    weights: &WeightVector,
    criterion: &str,
    deltas: &[f64],
) -> Result<SensitivityReport, SensitivityError> {
    let base = Reweightable::new(matrix, weights)?;
    base.criterion_index(criterion)?;
    let base_ranking = base.base_ranking()?;
    let entries = deltas
        .iter()
        .map(|&delta| {
            let (weights, reranking) = base.rerank(criterion, delta)?;
            let flipped = top(&reranking) != top(&base_ranking);
            let rank_changes = reranking
                .alternatives
                .iter()
                .zip(&base_ranking.alternatives)
                .filter(|(a, b)| a.rank != b.rank)
                .map(|(a, _)| a.alternative.clone())
                .collect();
            Ok(SensitivityEntry {
                delta,
                weights,
                reranking,
                flipped,
                rank_changes,
            })
        })
        .collect::<Result<_, SensitivityError>>()?;
    Ok(SensitivityReport {
        criterion: criterion.to_string(),
        base_weights: weights.weights.clone(),
        base_ranking,
        entries,
    })
}

/// Smallest |delta| in `direction` at which the top alternative changes, or
/// `None` if it never does over the admissible range. A coarse scan finds
/// the first bracket; bisection narrows it to [`THRESHOLD_TOLERANCE`].
pub fn flip_threshold(
    matrix: &DecisionMatrix,
    weights: &WeightVector,
    criterion: &str,
    direction: Direction,
) -> Result<Option<FlipThreshold>, SensitivityError> {
    let base = Reweightable::new(matrix, weights)?;
    let j = base.criterion_index(criterion)?;
    let base_ranking = base.base_ranking()?;
    let base_top = top(&base_ranking).to_string();
    let w = weights.weights[j];
    // farthest admissible delta; the lower end stays strictly above -w
    let limit = match direction {
        Direction::Down => -w * (1.0 - 1e-12),
        Direction::Up => 1.0 - w,
    };
    if limit == 0.0 {
        return Ok(None);
    }
    let top_at = |delta: f64| -> Result<String, SensitivityError> {
        let (_, ranking) = base.rerank(criterion, delta)?;
        Ok(top(&ranking).to_string())
    };

    let mut stable = 0.0;
    let mut flipped = None;
    for k in 1..=COARSE_STEPS {
        let delta = limit * k as f64 / COARSE_STEPS as f64;
        if top_at(delta)? != base_top {
            flipped = Some(delta);
            break;
        }
        stable = delta;
    }
    let Some(mut flip) = flipped else {
        return Ok(None);
    };
    while (flip - stable).abs() > THRESHOLD_TOLERANCE {
        let mid = 0.5 * (stable + flip);
        if top_at(mid)? != base_top {
            flip = mid;
        } else {
            stable = mid;
        }
    }
    Ok(Some(FlipThreshold {
        criterion: criterion.to_string(),
        delta: flip,
        last_stable: stable,
        base_top,
        new_top: top_at(flip)?,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Criterion, CriterionSet, Sense};

    fn matrix() -> DecisionMatrix {
        let criteria = CriterionSet::new(vec![
            Criterion::new("a", "A", Sense::Benefit),
            Criterion::new("b", "B", Sense::Benefit),
        ])
        .unwrap();
        DecisionMatrix::new(
            vec!["x".into(), "y".into()],
            criteria,
            vec![vec![9.0, 1.0], vec![1.0, 9.0]],
            Stage::Raw,
        )
        .unwrap()
    }

    #[test]
    fn perturbation_keeps_sum() {
        let w = [0.5, 0.3, 0.2];
        let p = perturb_weights(&w, 1, 0.2, "b").unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert_eq!(p[1], 0.5);
        assert!((p[0] / p[2] - 2.5).abs() < 1e-12);
        assert_eq!(
            perturb_weights(&w, 1, 0.7, "b").unwrap(),
            vec![0.0, 1.0, 0.0]
        );
    }

    #[test]
    fn out_of_range_deltas() {
        let w = [0.5, 0.3, 0.2];
        for delta in [-0.3, -0.5, 0.71, f64::NAN] {
            assert!(matches!(
                perturb_weights(&w, 1, delta, "b"),
                Err(SensitivityError::DeltaOutOfRange { .. })
            ));
        }
    }

    #[test]
    fn symmetric_flip_at_midpoint() {
        let w = WeightVector::fixed(vec![0.6, 0.4]).unwrap();
        let t = flip_threshold(&matrix(), &w, "a", Direction::Down)
            .unwrap()
            .unwrap();
        assert_eq!(t.base_top, "x");
        assert_eq!(t.new_top, "y");
        assert!((t.delta + 0.1).abs() < 1e-8, "{t:?}");
        assert!(flip_threshold(&matrix(), &w, "a", Direction::Up)
            .unwrap()
            .is_none());
    }

    #[test]
    fn weighted_stage_with_zero_weight_is_refused() {
        let w = WeightVector::fixed(vec![1.0, 0.0]).unwrap();
        let weighted = topsis::to_weighted(&matrix(), &w).unwrap();
        assert!(matches!(
            sensitivity_scan(&weighted, &w, "a", &[0.0]),
            Err(SensitivityError::WeightedEntryStage { .. })
        ));
    }

    #[test]
    fn unknown_criterion() {
        let w = WeightVector::fixed(vec![0.5, 0.5]).unwrap();
        assert_eq!(
            sensitivity_scan(&matrix(), &w, "zz", &[0.0]).unwrap_err(),
            SensitivityError::UnknownCriterion("zz".into())
        );
    }
}
