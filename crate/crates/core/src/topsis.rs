//! TOPSIS ranking: vector normalization, weighting, ideal solutions,
//! separation measures and relative closeness.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{DecisionMatrix, RankedAlternative, RankingResult, Sense, Stage, WeightVector};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TopsisError {
    #[error("expected a {expected} matrix, got {actual}")]
    WrongStage { expected: Stage, actual: Stage },
    #[error("column `{criterion}` is all zero and cannot be normalized")]
    DegenerateColumn { criterion: String },
    #[error("{what}: expected {expected} entries, got {actual}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("matrix has no alternatives")]
    EmptyMatrix,
    #[error("ideal solutions have {ideals} entries but the matrix has {columns} columns")]
    DimensionMismatch { ideals: usize, columns: usize },
    #[error(
        "alternative {index} is at zero distance from both ideals; every alternative is identical"
    )]
    DegenerateAlternative { index: usize },
    #[error("weight of `{criterion}` is zero; the normalized column cannot be recovered")]
    ZeroWeight { criterion: String },
}

/// Positive and negative ideal rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdealSolutions {
    pub pis: Vec<f64>,
    pub nis: Vec<f64>,
}

/// Euclidean distances of one alternative from the two ideals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Separation {
    pub s_plus: f64,
    pub s_minus: f64,
}

fn expect_stage(matrix: &DecisionMatrix, expected: Stage) -> Result<(), TopsisError> {
    if matrix.stage() == expected {
        Ok(())
    } else {
        Err(TopsisError::WrongStage {
            expected,
            actual: matrix.stage(),
        })
    }
}

/// `y_ij = x_ij / sqrt(Σ_i x_ij²)` per column.
pub fn normalize(matrix: &DecisionMatrix) -> Result<DecisionMatrix, TopsisError> {
    expect_stage(matrix, Stage::Raw)?;
    let norms: Vec<f64> = (0..matrix.n())
        .map(|j| matrix.column(j).map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    if let Some(j) = norms.iter().position(|&norm| norm == 0.0) {
        return Err(TopsisError::DegenerateColumn {
            criterion: matrix
                .criteria()
                .get(j)
                .map(|c| c.id.clone())
                .unwrap_or_default(),
        });
    }
    let values = matrix
        .values()
        .iter()
        .map(|row| row.iter().zip(&norms).map(|(x, norm)| x / norm).collect())
        .collect();
    Ok(matrix.with_values(values, Stage::Normalized))
}

/// `v_ij = w_j · y_ij`.
pub fn apply_weights(
    matrix: &DecisionMatrix,
    weights: &WeightVector,
) -> Result<DecisionMatrix, TopsisError> {
    expect_stage(matrix, Stage::Normalized)?;
    if weights.len() != matrix.n() {
        return Err(TopsisError::LengthMismatch {
            what: "weights",
            expected: matrix.n(),
            actual: weights.len(),
        });
    }
    let values = matrix
        .values()
        .iter()
        .map(|row| {
            row.iter()
                .zip(&weights.weights)
                .map(|(y, w)| w * y)
                .collect()
        })
        .collect();
    Ok(matrix.with_values(values, Stage::Weighted))
}

/// Inverse of [`apply_weights`]: divides each weighted column by its weight.
pub fn remove_weights(
    matrix: &DecisionMatrix,
    weights: &WeightVector,
) -> Result<DecisionMatrix, TopsisError> {
    expect_stage(matrix, Stage::Weighted)?;
    if weights.len() != matrix.n() {
        return Err(TopsisError::LengthMismatch {
            what: "weights",
            expected: matrix.n(),
            actual: weights.len(),
        });
    }
    if let Some(j) = weights.weights.iter().position(|&w| w == 0.0) {
        return Err(TopsisError::ZeroWeight {
            criterion: matrix
                .criteria()
                .get(j)
                .map(|c| c.id.clone())
                .unwrap_or_default(),
        });
    }
    let values = matrix
        .values()
        .iter()
        .map(|row| {
            row.iter()
                .zip(&weights.weights)
                .map(|(v, w)| v / w)
                .collect()
        })
        .collect();
    Ok(matrix.with_values(values, Stage::Normalized))
}

/// Column-wise best and worst values, direction set by each criterion's
/// sense. Selection is by exact comparison.
pub fn ideal_solutions(matrix: &DecisionMatrix) -> Result<IdealSolutions, TopsisError> {
    expect_stage(matrix, Stage::Weighted)?;
    if matrix.m() == 0 {
        return Err(TopsisError::EmptyMatrix);
    }
    let mut pis = Vec::with_capacity(matrix.n());
    let mut nis = Vec::with_capacity(matrix.n());
    for (j, criterion) in matrix.criteria().iter().enumerate() {
        let max = matrix.column(j).fold(f64::NEG_INFINITY, f64::max);
        let min = matrix.column(j).fold(f64::INFINITY, f64::min);
        match criterion.sense {
            Sense::Benefit => {
                pis.push(max);
                nis.push(min);
            }
            Sense::Cost => {
                pis.push(min);
                nis.push(max);
            }
        }
    }
    Ok(IdealSolutions { pis, nis })
}

/// Distances of every row from the ideals. Each row sums its squared terms
/// in column order.
pub fn separations(
    matrix: &DecisionMatrix,
    ideals: &IdealSolutions,
) -> Result<Vec<Separation>, TopsisError> {
    if ideals.pis.len() != matrix.n() || ideals.nis.len() != matrix.n() {
        return Err(TopsisError::DimensionMismatch {
            ideals: ideals.pis.len().min(ideals.nis.len()),
            columns: matrix.n(),
        });
    }
    let distance = |row: &[f64], ideal: &[f64]| {
        row.iter()
            .zip(ideal)
            .map(|(v, i)| (i - v) * (i - v))
            .sum::<f64>()
            .sqrt()
    };
    Ok(matrix
        .values()
        .iter()
        .map(|row| Separation {
            s_plus: distance(row, &ideals.pis),
            s_minus: distance(row, &ideals.nis),
        })
        .collect())
}

/// Relative closeness `S⁻ / (S⁺ + S⁻)`.
pub fn performance_scores(separations: &[Separation]) -> Result<Vec<f64>, TopsisError> {
    separations
        .iter()
        .enumerate()
        .map(|(index, s)| {
            let total = s.s_plus + s.s_minus;
            if total == 0.0 {
                Err(TopsisError::DegenerateAlternative { index })
            } else {
                Ok(s.s_minus / total)
            }
        })
        .collect()
}

/// Rank and tie flag for each score, in input order. Higher scores rank
/// first; equal scores keep input order and are flagged.
pub fn rank(scores: &[f64]) -> Vec<(usize, bool)> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut out = vec![(0, false); scores.len()];
    for (position, &i) in order.iter().enumerate() {
        let tie = scores
            .iter()
            .enumerate()
            .any(|(k, &s)| k != i && s == scores[i]);
        out[i] = (position + 1, tie);
    }
    out
}

/// Assembles the full result for `matrix` from its separations.
pub fn ranking_result(
    matrix: &DecisionMatrix,
    separations: &[Separation],
) -> Result<RankingResult, TopsisError> {
    let scores = performance_scores(separations)?;
    let ranks = rank(&scores);
    Ok(RankingResult {
        alternatives: matrix
            .alternatives()
            .iter()
            .zip(separations)
            .zip(scores.iter().zip(ranks))
            .map(|((name, sep), (&score, (rank, tie)))| RankedAlternative {
                alternative: name.clone(),
                s_plus: sep.s_plus,
                s_minus: sep.s_minus,
                score,
                rank,
                tie,
            })
            .collect(),
    })
}

/// Ranks a matrix at the weighted stage.
pub fn rank_weighted(matrix: &DecisionMatrix) -> Result<RankingResult, TopsisError> {
    let ideals = ideal_solutions(matrix)?;
    let seps = separations(matrix, &ideals)?;
    ranking_result(matrix, &seps)
}

/// Brings a matrix at any stage to the weighted stage. Weighted matrices are
/// returned as they are; `weights` is then unused.
pub fn to_weighted(
    matrix: &DecisionMatrix,
    weights: &WeightVector,
) -> Result<DecisionMatrix, TopsisError> {
    match matrix.stage() {
        Stage::Raw => apply_weights(&normalize(matrix)?, weights),
        Stage::Normalized => apply_weights(matrix, weights),
        Stage::Weighted => Ok(matrix.clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Criterion, CriterionSet};

    fn criteria(senses: &[Sense]) -> CriterionSet {
        CriterionSet::new(
            senses
                .iter()
                .enumerate()
                .map(|(j, &s)| Criterion::new(format!("c{j}"), format!("C{j}"), s))
                .collect(),
        )
        .unwrap()
    }

    fn matrix(values: Vec<Vec<f64>>, senses: &[Sense], stage: Stage) -> DecisionMatrix {
        let alts = (0..values.len()).map(|i| format!("a{i}")).collect();
        DecisionMatrix::new(alts, criteria(senses), values, stage).unwrap()
    }

    const B: Sense = Sense::Benefit;

    #[test]
    fn three_four_five_column() {
        let m = matrix(vec![vec![3.0, 1.0], vec![4.0, 0.0]], &[B, B], Stage::Raw);
        let y = normalize(&m).unwrap();
        assert_eq!(y.stage(), Stage::Normalized);
        assert!((y.values()[0][0] - 0.6).abs() < 1e-15);
        assert!((y.values()[1][0] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn unit_column_unchanged() {
        let m = matrix(
            vec![vec![1.0, 2.0], vec![0.0, 2.0], vec![0.0, 2.0]],
            &[B, B],
            Stage::Raw,
        );
        let y = normalize(&m).unwrap();
        assert_eq!(y.column(0).collect::<Vec<_>>(), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn zero_column_is_degenerate() {
        let m = matrix(vec![vec![0.0, 1.0], vec![0.0, 2.0]], &[B, B], Stage::Raw);
        assert_eq!(
            normalize(&m),
            Err(TopsisError::DegenerateColumn {
                criterion: "c0".into()
            })
        );
    }

    #[test]
    fn stage_is_enforced() {
        let m = matrix(vec![vec![1.0, 1.0]], &[B, B], Stage::Weighted);
        assert!(matches!(normalize(&m), Err(TopsisError::WrongStage { .. })));
        let w = WeightVector::fixed(vec![0.5, 0.5]).unwrap();
        assert!(matches!(
            apply_weights(&m, &w),
            Err(TopsisError::WrongStage { .. })
        ));
        let raw = matrix(vec![vec![1.0, 1.0]], &[B, B], Stage::Raw);
        assert!(matches!(
            ideal_solutions(&raw),
            Err(TopsisError::WrongStage { .. })
        ));
    }

    #[test]
    fn uniform_weights_scale_columns() {
        let m = matrix(
            vec![vec![0.5, 0.2, 0.1], vec![0.5, 0.9, 0.3]],
            &[B, B, B],
            Stage::Normalized,
        );
        let w = WeightVector::fixed(vec![1.0 / 3.0; 3]).unwrap();
        let v = apply_weights(&m, &w).unwrap();
        assert_eq!(v.stage(), Stage::Weighted);
        assert!(v.column(0).all(|x| (x - 0.5 / 3.0).abs() < 1e-15));
    }

    #[test]
    fn zero_weight_annihilates_column() {
        let m = matrix(
            vec![vec![0.6, 0.2], vec![0.8, 0.9]],
            &[B, B],
            Stage::Normalized,
        );
        let w = WeightVector::fixed(vec![0.0, 1.0]).unwrap();
        let v = apply_weights(&m, &w).unwrap();
        assert!(v.column(0).all(|x| x == 0.0));
        assert!(matches!(
            remove_weights(&v, &w),
            Err(TopsisError::ZeroWeight { .. })
        ));
    }

    #[test]
    fn weight_length_mismatch() {
        let m = matrix(vec![vec![0.6, 0.2]], &[B, B], Stage::Normalized);
        let w = WeightVector::fixed(vec![1.0 / 3.0; 3]).unwrap();
        assert!(matches!(
            apply_weights(&m, &w),
            Err(TopsisError::LengthMismatch {
                expected: 2,
                actual: 3,
                ..
            })
        ));
    }

    #[test]
    fn single_alternative_ideals_equal_row_and_score_is_degenerate() {
        let m = matrix(vec![vec![0.2, 0.4]], &[B, Sense::Cost], Stage::Weighted);
        let ideals = ideal_solutions(&m).unwrap();
        assert_eq!(ideals.pis, vec![0.2, 0.4]);
        assert_eq!(ideals.nis, vec![0.2, 0.4]);
        let seps = separations(&m, &ideals).unwrap();
        assert_eq!(
            performance_scores(&seps),
            Err(TopsisError::DegenerateAlternative { index: 0 })
        );
    }

    #[test]
    fn cost_columns_reverse_ideals() {
        let m = matrix(
            vec![vec![0.1, 0.5], vec![0.3, 0.5]],
            &[Sense::Cost, B],
            Stage::Weighted,
        );
        let ideals = ideal_solutions(&m).unwrap();
        assert_eq!(ideals.pis, vec![0.1, 0.5]);
        assert_eq!(ideals.nis, vec![0.3, 0.5]);
    }

    #[test]
    fn symmetric_square() {
        let m = matrix(
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            &[B, B],
            Stage::Weighted,
        );
        let seps = separations(&m, &ideal_solutions(&m).unwrap()).unwrap();
        for s in &seps {
            assert_eq!(s.s_plus, 1.0);
            assert_eq!(s.s_minus, 1.0);
        }
        assert_eq!(performance_scores(&seps).unwrap(), vec![0.5, 0.5]);
    }

    #[test]
    fn pis_row_has_zero_s_plus() {
        let m = matrix(
            vec![vec![0.9, 0.8], vec![0.1, 0.3], vec![0.4, 0.2]],
            &[B, B],
            Stage::Weighted,
        );
        let seps = separations(&m, &ideal_solutions(&m).unwrap()).unwrap();
        assert_eq!(seps[0].s_plus, 0.0);
        let scores = performance_scores(&seps).unwrap();
        assert_eq!(scores[0], 1.0);
    }

    #[test]
    fn separation_dimension_mismatch() {
        let m = matrix(vec![vec![0.9, 0.8]], &[B, B], Stage::Weighted);
        let ideals = IdealSolutions {
            pis: vec![1.0],
            nis: vec![0.0],
        };
        assert!(matches!(
            separations(&m, &ideals),
            Err(TopsisError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn closeness_examples() {
        let score = |p: f64, m: f64| {
            performance_scores(&[Separation {
                s_plus: p,
                s_minus: m,
            }])
            .unwrap()[0]
        };
        assert!((score(0.043, 0.117) - 0.117 / 0.160).abs() < 1e-15);
        assert!((score(0.043, 0.117) - 0.732).abs() < 1e-3);
        assert_eq!(score(0.25, 0.25), 0.5);
        // 0.049 / 0.140 = 0.35, where the printed HEV figure is 0.382
        assert!((score(0.091, 0.049) - 0.35).abs() < 1e-12);
        assert_eq!(score(0.0, 0.3), 1.0);
        assert_eq!(score(0.3, 0.0), 0.0);
    }

    #[test]
    fn ranking_rules() {
        assert_eq!(rank(&[0.2, 0.9]), vec![(2, false), (1, false)]);
        assert_eq!(
            rank(&[0.4, 0.4, 0.4]),
            vec![(1, true), (2, true), (3, true)]
        );
        assert_eq!(
            rank(&[0.1, 0.7, 0.1, 0.3]),
            vec![(3, true), (1, false), (4, true), (2, false)]
        );
    }
}
