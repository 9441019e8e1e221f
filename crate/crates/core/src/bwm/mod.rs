//! Best-worst method: minimax weight derivation, consistency and
//! aggregation across respondents.
//!
//! The minimax problem
//!
//! ```text
//! min ξ  s.t.  |w_B / w_j - a_Bj| <= ξ,  |w_j / w_W - a_jW| <= ξ,  Σ w = 1,  w >= 0
//! ```
//!
//! is nonlinear in `(w, ξ)` but linear in `w` once `ξ` is fixed: each ratio
//! bound becomes `w_B <= (a_Bj + ξ) w_j` and `w_B >= (a_Bj - ξ) w_j`. The
//! solver bisects on `ξ` and decides every trial exactly with a phase-one
//! simplex.

pub mod simplex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{
    validate_survey, ComparisonSurvey, ConsistencyRatio, InvalidSurvey, WeightVector,
};
use num_traits::Zero;
use simplex::{exact, integer, to_f64, LinearProgram, LpError, LpOutcome, Rational, Relation};

/// Lower bound on every weight so that all ratios stay finite.
pub const WEIGHT_FLOOR: f64 = 1e-9;
/// Width of the final `ξ` bracket.
pub const BISECTION_TOLERANCE: f64 = 1e-6;
/// Initial upper end of the `ξ` bracket. Equal weights give every ratio 1,
/// so `ξ = 8` is always feasible on the 1..9 scale.
pub const XI_UPPER: f64 = 9.0;

/// Consistency index by best-to-worst comparison `a_BW`, for `a_BW` in 1..=9.
pub const CONSISTENCY_INDEX: [f64; 9] = [0.00, 0.44, 1.00, 1.63, 2.30, 3.00, 3.73, 4.47, 5.23];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BwmError {
    #[error(transparent)]
    InvalidSurvey(#[from] InvalidSurvey),
    #[error("weight constraints are infeasible at xi = {xi}")]
    Infeasible { xi: f64 },
    #[error("feasibility solver failed: {0}")]
    NumericalFailure(String),
    #[error("solution has {solution} criteria but survey has {survey}")]
    MismatchedInputs { solution: usize, survey: usize },
}

impl From<LpError> for BwmError {
    fn from(e: LpError) -> Self {
        BwmError::NumericalFailure(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AggregateError {
    #[error("no weight vectors to aggregate")]
    EmptyInput,
    #[error("weight vector {index} has {actual} entries, expected {expected}")]
    LengthMismatch {
        index: usize,
        expected: usize,
        actual: usize,
    },
}

/// Range a weight may take across the optimal face of the minimax problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightInterval {
    pub min: f64,
    pub max: f64,
}

impl WeightInterval {
    pub fn contains(&self, w: f64, tol: f64) -> bool {
        self.min - tol <= w && w <= self.max + tol
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BwmSolution {
    pub weights: WeightVector,
    pub xi_star: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight_intervals: Option<Vec<WeightInterval>>,
    pub iterations: usize,
}

/// One step of the bisection: `lower` is known infeasible (or 0), `upper`
/// known feasible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveOptions {
    /// Also compute per-criterion intervals over the optimal face.
    pub intervals: bool,
}

/// `WEIGHT_FLOOR` as an exact fraction.
fn floor() -> Rational {
    Rational::new(1.into(), 1_000_000_000.into())
}

/// The linear constraint set for a fixed `ξ`, over `u = w - WEIGHT_FLOOR`.
/// Judgements and bisection midpoints are dyadic, so every coefficient is
/// exact.
fn feasibility_program(survey: &ComparisonSurvey, xi: f64) -> LinearProgram {
    let n = survey.n();
    let (b, w) = (survey.best, survey.worst);
    let xi = exact(xi);
    let floor = floor();
    let mut lp = LinearProgram::new(n);

    // Σ_k c_k w_k <= 0 becomes Σ_k c_k u_k <= -floor · Σ_k c_k.
    let mut push_le = |terms: [(usize, Rational); 2]| {
        let mut coeffs = vec![Rational::zero(); n];
        for (k, c) in terms {
            coeffs[k] += c;
        }
        let total: Rational = coeffs.iter().sum();
        lp.push(coeffs, Relation::Le, -&floor * total);
    };
    let one = integer(1);
    for j in 0..n {
        if j != b {
            let a = exact(survey.bo[j]);
            push_le([(b, one.clone()), (j, -(&a + &xi))]);
            push_le([(j, &a - &xi), (b, -&one)]);
        }
        if j != w {
            let a = exact(survey.ow[j]);
            push_le([(j, one.clone()), (w, -(&a + &xi))]);
            push_le([(w, &a - &xi), (j, -&one)]);
        }
    }
    lp.push(
        vec![one.clone(); n],
        Relation::Eq,
        one - integer(n as i64) * &floor,
    );
    lp
}

fn weights_from(u: &[Rational]) -> Vec<f64> {
    let floor = floor();
    let w: Vec<f64> = u.iter().map(|v| to_f64(&(v + &floor))).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|v| v / total).collect()
}

/// Weights satisfying every ratio bound at `xi`, or `None` when there are
/// none.
fn feasible_weights(survey: &ComparisonSurvey, xi: f64) -> Result<Option<Vec<f64>>, BwmError> {
    Ok(feasibility_program(survey, xi)
        .feasible_point()?
        .map(|u| weights_from(&u)))
}

/// Largest deviation `max_j max(|w_B/w_j - a_Bj|, |w_j/w_W - a_jW|)`.
pub fn max_deviation(survey: &ComparisonSurvey, weights: &[f64]) -> f64 {
    let (b, w) = (survey.best, survey.worst);
    (0..weights.len())
        .flat_map(|j| {
            [
                (weights[b] / weights[j] - survey.bo[j]).abs(),
                (weights[j] / weights[w] - survey.ow[j]).abs(),
            ]
        })
        .fold(0.0, f64::max)
}

/// Solves the minimax weight problem for one survey.
pub fn solve_bwm(survey: &ComparisonSurvey) -> Result<BwmSolution, BwmError> {
    solve_bwm_with(survey, SolveOptions::default())
}

pub fn solve_bwm_with(
    survey: &ComparisonSurvey,
    options: SolveOptions,
) -> Result<BwmSolution, BwmError> {
    solve_traced(survey, options).map(|(solution, _)| solution)
}

/// Like [`solve_bwm_with`], also returning the bracket after every bisection
/// step.
pub fn solve_traced(
    survey: &ComparisonSurvey,
    options: SolveOptions,
) -> Result<(BwmSolution, Vec<Bracket>), BwmError> {
    validate_survey(survey, survey.n())?;

    let mut trace = Vec::new();
    let (weights, xi_star, iterations) = match feasible_weights(survey, 0.0)? {
        Some(w) => {
            trace.push(Bracket {
                lower: 0.0,
                upper: 0.0,
            });
            (w, 0.0, 0)
        }
        None => {
            let mut lower = 0.0;
            let mut upper = XI_UPPER;
            // equal weights put every ratio at 1, within 8 of any judgement
            let mut best = vec![1.0 / survey.n() as f64; survey.n()];
            trace.push(Bracket { lower, upper });
            let mut iterations = 0;
            while upper - lower >= BISECTION_TOLERANCE {
                let mid = 0.5 * (lower + upper);
                match feasible_weights(survey, mid)? {
                    Some(w) => {
                        upper = mid;
                        best = w;
                    }
                    None => lower = mid,
                }
                iterations += 1;
                trace.push(Bracket { lower, upper });
            }
            let xi = max_deviation(survey, &best);
            (best, xi, iterations)
        }
    };

    let weight_intervals = if options.intervals {
        Some(weight_intervals(survey, xi_star)?)
    } else {
        None
    };
    let ratio = consistency_for(survey.best_to_worst(), xi_star);
    let vector = WeightVector::new(weights, xi_star, ratio)
        .map_err(|e| BwmError::NumericalFailure(e.to_string()))?;
    Ok((
        BwmSolution {
            weights: vector,
            xi_star,
            weight_intervals,
            iterations,
        },
        trace,
    ))
}

fn consistency_for(a_bw: f64, xi_star: f64) -> ConsistencyRatio {
    // a ξ* inside the bisection tolerance is indistinguishable from zero
    if xi_star <= BISECTION_TOLERANCE {
        return ConsistencyRatio(0.0);
    }
    let index = CONSISTENCY_INDEX[(a_bw.round() as usize).clamp(1, 9) - 1];
    if index == 0.0 {
        ConsistencyRatio::INCONSISTENT
    } else {
        ConsistencyRatio(xi_star / index)
    }
}

/// `ξ*` divided by the consistency index of the survey's `a_BW`.
pub fn consistency_ratio(
    solution: &BwmSolution,
    survey: &ComparisonSurvey,
) -> Result<ConsistencyRatio, BwmError> {
    if solution.weights.len() != survey.n() {
        return Err(BwmError::MismatchedInputs {
            solution: solution.weights.len(),
            survey: survey.n(),
        });
    }
    Ok(consistency_for(survey.best_to_worst(), solution.xi_star))
}

/// Per-criterion bounds over the weights attaining `xi_star`.
///
/// The polytope is taken at `xi_star + BISECTION_TOLERANCE` so that it is
/// never empty through rounding; bounds are therefore slightly conservative.
pub fn weight_intervals(
    survey: &ComparisonSurvey,
    xi_star: f64,
) -> Result<Vec<WeightInterval>, BwmError> {
    let xi = xi_star + BISECTION_TOLERANCE;
    let lp = feasibility_program(survey, xi);
    let n = survey.n();
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let mut cost = vec![Rational::zero(); n];
        cost[j] = integer(1);
        let min = optimum(lp.minimize(&cost)?, xi)?;
        let max = optimum(lp.maximize(&cost)?, xi)?;
        out.push(WeightInterval { min, max });
    }
    Ok(out)
}

/// Optimal weight, shifted back from `u` to `w`.
fn optimum(outcome: LpOutcome, xi: f64) -> Result<f64, BwmError> {
    match outcome {
        LpOutcome::Optimal { value, .. } => Ok(to_f64(&(value + floor()))),
        LpOutcome::Infeasible => Err(BwmError::Infeasible { xi }),
        LpOutcome::Unbounded => Err(BwmError::NumericalFailure(
            "weight bound is unbounded on the simplex".into(),
        )),
    }
}

/// Arithmetic mean of respondent weights, renormalized to sum to one.
/// `xi_star` and the consistency ratio report the worst respondent.
pub fn aggregate_weights(solutions: &[WeightVector]) -> Result<WeightVector, AggregateError> {
    let first = solutions.first().ok_or(AggregateError::EmptyInput)?;
    let n = first.len();
    let mut sums = vec![0.0; n];
    let mut xi_star: f64 = 0.0;
    let mut ratio = ConsistencyRatio(0.0);
    for (index, s) in solutions.iter().enumerate() {
        if s.len() != n {
            return Err(AggregateError::LengthMismatch {
                index,
                expected: n,
                actual: s.len(),
            });
        }
        for (acc, w) in sums.iter_mut().zip(&s.weights) {
            *acc += w;
        }
        xi_star = xi_star.max(s.xi_star);
        if s.consistency_ratio.value() > ratio.value() {
            ratio = s.consistency_ratio;
        }
    }
    let count = solutions.len() as f64;
    let means: Vec<f64> = sums.iter().map(|s| s / count).collect();
    let total: f64 = means.iter().sum();
    let weights = means.into_iter().map(|m| m / total).collect();
    Ok(WeightVector::new(weights, xi_star, ratio)
        .expect("mean of normalized vectors is normalized"))
}
