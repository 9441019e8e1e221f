//! Independent reference implementations used as test oracles. Nothing here
//! calls into the solver or ranking code it is used to check.
#![allow(dead_code, clippy::too_many_arguments)]

use rand::rngs::StdRng;
use rand::Rng;

/// Minimax deviation of `w` from a best-worst survey, computed directly from
/// the ratio definitions.
pub fn minimax_objective(best: usize, worst: usize, bo: &[f64], ow: &[f64], w: &[f64]) -> f64 {
    let mut worst_dev: f64 = 0.0;
    for j in 0..w.len() {
        worst_dev = worst_dev
            .max((w[best] / w[j] - bo[j]).abs())
            .max((w[j] / w[worst] - ow[j]).abs());
    }
    worst_dev
}

/// Result of the simplex-grid search.
pub struct GridOptimum {
    pub xi: f64,
    pub weights: Vec<f64>,
}

/// Grid step of the exhaustive pass.
pub const GRID_STEP: f64 = 5e-4;

fn for_each_grid_point(n: usize, step: f64, mut f: impl FnMut(&[f64])) {
    let ticks = (1.0 / step).round() as usize;
    let mut counts = vec![1usize; n - 1];
    let mut w = vec![0.0; n];
    loop {
        let used: usize = counts.iter().sum();
        if used < ticks {
            for (k, c) in counts.iter().enumerate() {
                w[k] = *c as f64 * step;
            }
            w[n - 1] = (ticks - used) as f64 * step;
            f(&w);
        }
        // odometer increment over the first n - 1 coordinates
        let mut k = 0;
        loop {
            if k == n - 1 {
                return;
            }
            counts[k] += 1;
            let used: usize = counts.iter().sum();
            if used < ticks {
                break;
            }
            counts[k] = 1;
            k += 1;
        }
    }
}

/// Exhaustive search of the interior simplex grid followed by successively
/// finer grids around the best candidates.
///
/// The exhaustive pass uses `GRID_STEP` for `n <= 3`; for `n = 4` a full
/// 5e-4 lattice has ~1.3e9 points, so the exhaustive pass runs at 5e-3 and the
/// refinement passes descend through 5e-4 and below. The objective is
/// quasi-convex (its sublevel sets are polytopes), so refinement around the
/// best cells cannot get trapped away from the global minimum.
pub fn grid_oracle(best: usize, worst: usize, bo: &[f64], ow: &[f64]) -> GridOptimum {
    let n = bo.len();
    let base_step = if n <= 3 { GRID_STEP } else { 5e-3 };
    let keep = 24;

    let mut candidates: Vec<(f64, Vec<f64>)> = Vec::new();
    for_each_grid_point(n, base_step, |w| {
        let v = minimax_objective(best, worst, bo, ow, w);
        push_candidate(&mut candidates, keep, v, w);
    });

    let mut step = base_step;
    while step > 1e-11 {
        let fine = step / 8.0;
        let mut next: Vec<(f64, Vec<f64>)> = candidates.clone();
        for (_, centre) in &candidates {
            refine_around(centre, step, fine, |w| {
                let v = minimax_objective(best, worst, bo, ow, w);
                push_candidate(&mut next, keep, v, w);
            });
        }
        candidates = next;
        step = fine;
    }
    let (xi, weights) = candidates.swap_remove(0);
    GridOptimum { xi, weights }
}

/// Exhaustive grid of spacing `step` over the box `centre ± radius` (first
/// `n - 1` coordinates), returning every interior simplex point whose
/// objective does not exceed `threshold`.
///
/// Near the optimum the ratio objective changes by O(1/w²) per unit of
/// weight, so a whole-simplex lattice at 5e-4 rarely lands within a few 1e-3
/// of `ξ*`; a local lattice is needed to sample the near-optimal set.
pub fn near_optimal_points(
    best: usize,
    worst: usize,
    bo: &[f64],
    ow: &[f64],
    centre: &[f64],
    radius: f64,
    step: f64,
    threshold: f64,
) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    refine_around(centre, radius / 2.0, step, |w| {
        if minimax_objective(best, worst, bo, ow, w) <= threshold {
            out.push(w.to_vec());
        }
    });
    out
}

fn push_candidate(list: &mut Vec<(f64, Vec<f64>)>, keep: usize, v: f64, w: &[f64]) {
    if list.len() == keep && v >= list[keep - 1].0 {
        return;
    }
    if list.iter().any(|(_, x)| x.as_slice() == w) {
        return;
    }
    let pos = list.partition_point(|(u, _)| *u <= v);
    list.insert(pos, (v, w.to_vec()));
    list.truncate(keep);
}

/// Visits a grid of spacing `fine` covering `centre ± 2·span` in the first
/// `n - 1` coordinates, keeping only interior simplex points.
fn refine_around(centre: &[f64], span: f64, fine: f64, mut f: impl FnMut(&[f64])) {
    let n = centre.len();
    let half = (2.0 * span / fine).round() as i64;
    let dims = n - 1;
    let mut offsets = vec![-half; dims];
    let mut w = vec![0.0; n];
    loop {
        let mut ok = true;
        let mut used = 0.0;
        for k in 0..dims {
            w[k] = centre[k] + offsets[k] as f64 * fine;
            used += w[k];
            ok &= w[k] > 0.0;
        }
        w[n - 1] = 1.0 - used;
        if ok && w[n - 1] > 0.0 {
            f(&w);
        }
        let mut k = 0;
        loop {
            if k == dims {
                return;
            }
            offsets[k] += 1;
            if offsets[k] <= half {
                break;
            }
            offsets[k] = -half;
            k += 1;
        }
    }
}

/// A random survey satisfying every validity invariant.
pub fn random_valid_survey(rng: &mut StdRng, n: usize) -> (usize, usize, Vec<f64>, Vec<f64>) {
    let best = rng.random_range(0..n);
    let mut worst = rng.random_range(0..n - 1);
    if worst >= best {
        worst += 1;
    }
    let mut bo: Vec<f64> = (0..n).map(|_| rng.random_range(1..=9) as f64).collect();
    let mut ow: Vec<f64> = (0..n).map(|_| rng.random_range(1..=9) as f64).collect();
    bo[best] = 1.0;
    ow[worst] = 1.0;
    ow[best] = bo[worst];
    (best, worst, bo, ow)
}

/// A random fully consistent survey: integer weights-of-importance `r_j`
/// with `a_Bj = r_B / r_j` and `a_jW = r_j / r_W` all on the 1..9 scale.
pub fn random_consistent_survey(rng: &mut StdRng, n: usize) -> (usize, usize, Vec<f64>, Vec<f64>) {
    loop {
        let best = rng.random_range(0..n);
        let mut worst = rng.random_range(0..n - 1);
        if worst >= best {
            worst += 1;
        }
        // a_jW = k_j, a_Bj = a_BW / k_j with every k_j dividing a_BW
        let a_bw = rng.random_range(1..=9u32);
        let divisors: Vec<u32> = (1..=a_bw).filter(|d| a_bw % d == 0).collect();
        let mut ow: Vec<f64> = (0..n)
            .map(|_| divisors[rng.random_range(0..divisors.len())] as f64)
            .collect();
        ow[worst] = 1.0;
        ow[best] = a_bw as f64;
        let bo: Vec<f64> = ow.iter().map(|k| a_bw as f64 / k).collect();
        if bo.iter().chain(&ow).all(|v| (1.0..=9.0).contains(v)) {
            return (best, worst, bo, ow);
        }
    }
}

/// Closed-form weights of a fully consistent survey: `w_j ∝ 1 / a_Bj`.
pub fn consistent_closed_form(bo: &[f64]) -> Vec<f64> {
    let inv: Vec<f64> = bo.iter().map(|a| 1.0 / a).collect();
    let total: f64 = inv.iter().sum();
    inv.iter().map(|v| v / total).collect()
}

/// Ideal rows, separations and closeness scores computed in one pass from a
/// weighted matrix. `benefit[j]` selects max (true) or min (false) for the
/// positive ideal.
pub struct BruteTopsis {
    pub pis: Vec<f64>,
    pub nis: Vec<f64>,
    pub s_plus: Vec<f64>,
    pub s_minus: Vec<f64>,
    pub scores: Vec<f64>,
}

pub fn brute_topsis_weighted(v: &[Vec<f64>], benefit: &[bool]) -> BruteTopsis {
    let m = v.len();
    let n = benefit.len();
    let mut pis = vec![0.0; n];
    let mut nis = vec![0.0; n];
    for j in 0..n {
        let mut hi = f64::NEG_INFINITY;
        let mut lo = f64::INFINITY;
        for row in v {
            if row[j] > hi {
                hi = row[j];
            }
            if row[j] < lo {
                lo = row[j];
            }
        }
        if benefit[j] {
            pis[j] = hi;
            nis[j] = lo;
        } else {
            pis[j] = lo;
            nis[j] = hi;
        }
    }
    let mut s_plus = vec![0.0; m];
    let mut s_minus = vec![0.0; m];
    let mut scores = vec![0.0; m];
    for i in 0..m {
        let mut a = 0.0;
        let mut b = 0.0;
        for j in 0..n {
            a += (pis[j] - v[i][j]) * (pis[j] - v[i][j]);
            b += (nis[j] - v[i][j]) * (nis[j] - v[i][j]);
        }
        s_plus[i] = a.sqrt();
        s_minus[i] = b.sqrt();
        scores[i] = s_minus[i] / (s_plus[i] + s_minus[i]);
    }
    BruteTopsis {
        pis,
        nis,
        s_plus,
        s_minus,
        scores,
    }
}

/// Vector normalization and weighting of a raw matrix, then the weighted
/// pass above.
pub fn brute_topsis_raw(x: &[Vec<f64>], weights: &[f64], benefit: &[bool]) -> BruteTopsis {
    let n = weights.len();
    let mut norms = vec![0.0; n];
    for row in x {
        for j in 0..n {
            norms[j] += row[j] * row[j];
        }
    }
    let v: Vec<Vec<f64>> = x
        .iter()
        .map(|row| {
            (0..n)
                .map(|j| weights[j] * row[j] / norms[j].sqrt())
                .collect()
        })
        .collect();
    brute_topsis_weighted(&v, benefit)
}

/// The published weighted normalized matrix, row by row.
pub const TABLE2_ALTERNATIVES: [&str; 9] = [
    "EV (8-11 Lakhs)",
    "EV (11-15 Lakhs)",
    "EV (15-19 Lakhs)",
    "EV (19-25 Lakhs)",
    "ICEV (8-11 Lakhs)",
    "ICEV (11-15 Lakhs)",
    "ICEV (15-19 Lakhs)",
    "ICEV (19-25 Lakhs)",
    "HEV (19-25 Lakhs)",
];

pub const TABLE2_VALUES: [[f64; 7]; 9] = [
    [0.048, 0.007, 0.022, 0.016, 0.034, 0.019, 0.130],
    [0.063, 0.014, 0.027, 0.032, 0.034, 0.019, 0.130],
    [0.083, 0.021, 0.029, 0.032, 0.034, 0.019, 0.130],
    [0.105, 0.021, 0.033, 0.047, 0.034, 0.019, 0.130],
    [0.098, 0.014, 0.033, 0.032, 0.034, 0.003, 0.019],
    [0.119, 0.014, 0.033, 0.032, 0.034, 0.003, 0.019],
    [0.140, 0.021, 0.041, 0.047, 0.034, 0.003, 0.019],
    [0.140, 0.024, 0.041, 0.047, 0.034, 0.003, 0.019],
    [0.114, 0.021, 0.049, 0.016, 0.034, 0.005, 0.093],
];
