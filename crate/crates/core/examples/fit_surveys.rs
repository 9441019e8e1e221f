//! Searches for a panel of integer best-worst surveys whose aggregated
//! weights land on a target weight vector, and writes them as fixtures.
//!
//! Usage: fit_surveys <weights.json> <out-dir> [respondents] [seed]

use std::path::PathBuf;

use mcdm_core::bwm::{aggregate_weights, solve_bwm};
use mcdm_core::ComparisonSurvey;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn clamp_scale(x: f64) -> f64 {
    x.round().clamp(1.0, 9.0)
}

/// A survey read off a noisy copy of `target`.
fn seed_survey(rng: &mut StdRng, target: &[f64], id: usize) -> ComparisonSurvey {
    let noisy: Vec<f64> = target
        .iter()
        .map(|w| w * (1.0 + rng.random_range(-0.25..0.25)))
        .collect();
    let best = (0..noisy.len())
        .max_by(|&a, &b| noisy[a].total_cmp(&noisy[b]))
        .unwrap();
    let worst = (0..noisy.len())
        .min_by(|&a, &b| noisy[a].total_cmp(&noisy[b]))
        .unwrap();
    let mut bo: Vec<f64> = noisy.iter().map(|w| clamp_scale(noisy[best] / w)).collect();
    let mut ow: Vec<f64> = noisy
        .iter()
        .map(|w| clamp_scale(w / noisy[worst]))
        .collect();
    bo[best] = 1.0;
    ow[worst] = 1.0;
    ow[best] = bo[worst];
    ComparisonSurvey {
        respondent: format!("R{:02}", id + 1),
        best,
        worst,
        bo,
        ow,
    }
}

/// Moves one free comparison by one step, keeping the survey valid.
fn mutate(rng: &mut StdRng, s: &ComparisonSurvey) -> ComparisonSurvey {
    let mut out = s.clone();
    let n = s.bo.len();
    let step = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    loop {
        let j = rng.random_range(0..n);
        let on_bo = rng.random_bool(0.5);
        if (on_bo && j == s.best) || (!on_bo && j == s.worst) {
            continue;
        }
        let slot = if on_bo {
            &mut out.bo[j]
        } else {
            &mut out.ow[j]
        };
        *slot = (*slot + step).clamp(1.0, 9.0);
        if on_bo && j == s.worst {
            out.ow[s.best] = out.bo[j];
        }
        if !on_bo && j == s.best {
            out.bo[s.worst] = out.ow[j];
        }
        return out;
    }
}

fn score(panel: &[ComparisonSurvey], target: &[f64]) -> f64 {
    let mut vectors = Vec::new();
    let mut cr = 0.0;
    for s in panel {
        let sol = solve_bwm(s).expect("generated surveys are valid");
        cr += sol.weights.consistency_ratio.value().min(1.0);
        vectors.push(sol.weights);
    }
    let mean = aggregate_weights(&vectors).unwrap();
    let err = mean
        .weights
        .iter()
        .zip(target)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    // mild preference for consistent respondents
    err + 2e-3 * cr / panel.len() as f64
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    if args.len() < 3 {
        eprintln!("usage: fit_surveys <weights.json> <out-dir> [respondents] [seed]");
        std::process::exit(2);
    }
    let target: Vec<f64> = {
        let v: serde_json::Value =
            serde_json::from_slice(&std::fs::read(&args[1]).unwrap()).unwrap();
        serde_json::from_value(v["weights"].clone()).unwrap()
    };
    let out = PathBuf::from(&args[2]);
    let count: usize = args.get(3).map_or(15, |s| s.parse().unwrap());
    let seed: u64 = args.get(4).map_or(7, |s| s.parse().unwrap());
    let mut rng = StdRng::seed_from_u64(seed);

    let mut panel: Vec<ComparisonSurvey> = (0..count)
        .map(|i| seed_survey(&mut rng, &target, i))
        .collect();
    let mut current = score(&panel, &target);
    for _ in 0..6000 {
        let i = rng.random_range(0..count);
        let candidate = mutate(&mut rng, &panel[i]);
        let previous = std::mem::replace(&mut panel[i], candidate);
        let next = score(&panel, &target);
        if next <= current {
            current = next;
        } else {
            panel[i] = previous;
        }
    }

    std::fs::create_dir_all(&out).unwrap();
    for s in &panel {
        let path = out.join(format!("{}.json", s.respondent.to_lowercase()));
        let mut bytes = serde_json::to_vec_pretty(s).unwrap();
        bytes.push(b'\n');
        std::fs::write(path, bytes).unwrap();
    }
    let vectors: Vec<_> = panel
        .iter()
        .map(|s| solve_bwm(s).unwrap().weights)
        .collect();
    let mean = aggregate_weights(&vectors).unwrap();
    println!("objective {current:.6}");
    for (m, t) in mean.weights.iter().zip(&target) {
        println!("{m:.5} target {t:.5} error {:+.5}", m - t);
    }
}
