use serde::Serialize;

use drsub_core::body::{BodyKind, FEASIBILITY_TOL};
use drsub_core::function::DrFunction;
use drsub_core::mfw::StepSchedule;
use drsub_core::{vector, ConvexBody, RngStream};

use crate::config::{HindsightConfig, HindsightMethod};
use crate::error::BenchResult;

pub const BRUTE_FORCE_POINTS: usize = 1_000_000;
pub const MAX_GRID: usize = 100;

#[derive(Debug, Clone, Serialize)]
pub struct Candidate {
    pub method: HindsightMethod,
    pub value: f64,
}

/// The best fixed point found for the summed objective.
#[derive(Debug, Clone, Serialize)]
pub struct Comparator {
    pub point: Vec<f64>,
    pub value: f64,
    pub method: HindsightMethod,
    pub candidates: Vec<Candidate>,
    pub grid: Option<usize>,
}

/// Largest `M ≤ 100` with `(M+1)^n ≤ 10⁶`.
pub fn default_grid(n: usize) -> usize {
    (1..=MAX_GRID)
        .rev()
        .find(|m| ((m + 1) as f64).powi(n as i32) <= BRUTE_FORCE_POINTS as f64)
        .unwrap_or(1)
}

/// Exhaustive search over `{0, 1/M, …, 1}^n ∩ K`, pruning partial sums for
/// budget and band bodies.
pub fn lattice_bruteforce(f: &dyn DrFunction, body: &ConvexBody, grid: usize) -> Option<(Vec<f64>, f64)> {
    let n = body.dim();
    let (costs, cap, floor) = match body.kind() {
        BodyKind::Budget { costs, budget } => (Some(costs.clone()), *budget, f64::NEG_INFINITY),
        BodyKind::Band {
            costs,
            min_total,
            max_total,
            ..
        } => (Some(costs.clone()), *max_total, *min_total),
        _ => (None, f64::INFINITY, f64::NEG_INFINITY),
    };
    let costs = costs.unwrap_or_else(|| vec![0.0; n]);
    let mut suffix = vec![0.0; n + 1];
    for i in (0..n).rev() {
        suffix[i] = suffix[i + 1] + costs[i];
    }
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut x = vec![0.0; n];
    fn recurse(
        i: usize,
        spent: f64,
        x: &mut Vec<f64>,
        ctx: &(usize, &[f64], &[f64], f64, f64, &dyn DrFunction, &ConvexBody),
        best: &mut Option<(Vec<f64>, f64)>,
    ) {
        let (grid, costs, suffix, cap, floor, f, body) = *ctx;
        if spent > cap + FEASIBILITY_TOL || spent + suffix[i] < floor - FEASIBILITY_TOL {
            return;
        }
        if i == x.len() {
            if body.contains(x).unwrap_or(false) {
                let v = f.value(x);
                if best.as_ref().is_none_or(|(_, b)| v > *b) {
                    *best = Some((x.clone(), v));
                }
            }
            return;
        }
        for level in 0..=grid {
            let xi = level as f64 / grid as f64;
            x[i] = xi;
            recurse(i + 1, spent + costs[i] * xi, x, ctx, best);
        }
        x[i] = 0.0;
    }
    let ctx = (grid, costs.as_slice(), suffix.as_slice(), cap, floor, f, body);
    recurse(0, 0.0, &mut x, &ctx, &mut best);
    best
}

/// Offline Frank-Wolfe variants with exact gradients; returns the best end
/// point. Down-closed bodies run the capped step `x += v/L` with
/// `v ≤ 1 − x`; every body also runs the harmonic-step variant from the
/// minimum-∞-norm point and classic Frank-Wolfe with step `2/(k+2)`.
pub fn offline_frank_wolfe(f: &dyn DrFunction, body: &ConvexBody, levels: usize) -> BenchResult<(Vec<f64>, f64)> {
    let n = body.dim();
    let mut outcomes = Vec::new();
    if body.is_down_closed() {
        let mut x = vec![0.0; n];
        for _ in 0..levels {
            let g = f.gradient(&x);
            let cap: Vec<f64> = x.iter().map(|v| (1.0 - v).max(0.0)).collect();
            let v = body.linear_maximize_capped(&g, &cap)?;
            vector::axpy(1.0 / levels as f64, &v, &mut x);
        }
        outcomes.push(body.project(&x)?);
    }
    let start = body.min_inf_norm_point()?;
    let schedule = StepSchedule::harmonic(levels)?;
    let mut x = start.clone();
    for eta in schedule.eta() {
        let v = body.linear_maximize(&f.gradient(&x))?;
        x = vector::add(&vector::scale(&x, 1.0 - eta), &vector::scale(&v, *eta));
    }
    outcomes.push(x);
    let mut x = start;
    for k in 0..levels {
        let v = body.linear_maximize(&f.gradient(&x))?;
        let eta = 2.0 / (k as f64 + 2.0);
        x = vector::add(&vector::scale(&x, 1.0 - eta), &vector::scale(&v, eta));
    }
    outcomes.push(x);
    Ok(best_of(f, outcomes))
}

/// Projected gradient ascent with backtracking from random starts.
pub fn multistart_ascent(
    f: &dyn DrFunction,
    body: &ConvexBody,
    starts: usize,
    iterations: usize,
    rng: &mut RngStream,
) -> BenchResult<(Vec<f64>, f64)> {
    let n = body.dim();
    let mut outcomes = Vec::with_capacity(starts);
    for _ in 0..starts.max(1) {
        let raw: Vec<f64> = (0..n).map(|_| rng.uniform()).collect();
        let mut x = body.project(&raw)?;
        let mut fx = f.value(&x);
        let mut step = 1.0 / vector::norm(&f.gradient(&x)).max(1e-12);
        for _ in 0..iterations {
            let g = f.gradient(&x);
            let mut moved = false;
            while step > 1e-12 {
                let mut trial = x.clone();
                vector::axpy(step, &g, &mut trial);
                let trial = body.project(&trial)?;
                let ft = f.value(&trial);
                if ft > fx {
                    x = trial;
                    fx = ft;
                    step *= 1.5;
                    moved = true;
                    break;
                }
                step *= 0.5;
            }
            if !moved {
                break;
            }
        }
        outcomes.push(x);
    }
    Ok(best_of(f, outcomes))
}

fn best_of(f: &dyn DrFunction, points: Vec<Vec<f64>>) -> (Vec<f64>, f64) {
    points
        .into_iter()
        .map(|p| {
            let v = f.value(&p);
            (p, v)
        })
        .fold((Vec::new(), f64::NEG_INFINITY), |acc, cur| if cur.1 > acc.1 { cur } else { acc })
}

/// Runs every configured method and keeps the best point.
pub fn compute_hindsight(
    f: &dyn DrFunction,
    body: &ConvexBody,
    played: &[Vec<f64>],
    cfg: &HindsightConfig,
    rng: &mut RngStream,
) -> BenchResult<Comparator> {
    let n = body.dim();
    let mut candidates = Vec::new();
    let mut best: Option<(Vec<f64>, f64, HindsightMethod)> = None;
    let mut grid_used = None;
    for method in &cfg.methods {
        let found = match method {
            HindsightMethod::Lattice => {
                let grid = cfg.grid.unwrap_or_else(|| default_grid(n));
                grid_used = Some(grid);
                lattice_bruteforce(f, body, grid)
            }
            HindsightMethod::FrankWolfe => Some(offline_frank_wolfe(f, body, cfg.fw_levels)?),
            HindsightMethod::Ascent => Some(multistart_ascent(
                f,
                body,
                cfg.ascent_starts,
                cfg.ascent_iterations,
                rng,
            )?),
            HindsightMethod::Played => {
                let pts = played.to_vec();
                (!pts.is_empty()).then(|| best_of(f, pts))
            }
        };
        if let Some((point, value)) = found {
            candidates.push(Candidate {
                method: *method,
                value,
            });
            if best.as_ref().is_none_or(|b| value > b.1) {
                best = Some((point, value, *method));
            }
        }
    }
    let (point, value, method) = match best {
        Some(b) => b,
        None => {
            let x = body.min_inf_norm_point()?;
            let v = f.value(&x);
            (x, v, HindsightMethod::Played)
        }
    };
    log::info!("hindsight comparator {value:.6} from {method:?}");
    Ok(Comparator {
        point,
        value,
        method,
        candidates,
        grid: grid_used,
    })
}
