use crate::body::{BodyKind, ConvexBody};
use crate::error::{check_dim, Error, Result};
use crate::oracles::LinearDomain;
use crate::vector;

use super::lattice::{is_staircase, LiftedPoint, UnaryLattice};

const MEMBERSHIP_TOL: f64 = 1e-9;
const PROJECTION_GAP_TOL: f64 = 1e-12;
const PROJECTION_ACCEPT_GAP: f64 = 1e-8;
const PROJECTION_MAX_ITERS: usize = 10_000;

/// The convex hull of the lifted lattice points of a base body.
#[derive(Debug, Clone)]
pub struct LiftedBody {
    lattice: UnaryLattice,
    base: ConvexBody,
    /// Maximum number of lattice increments, `None` when unconstrained.
    capacity: Option<usize>,
}

impl LiftedBody {
    /// Supports hypercube bases and budgets with uniform costs.
    pub fn new(lattice: UnaryLattice, base: ConvexBody) -> Result<Self> {
        check_dim(lattice.dim(), base.dim())?;
        let capacity = match base.kind() {
            BodyKind::Hypercube => None,
            BodyKind::Budget { .. } => {
                let (cost, budget) = base.uniform_budget_params().ok_or_else(|| {
                    Error::UnsupportedLiftedBody(
                        "budget with non-uniform costs; use a hypercube or uniform budget".into(),
                    )
                })?;
                let k = (budget * lattice.granularity() as f64 / cost + 1e-9).floor() as usize;
                if k >= lattice.lifted_dim() {
                    None
                } else {
                    Some(k)
                }
            }
            other => {
                return Err(Error::UnsupportedLiftedBody(format!(
                    "{other:?}; use a hypercube or uniform budget"
                )))
            }
        };
        Ok(Self {
            lattice,
            base,
            capacity,
        })
    }

    pub fn lattice(&self) -> &UnaryLattice {
        &self.lattice
    }

    pub fn base(&self) -> &ConvexBody {
        &self.base
    }

    pub fn capacity(&self) -> Option<usize> {
        self.capacity
    }

    /// Exact linear maximization over the integral staircase points.
    pub fn vertex_maximize(&self, w: &[f64]) -> Result<LiftedPoint> {
        let n = self.lattice.dim();
        let m = self.lattice.granularity();
        check_dim(n * m, w.len())?;
        if !vector::is_finite(w) {
            return Err(Error::InvalidArgument("non-finite weights".into()));
        }
        let prefix: Vec<Vec<f64>> = w
            .chunks(m)
            .map(|block| {
                let mut acc = vec![0.0; m + 1];
                for j in 0..m {
                    acc[j + 1] = acc[j] + block[j];
                }
                acc
            })
            .collect();
        let levels = match self.capacity {
            None => prefix
                .iter()
                .map(|p| {
                    let mut best = 0;
                    for l in 1..=m {
                        if p[l] > p[best] {
                            best = l;
                        }
                    }
                    best
                })
                .collect(),
            Some(k) => knapsack_levels(&prefix, m, k),
        };
        LiftedPoint::from_levels(m, levels)
    }

    fn contains_relaxed(&self, y: &[f64], tol: f64) -> bool {
        if y.len() != self.lattice.lifted_dim() || !vector::in_unit_cube(y, tol) {
            return false;
        }
        if !is_staircase(y, self.lattice.granularity(), tol) {
            return false;
        }
        match self.capacity {
            None => true,
            Some(k) => y.iter().sum::<f64>() <= k as f64 + tol,
        }
    }

    fn project_staircase(&self, y: &[f64]) -> Vec<f64> {
        let m = self.lattice.granularity();
        y.chunks(m)
            .flat_map(|block| {
                decreasing_fit(block)
                    .into_iter()
                    .map(|v| v.clamp(0.0, 1.0))
            })
            .collect()
    }

    /// Euclidean projection onto the hull of the integral points by
    /// away-step Frank-Wolfe.
    fn project_hull(&self, y: &[f64]) -> Result<Vec<f64>> {
        let ones_shift: Vec<f64> = y.iter().map(|v| 2.0 * v - 1.0).collect();
        let v0 = self.vertex_maximize(&ones_shift)?;
        let mut z = v0.to_dense();
        let mut active: Vec<(LiftedPoint, Vec<f64>, f64)> = vec![(v0, z.clone(), 1.0)];
        let mut gap = f64::INFINITY;
        for _ in 0..PROJECTION_MAX_ITERS {
            let neg_grad = vector::sub(y, &z);
            let s = self.vertex_maximize(&neg_grad)?;
            let s_dense = s.to_dense();
            gap = vector::dot(&neg_grad, &vector::sub(&s_dense, &z));
            if gap <= PROJECTION_GAP_TOL {
                return Ok(z);
            }
            let (away_idx, away_gap) = active
                .iter()
                .enumerate()
                .map(|(i, (_, d, _))| (i, -vector::dot(&neg_grad, &vector::sub(d, &z))))
                .fold((0, f64::NEG_INFINITY), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
            let toward = gap >= away_gap || active.len() == 1;
            let (dir, max_step) = if toward {
                (vector::sub(&s_dense, &z), 1.0)
            } else {
                let w = active[away_idx].2;
                (vector::sub(&z, &active[away_idx].1), w / (1.0 - w))
            };
            let dd = vector::dot(&dir, &dir);
            if dd == 0.0 {
                break;
            }
            let step = (vector::dot(&neg_grad, &dir) / dd).clamp(0.0, max_step);
            vector::axpy(step, &dir, &mut z);
            if toward {
                if step >= 1.0 {
                    active = vec![(s, s_dense, 1.0)];
                } else {
                    for a in active.iter_mut() {
                        a.2 *= 1.0 - step;
                    }
                    match active.iter_mut().find(|a| a.0 == s) {
                        Some(a) => a.2 += step,
                        None => active.push((s, s_dense, step)),
                    }
                }
            } else {
                for a in active.iter_mut() {
                    a.2 *= 1.0 + step;
                }
                active[away_idx].2 -= step;
                if step >= max_step {
                    active.remove(away_idx);
                }
            }
        }
        if gap <= PROJECTION_ACCEPT_GAP {
            return Ok(z);
        }
        Err(Error::NonConvergence {
            what: "lifted projection",
            iterations: PROJECTION_MAX_ITERS,
            residual: gap,
        })
    }
}

/// Best levels with `Σ ℓ_i ≤ k`, ties resolved toward smaller levels in
/// later blocks.
fn knapsack_levels(prefix: &[Vec<f64>], m: usize, k: usize) -> Vec<usize> {
    let n = prefix.len();
    let mut dp = vec![0.0; k + 1];
    let mut choice = vec![vec![0usize; k + 1]; n];
    for (i, p) in prefix.iter().enumerate() {
        let mut next = vec![f64::NEG_INFINITY; k + 1];
        for cap in 0..=k {
            for l in 0..=m.min(cap) {
                let v = dp[cap - l] + p[l];
                if v > next[cap] {
                    next[cap] = v;
                    choice[i][cap] = l;
                }
            }
        }
        dp = next;
    }
    let mut levels = vec![0; n];
    let mut cap = k;
    for i in (0..n).rev() {
        levels[i] = choice[i][cap];
        cap -= levels[i];
    }
    levels
}

/// Least-squares non-increasing fit by pool-adjacent-violators.
fn decreasing_fit(y: &[f64]) -> Vec<f64> {
    let mut pools: Vec<(f64, usize)> = Vec::with_capacity(y.len());
    for v in y {
        pools.push((*v, 1));
        while pools.len() > 1 {
            let (s1, c1) = pools[pools.len() - 1];
            let (s0, c0) = pools[pools.len() - 2];
            if s0 / c0 as f64 >= s1 / c1 as f64 {
                break;
            }
            pools.pop();
            *pools.last_mut().unwrap() = (s0 + s1, c0 + c1);
        }
    }
    pools
        .into_iter()
        .flat_map(|(s, c)| std::iter::repeat_n(s / c as f64, c))
        .collect()
}

impl LinearDomain for LiftedBody {
    fn dim(&self) -> usize {
        self.lattice.lifted_dim()
    }

    fn contains(&self, y: &[f64]) -> bool {
        if !self.contains_relaxed(y, MEMBERSHIP_TOL) {
            return false;
        }
        match self.capacity {
            None => true,
            Some(_) => self
                .project_hull(y)
                .map(|p| vector::dist(&p, y) <= 1e-6)
                .unwrap_or(false),
        }
    }

    fn linear_maximize(&self, w: &[f64]) -> Result<Vec<f64>> {
        Ok(self.vertex_maximize(w)?.to_dense())
    }

    fn project(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.lattice.lifted_dim(), y.len())?;
        match self.capacity {
            None => Ok(self.project_staircase(y)),
            Some(_) => self.project_hull(y),
        }
    }

    /// `√(nM)` without a budget, `√(min(2K, nM))` with `K` increments.
    fn diameter(&self) -> f64 {
        let full = self.lattice.lifted_dim();
        match self.capacity {
            None => (full as f64).sqrt(),
            Some(k) => ((2 * k).min(full) as f64).sqrt(),
        }
    }

    fn start_point(&self) -> Result<Vec<f64>> {
        Ok(vec![0.0; self.lattice.lifted_dim()])
    }
}
