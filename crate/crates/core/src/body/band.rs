//! Box `l ≤ x ≤ u` intersected with a two-sided weighted-total constraint
//! `lo ≤ ⟨c, x⟩ ≤ hi` with `c ≥ 0`. Hypercube, budget and lower-bounded
//! budget bodies all reduce to this shape, and every oracle on it is exact.

use crate::error::{Error, Result};
use crate::vector::dot;

const FEAS_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub(crate) struct Band {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub costs: Vec<f64>,
    pub lo: f64,
    pub hi: f64,
}

impl Band {
    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn check_feasible(&self) -> Result<()> {
        if self
            .lower
            .iter()
            .zip(&self.upper)
            .any(|(l, u)| *l > *u + FEAS_TOL)
        {
            return Err(Error::Infeasible("box lower bound exceeds upper bound".into()));
        }
        let min_total = dot(&self.costs, &self.lower);
        let max_total = dot(&self.costs, &self.upper);
        if min_total > self.hi + FEAS_TOL {
            return Err(Error::Infeasible(format!(
                "smallest attainable total {min_total} exceeds the upper limit {}",
                self.hi
            )));
        }
        if max_total < self.lo - FEAS_TOL {
            return Err(Error::Infeasible(format!(
                "largest attainable total {max_total} is below the lower limit {}",
                self.lo
            )));
        }
        Ok(())
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        let in_box = x
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(xi, (l, u))| *xi >= l - tol && *xi <= u + tol);
        if !in_box {
            return false;
        }
        let total = dot(&self.costs, x);
        total >= self.lo - tol && total <= self.hi + tol
    }

    /// Exact maximizer of `⟨w, x⟩`. Zero-weight coordinates sit at their lower
    /// bound; among equal weight-per-cost ratios the lower index keeps its
    /// upper value.
    pub fn linear_maximize(&self, w: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        let mut x: Vec<f64> = (0..n)
            .map(|i| if w[i] > 0.0 { self.upper[i] } else { self.lower[i] })
            .collect();
        let total = dot(&self.costs, &x);
        if total > self.hi {
            let mut excess = total - self.hi;
            let mut idx: Vec<usize> = (0..n)
                .filter(|&i| self.costs[i] > 0.0 && x[i] > self.lower[i])
                .collect();
            // cheapest loss per unit of cost first; ties drop the higher index first
            idx.sort_by(|&a, &b| {
                let ra = w[a] / self.costs[a];
                let rb = w[b] / self.costs[b];
                ra.total_cmp(&rb).then(b.cmp(&a))
            });
            for i in idx {
                if excess <= 0.0 {
                    break;
                }
                let room = (x[i] - self.lower[i]) * self.costs[i];
                let take = room.min(excess);
                x[i] = if take >= room {
                    self.lower[i]
                } else {
                    x[i] - take / self.costs[i]
                };
                excess -= take;
            }
            if excess > FEAS_TOL {
                return Err(Error::Infeasible("upper total limit unreachable".into()));
            }
        } else if total < self.lo {
            let mut deficit = self.lo - total;
            let mut idx: Vec<usize> = (0..n)
                .filter(|&i| self.costs[i] > 0.0 && x[i] < self.upper[i])
                .collect();
            idx.sort_by(|&a, &b| {
                let ra = w[a] / self.costs[a];
                let rb = w[b] / self.costs[b];
                rb.total_cmp(&ra).then(a.cmp(&b))
            });
            for i in idx {
                if deficit <= 0.0 {
                    break;
                }
                let room = (self.upper[i] - x[i]) * self.costs[i];
                let take = room.min(deficit);
                x[i] = if take >= room {
                    self.upper[i]
                } else {
                    x[i] + take / self.costs[i]
                };
                deficit -= take;
            }
            if deficit > FEAS_TOL {
                return Err(Error::Infeasible("lower total limit unreachable".into()));
            }
        }
        Ok(x)
    }

    fn clamped(&self, y: &[f64], lambda: f64) -> Vec<f64> {
        (0..self.dim())
            .map(|i| (y[i] - lambda * self.costs[i]).clamp(self.lower[i], self.upper[i]))
            .collect()
    }

    /// Euclidean projection: `x(λ) = clamp(y − λc, l, u)` with the multiplier
    /// located by bisection and then solved exactly on the final active set.
    pub fn project(&self, y: &[f64]) -> Vec<f64> {
        let x0 = self.clamped(y, 0.0);
        let t0 = dot(&self.costs, &x0);
        if t0 >= self.lo && t0 <= self.hi {
            return x0;
        }
        let (target, mut a, mut b) = if t0 > self.hi {
            let lmax = (0..self.dim())
                .filter(|&i| self.costs[i] > 0.0)
                .map(|i| (y[i] - self.lower[i]) / self.costs[i])
                .fold(0.0_f64, f64::max);
            (self.hi, 0.0, lmax + 1.0)
        } else {
            let lmin = (0..self.dim())
                .filter(|&i| self.costs[i] > 0.0)
                .map(|i| (y[i] - self.upper[i]) / self.costs[i])
                .fold(0.0_f64, f64::min);
            (self.lo, lmin - 1.0, 0.0)
        };
        // total(λ) is non-increasing in λ
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            let t = dot(&self.costs, &self.clamped(y, mid));
            if t > target {
                a = mid;
            } else {
                b = mid;
            }
        }
        let mid = 0.5 * (a + b);
        let mut num = -target;
        let mut den = 0.0;
        for i in 0..self.dim() {
            let c = self.costs[i];
            let v = y[i] - mid * c;
            if c > 0.0 && v > self.lower[i] && v < self.upper[i] {
                num += c * y[i];
                den += c * c;
            } else {
                num += c * v.clamp(self.lower[i], self.upper[i]);
            }
        }
        if den > 0.0 {
            let exact = num / den;
            if (a - 1e-12..=b + 1e-12).contains(&exact) {
                return self.clamped(y, exact);
            }
        }
        self.clamped(y, mid)
    }

    /// Lexicographically smallest point minimizing `‖x‖_∞` over the band
    /// (all coordinates are non-negative here).
    pub fn min_inf_norm_point(&self) -> Result<Vec<f64>> {
        self.check_feasible()?;
        let n = self.dim();
        let s_min = self.lower.iter().fold(0.0_f64, |m, v| m.max(*v));
        let reach = |s: f64| -> f64 {
            (0..n)
                .map(|i| self.costs[i] * self.upper[i].min(s).max(self.lower[i]))
                .sum()
        };
        let s = if !self.lo.is_finite() || reach(s_min) >= self.lo {
            s_min
        } else {
            let s_max = self.upper.iter().fold(s_min, |m, v| m.max(*v));
            if reach(s_max) < self.lo - FEAS_TOL {
                return Err(Error::Infeasible("lower total limit unreachable".into()));
            }
            let (mut a, mut b) = (s_min, s_max);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if reach(mid) >= self.lo {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            // exact solve on the active set at the bracket
            let mut fixed = 0.0;
            let mut slope = 0.0;
            for i in 0..n {
                if self.upper[i] <= a {
                    fixed += self.costs[i] * self.upper[i];
                } else {
                    slope += self.costs[i];
                }
            }
            let exact = if slope > 0.0 { (self.lo - fixed) / slope } else { b };
            if exact >= a - 1e-12 && exact <= b + 1e-12 && reach(exact) >= self.lo - 1e-12 {
                exact.max(s_min)
            } else {
                b
            }
        };
        let mut x = self.lower.clone();
        if self.lo.is_finite() {
            let mut deficit = self.lo - dot(&self.costs, &x);
            // put mass on the highest indices first
            for i in (0..n).rev() {
                if deficit <= 0.0 {
                    break;
                }
                if self.costs[i] <= 0.0 {
                    continue;
                }
                let cap = self.upper[i].min(s);
                let room = (cap - x[i]).max(0.0) * self.costs[i];
                let take = room.min(deficit);
                x[i] = if take >= room { cap } else { x[i] + take / self.costs[i] };
                deficit -= take;
            }
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn band(n: usize, lo: f64, hi: f64) -> Band {
        Band {
            lower: vec![0.0; n],
            upper: vec![1.0; n],
            costs: vec![1.0; n],
            lo,
            hi,
        }
    }

    #[test]
    fn project_hits_total_exactly() {
        let b = band(3, f64::NEG_INFINITY, 1.0);
        let x = b.project(&[0.9, 0.8, -0.2]);
        assert!((x.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        assert!((x[0] - 0.55).abs() < 1e-12 && (x[1] - 0.45).abs() < 1e-12);
        assert_eq!(x[2], 0.0);
    }

    #[test]
    fn project_raises_to_lower_total() {
        let b = band(2, 0.1, 1.0);
        let x = b.project(&[0.0, -0.5]);
        assert!((x[0] - 0.1).abs() < 1e-12);
        assert_eq!(x[1], 0.0);
    }

    #[test]
    fn linear_max_fills_lower_total() {
        let b = band(2, 0.5, 1.0);
        let x = b.linear_maximize(&[-1.0, -2.0]).unwrap();
        assert_eq!(x, vec![0.5, 0.0]);
    }
}
