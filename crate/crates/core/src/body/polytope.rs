//! `{x ∈ [0,1]^n : A x ≤ b}` backed by a simplex LP solver for linear
//! optimization and Dykstra's alternating projections for the Euclidean
//! projection.

use microlp::{ComparisonOp, LinearExpr, OptimizationDirection, Problem, Variable};

use crate::error::{Error, Result};
use crate::vector::dot;

pub(crate) const DYKSTRA_MAX_SWEEPS: usize = 10_000;

#[derive(Debug, Clone)]
pub(crate) struct Halfspaces {
    pub rows: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
}

fn lp_error(e: microlp::Error) -> Error {
    match e {
        microlp::Error::Infeasible => Error::Infeasible("linear program is infeasible".into()),
        other => Error::Internal(format!("linear program failed: {other}")),
    }
}

impl Halfspaces {
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.rows
            .iter()
            .zip(&self.rhs)
            .all(|(a, b)| dot(a, x) <= b + tol)
    }

    fn add_rows(&self, problem: &mut Problem, vars: &[Variable]) {
        for (a, b) in self.rows.iter().zip(&self.rhs) {
            let mut expr = LinearExpr::empty();
            for (v, coef) in vars.iter().zip(a) {
                if *coef != 0.0 {
                    expr.add(*v, *coef);
                }
            }
            problem.add_constraint(expr, ComparisonOp::Le, *b);
        }
    }

    /// Maximizes `⟨w, x⟩` over the polytope with per-coordinate caps `x ≤ upper`.
    pub fn linear_maximize(&self, w: &[f64], upper: &[f64]) -> Result<Vec<f64>> {
        let mut problem = Problem::new(OptimizationDirection::Maximize);
        let vars: Vec<Variable> = w
            .iter()
            .zip(upper)
            .map(|(wi, ui)| problem.add_var(*wi, (0.0, *ui)))
            .collect();
        self.add_rows(&mut problem, &vars);
        let sol = problem.solve().map_err(lp_error)?;
        Ok(vars
            .iter()
            .map(|v| sol.var_value(*v).clamp(0.0, 1.0))
            .collect())
    }

    /// Smallest `s` with a feasible `0 ≤ x ≤ s·1`, then the lexicographically
    /// smallest such `x` by successive LPs.
    pub fn min_inf_norm_point(&self, n: usize) -> Result<Vec<f64>> {
        let mut problem = Problem::new(OptimizationDirection::Minimize);
        let vars: Vec<Variable> = (0..n).map(|_| problem.add_var(0.0, (0.0, 1.0))).collect();
        let s = problem.add_var(1.0, (0.0, 1.0));
        for v in &vars {
            problem.add_constraint([(*v, 1.0), (s, -1.0)], ComparisonOp::Le, 0.0);
        }
        self.add_rows(&mut problem, &vars);
        let sol = problem.solve().map_err(lp_error)?;
        let s_star = (*sol.var_value(s) + 1e-12).min(1.0);

        let mut fixed: Vec<f64> = Vec::with_capacity(n);
        for i in 0..n {
            let mut p = Problem::new(OptimizationDirection::Minimize);
            let xs: Vec<Variable> = (0..n)
                .map(|j| {
                    if j < i {
                        p.add_var(0.0, (fixed[j], fixed[j]))
                    } else {
                        p.add_var(if j == i { 1.0 } else { 0.0 }, (0.0, s_star))
                    }
                })
                .collect();
            self.add_rows(&mut p, &xs);
            let sol = p.solve().map_err(lp_error)?;
            fixed.push(sol.var_value(xs[i]).max(0.0));
        }
        Ok(fixed)
    }

    /// Dykstra's alternating projection onto the halfspaces and the unit box.
    pub fn project(&self, y: &[f64]) -> Result<Vec<f64>> {
        let n = y.len();
        let m = self.rows.len();
        let norms: Vec<f64> = self.rows.iter().map(|a| dot(a, a)).collect();
        let mut x = y.to_vec();
        let mut incr = vec![vec![0.0; n]; m + 1];
        let mut z = vec![0.0; n];
        let mut residual = f64::INFINITY;
        for _ in 0..DYKSTRA_MAX_SWEEPS {
            let prev = x.clone();
            let mut moved = 0.0_f64;
            for k in 0..=m {
                for i in 0..n {
                    z[i] = x[i] + incr[k][i];
                }
                if k < m {
                    let viol = dot(&self.rows[k], &z) - self.rhs[k];
                    if viol > 0.0 && norms[k] > 0.0 {
                        let t = viol / norms[k];
                        for i in 0..n {
                            x[i] = z[i] - t * self.rows[k][i];
                        }
                    } else {
                        x.copy_from_slice(&z);
                    }
                } else {
                    for i in 0..n {
                        x[i] = z[i].clamp(0.0, 1.0);
                    }
                }
                for i in 0..n {
                    let next = z[i] - x[i];
                    moved = moved.max((next - incr[k][i]).abs());
                    incr[k][i] = next;
                }
            }
            // x can stall at a corner while the corrections still move
            residual = prev
                .iter()
                .zip(&x)
                .map(|(a, b)| (a - b).abs())
                .fold(moved, f64::max);
            if residual < 1e-13 && self.contains(&x, 1e-10) {
                return Ok(x);
            }
        }
        Err(Error::NonConvergence {
            what: "polytope projection",
            iterations: DYKSTRA_MAX_SWEEPS,
            residual,
        })
    }
}
