//! Feasible regions inside `[0,1]^n` and their geometric oracles.

mod band;
mod polytope;

use band::Band;
use polytope::Halfspaces;

use crate::error::{check_dim, Error, Result};
use crate::vector;

/// Feasibility tolerance used by [`ConvexBody::contains`].
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// The supported body kinds. Every kind is intersected with `[0,1]^n`.
#[derive(Debug, Clone, PartialEq)]
pub enum BodyKind {
    Hypercube,
    /// `Σ c_i x_i ≤ B` with `c ≥ 0`.
    Budget { costs: Vec<f64>, budget: f64 },
    /// `A x ≤ b`.
    Polytope { rows: Vec<Vec<f64>>, rhs: Vec<f64> },
    /// `l ≤ x ≤ 1` and `min_total ≤ Σ c_i x_i ≤ max_total`; generally not
    /// down-closed.
    Band {
        lower: Vec<f64>,
        costs: Vec<f64>,
        min_total: f64,
        max_total: f64,
    },
}

/// Euclidean diameter, either exact or the `√n` bound of the unit cube.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diameter {
    pub value: f64,
    pub exact: bool,
}

#[derive(Debug, Clone)]
pub struct ConvexBody {
    n: usize,
    kind: BodyKind,
    down_closed: bool,
    diameter: Diameter,
}

fn check_costs(costs: &[f64]) -> Result<()> {
    if costs.iter().any(|c| !c.is_finite() || *c < 0.0) {
        return Err(Error::InvalidArgument(
            "costs must be finite and non-negative".into(),
        ));
    }
    Ok(())
}

impl ConvexBody {
    pub fn hypercube(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        Ok(Self {
            n,
            kind: BodyKind::Hypercube,
            down_closed: true,
            diameter: Diameter {
                value: (n as f64).sqrt(),
                exact: true,
            },
        })
    }

    pub fn budget(costs: Vec<f64>, budget: f64) -> Result<Self> {
        let n = costs.len();
        if n == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        check_costs(&costs)?;
        if !(budget.is_finite() && budget >= 0.0) {
            return Err(Error::InvalidArgument("budget must be finite and >= 0".into()));
        }
        let diameter = budget_diameter(&costs, budget);
        Ok(Self {
            n,
            kind: BodyKind::Budget { costs, budget },
            down_closed: true,
            diameter,
        })
    }

    /// `Σ x_i ≤ budget`.
    pub fn uniform_budget(n: usize, budget: f64) -> Result<Self> {
        Self::budget(vec![1.0; n], budget)
    }

    pub fn band(lower: Vec<f64>, costs: Vec<f64>, min_total: f64, max_total: f64) -> Result<Self> {
        let n = costs.len();
        if n == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        check_dim(n, lower.len())?;
        check_costs(&costs)?;
        if lower.iter().any(|l| !(0.0..=1.0).contains(l)) {
            return Err(Error::InvalidArgument("lower bounds must lie in [0,1]".into()));
        }
        if min_total.is_nan() || max_total.is_nan() || min_total > max_total {
            return Err(Error::InvalidArgument("empty total range".into()));
        }
        let down_closed = lower.iter().all(|l| *l == 0.0) && min_total <= 0.0;
        let body = Self {
            n,
            kind: BodyKind::Band {
                lower,
                costs,
                min_total,
                max_total,
            },
            down_closed,
            diameter: Diameter {
                value: (n as f64).sqrt(),
                exact: false,
            },
        };
        body.as_band().expect("band kind").check_feasible()?;
        Ok(body)
    }

    /// `min_total ≤ Σ x_i ≤ max_total`.
    pub fn total_band(n: usize, min_total: f64, max_total: f64) -> Result<Self> {
        Self::band(vec![0.0; n], vec![1.0; n], min_total, max_total)
    }

    pub fn polytope(rows: Vec<Vec<f64>>, rhs: Vec<f64>) -> Result<Self> {
        let n = rows.first().map(|r| r.len()).unwrap_or(0);
        if n == 0 {
            return Err(Error::InvalidArgument("polytope needs at least one row".into()));
        }
        check_dim(rows.len(), rhs.len())?;
        for r in &rows {
            check_dim(n, r.len())?;
        }
        if rows.iter().flatten().chain(&rhs).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("polytope data must be finite".into()));
        }
        // sufficient condition; bodies with negative coefficients are treated
        // as general
        let down_closed =
            rows.iter().flatten().all(|a| *a >= 0.0) && rhs.iter().all(|b| *b >= 0.0);
        let body = Self {
            n,
            kind: BodyKind::Polytope { rows, rhs },
            down_closed,
            diameter: Diameter {
                value: (n as f64).sqrt(),
                exact: false,
            },
        };
        body.min_inf_norm_point()?;
        Ok(body)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &BodyKind {
        &self.kind
    }

    pub fn is_down_closed(&self) -> bool {
        self.down_closed
    }

    pub fn diameter(&self) -> Diameter {
        self.diameter
    }

    /// `Some((cost, budget))` when the body is `Σ cost·x_i ≤ budget` with one
    /// common positive cost.
    pub fn uniform_budget_params(&self) -> Option<(f64, f64)> {
        match &self.kind {
            BodyKind::Budget { costs, budget } => {
                let c = costs[0];
                (c > 0.0 && costs.iter().all(|v| *v == c)).then_some((c, *budget))
            }
            _ => None,
        }
    }

    fn as_band(&self) -> Option<Band> {
        let n = self.n;
        match &self.kind {
            BodyKind::Hypercube => Some(Band {
                lower: vec![0.0; n],
                upper: vec![1.0; n],
                costs: vec![0.0; n],
                lo: f64::NEG_INFINITY,
                hi: f64::INFINITY,
            }),
            BodyKind::Budget { costs, budget } => Some(Band {
                lower: vec![0.0; n],
                upper: vec![1.0; n],
                costs: costs.clone(),
                lo: f64::NEG_INFINITY,
                hi: *budget,
            }),
            BodyKind::Band {
                lower,
                costs,
                min_total,
                max_total,
            } => Some(Band {
                lower: lower.clone(),
                upper: vec![1.0; n],
                costs: costs.clone(),
                lo: *min_total,
                hi: *max_total,
            }),
            BodyKind::Polytope { .. } => None,
        }
    }

    /// Membership within [`FEASIBILITY_TOL`].
    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        check_dim(self.n, x.len())?;
        Ok(self.contains_unchecked(x, FEASIBILITY_TOL))
    }

    pub(crate) fn contains_unchecked(&self, x: &[f64], tol: f64) -> bool {
        if !vector::is_finite(x) {
            return false;
        }
        match &self.kind {
            BodyKind::Polytope { rows, rhs } => {
                vector::in_unit_cube(x, tol)
                    && Halfspaces {
                        rows: rows.clone(),
                        rhs: rhs.clone(),
                    }
                    .contains(x, tol)
            }
            _ => self.as_band().expect("band kind").contains(x, tol),
        }
    }

    /// A vertex maximizing `⟨w, x⟩`.
    pub fn linear_maximize(&self, w: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.n, w.len())?;
        self.linear_maximize_capped(w, &vec![1.0; self.n])
    }

    /// Maximizes `⟨w, x⟩` over `{x ∈ K : x ≤ cap}`. Used by the offline
    /// Frank-Wolfe comparator on down-closed bodies, where `cap = 1 − x`.
    pub fn linear_maximize_capped(&self, w: &[f64], cap: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.n, w.len())?;
        check_dim(self.n, cap.len())?;
        if !vector::is_finite(w) {
            return Err(Error::InvalidArgument("non-finite objective".into()));
        }
        match &self.kind {
            BodyKind::Polytope { rows, rhs } => {
                let upper: Vec<f64> = cap.iter().map(|c| c.clamp(0.0, 1.0)).collect();
                Halfspaces {
                    rows: rows.clone(),
                    rhs: rhs.clone(),
                }
                .linear_maximize(w, &upper)
            }
            _ => {
                let mut band = self.as_band().expect("band kind");
                for (u, c) in band.upper.iter_mut().zip(cap) {
                    *u = u.min(*c).max(0.0);
                }
                if band.lower.iter().zip(&band.upper).any(|(l, u)| l > u) {
                    return Err(Error::Infeasible("cap below the lower box".into()));
                }
                band.linear_maximize(w)
            }
        }
    }

    /// Euclidean projection onto the body.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.n, x.len())?;
        if !vector::is_finite(x) {
            return Err(Error::InvalidArgument("non-finite point".into()));
        }
        match &self.kind {
            BodyKind::Hypercube => Ok(x.iter().map(|v| v.clamp(0.0, 1.0)).collect()),
            BodyKind::Polytope { rows, rhs } => Halfspaces {
                rows: rows.clone(),
                rhs: rhs.clone(),
            }
            .project(x),
            _ => Ok(self.as_band().expect("band kind").project(x)),
        }
    }

    /// The lexicographically smallest feasible point of minimum `‖·‖_∞`.
    pub fn min_inf_norm_point(&self) -> Result<Vec<f64>> {
        match &self.kind {
            BodyKind::Hypercube | BodyKind::Budget { .. } => Ok(vec![0.0; self.n]),
            BodyKind::Polytope { rows, rhs } => Halfspaces {
                rows: rows.clone(),
                rhs: rhs.clone(),
            }
            .min_inf_norm_point(self.n),
            BodyKind::Band { .. } => self.as_band().expect("band kind").min_inf_norm_point(),
        }
    }
}

const DIAMETER_ENUM_MAX: usize = 8;

/// Exact diameter of `{x ∈ [0,1]^n : ⟨c, x⟩ ≤ B}` when small enough to
/// enumerate, otherwise the `√n` bound.
///
/// Every vertex has at most one fractional coordinate, so the candidate set
/// `{1_S} ∪ {1_S + θ e_j}` contains all vertices. With a common cost each
/// vertex has at most `⌈B/c⌉` non-zeros, so the diameter only depends on
/// `min(n, 2⌈B/c⌉)` coordinates.
fn budget_diameter(costs: &[f64], budget: f64) -> Diameter {
    let n = costs.len();
    let bound = Diameter {
        value: (n as f64).sqrt(),
        exact: false,
    };
    let uniform = costs.iter().all(|c| *c == costs[0]);
    let (reduced, m): (Vec<f64>, usize) = if uniform && costs[0] > 0.0 {
        let per = (budget / costs[0] - 1e-12).ceil().max(0.0) as usize;
        let m = n.min(2 * per);
        (vec![costs[0]; m], m)
    } else {
        (costs.to_vec(), n)
    };
    if uniform && costs[0] == 0.0 {
        return Diameter {
            value: (n as f64).sqrt(),
            exact: true,
        };
    }
    if m > DIAMETER_ENUM_MAX {
        return bound;
    }
    if m == 0 {
        return Diameter {
            value: 0.0,
            exact: true,
        };
    }
    let mut cands: Vec<Vec<f64>> = Vec::new();
    for mask in 0u32..(1 << m) {
        let spent: f64 = (0..m)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| reduced[i])
            .sum();
        if spent > budget + 1e-12 {
            continue;
        }
        let base: Vec<f64> = (0..m)
            .map(|i| if mask & (1 << i) != 0 { 1.0 } else { 0.0 })
            .collect();
        for j in 0..m {
            if mask & (1 << j) == 0 && reduced[j] > 0.0 {
                let theta = ((budget - spent) / reduced[j]).min(1.0);
                if theta > 0.0 {
                    let mut p = base.clone();
                    p[j] = theta;
                    cands.push(p);
                }
            }
        }
        cands.push(base);
    }
    let mut best = 0.0_f64;
    for (a, p) in cands.iter().enumerate() {
        for q in &cands[a + 1..] {
            best = best.max(vector::dist(p, q));
        }
    }
    Diameter {
        value: best,
        exact: true,
    }
}
