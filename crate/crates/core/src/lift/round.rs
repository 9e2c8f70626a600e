use crate::error::{check_dim, Error, Result};
use crate::oracles::LinearDomain;
use crate::rng::RngStream;
use crate::vector;

use super::body::LiftedBody;
use super::lattice::{is_staircase, LiftedPoint};

pub const DEFAULT_CARATHEODORY_CONSTANT: f64 = 16.0;

const INPUT_TOL: f64 = 1e-7;

/// Vertices whose uniform average approximates a relaxed point.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub vertices: Vec<LiftedPoint>,
    /// `‖y − mean‖` at termination.
    pub gap: f64,
}

impl Decomposition {
    pub fn mean(&self) -> Vec<f64> {
        let mut acc = vec![0.0; self.vertices[0].to_dense().len()];
        for v in &self.vertices {
            vector::axpy(1.0, &v.to_dense(), &mut acc);
        }
        vector::scale(&acc, 1.0 / self.vertices.len() as f64)
    }

    pub fn sample(&self, rng: &mut RngStream) -> &LiftedPoint {
        &self.vertices[rng.index(self.vertices.len())]
    }
}

/// Greedy vertex selection: each step adds the vertex that minimizes the
/// distance of the running average to `y`, found through the exact lifted
/// linear oracle. Stops once within `eps` or after `⌈c0/ε²⌉` vertices.
pub fn caratheodory_decompose(
    body: &LiftedBody,
    y: &[f64],
    eps: f64,
    c0: f64,
) -> Result<Decomposition> {
    check_dim(body.dim(), y.len())?;
    if !(eps > 0.0) || !(c0 > 0.0) {
        return Err(Error::InvalidArgument("eps and c0 must be positive".into()));
    }
    if !vector::in_unit_cube(y, INPUT_TOL) || !is_staircase(y, body.lattice().granularity(), INPUT_TOL) {
        return Err(Error::InvalidArgument(
            "rounding input is not a relaxed staircase point".into(),
        ));
    }
    let k_max = ((c0 / (eps * eps)).ceil() as usize).max(1);
    let mut total = vec![0.0; y.len()];
    let mut vertices = Vec::new();
    let mut gap = f64::INFINITY;
    for k in 0..k_max {
        let w: Vec<f64> = y
            .iter()
            .zip(&total)
            .map(|(yi, si)| 2.0 * ((k + 1) as f64 * yi - si) - 1.0)
            .collect();
        let v = body.vertex_maximize(&w)?;
        vector::axpy(1.0, &v.to_dense(), &mut total);
        vertices.push(v);
        let inv = 1.0 / (k + 1) as f64;
        gap = total
            .iter()
            .zip(y)
            .map(|(s, yi)| (s * inv - yi).powi(2))
            .sum::<f64>()
            .sqrt();
        if gap <= eps {
            return Ok(Decomposition { vertices, gap });
        }
    }
    Err(Error::CaratheodoryGap {
        achieved: gap,
        target: eps,
        steps: vertices.len(),
    })
}

/// One vertex of an approximate decomposition of `y`, drawn uniformly.
pub fn caratheodory_round(
    body: &LiftedBody,
    y: &[f64],
    eps: f64,
    c0: f64,
    rng: &mut RngStream,
) -> Result<LiftedPoint> {
    let d = caratheodory_decompose(body, y, eps, c0)?;
    Ok(d.sample(rng).clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::ConvexBody;
    use crate::lift::UnaryLattice;

    fn cube(n: usize, m: usize) -> LiftedBody {
        LiftedBody::new(UnaryLattice::new(n, m).unwrap(), ConvexBody::hypercube(n).unwrap()).unwrap()
    }

    #[test]
    fn vertex_returns_itself() {
        let body = cube(2, 3);
        let y = [1.0, 1.0, 0.0, 1.0, 0.0, 0.0];
        let d = caratheodory_decompose(&body, &y, 0.05, 16.0).unwrap();
        assert_eq!(d.vertices.len(), 1);
        assert_eq!(d.gap, 0.0);
        assert_eq!(d.vertices[0].levels(), &[2, 1]);
    }

    #[test]
    fn half_point_frequency() {
        let body = cube(1, 1);
        let eps = 1.0 / 400f64.sqrt();
        assert!((eps - 0.05).abs() < 1e-15);
        let d = caratheodory_decompose(&body, &[0.5], eps, 16.0).unwrap();
        assert!((d.mean()[0] - 0.5).abs() <= 0.05);
        let mut rng = RngStream::new(3);
        let ones = (0..10_000)
            .filter(|_| d.sample(&mut rng).levels()[0] == 1)
            .count();
        assert!((ones as f64 / 1e4 - 0.5).abs() <= 0.05);
    }

    #[test]
    fn gap_error_surfaces() {
        let body = cube(1, 1);
        let err = caratheodory_decompose(&body, &[1.0 / 3.0], 1e-3, 1e-6).unwrap_err();
        assert!(matches!(err, Error::CaratheodoryGap { .. }));
    }

    #[test]
    fn rejects_non_staircase() {
        let body = cube(1, 2);
        assert!(caratheodory_decompose(&body, &[0.1, 0.9], 0.1, 16.0).is_err());
    }

    #[test]
    fn budget_hull_point() {
        let body = LiftedBody::new(
            UnaryLattice::new(3, 2).unwrap(),
            ConvexBody::uniform_budget(3, 1.0).unwrap(),
        )
        .unwrap();
        let y = [0.5, 0.25, 0.5, 0.25, 0.25, 0.25];
        let d = caratheodory_decompose(&body, &y, 0.05, 16.0).unwrap();
        assert!(d.gap <= 0.05);
        for v in &d.vertices {
            assert!(v.weight() <= 2);
        }
    }
}
