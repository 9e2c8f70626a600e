use std::sync::Arc;

use crate::error::{Error, Result};
use crate::function::{DrFunction, SmoothnessParams};

use super::graph::Graph;

/// Expected revenue `F(x) = Σ_i Σ_{j≠i} w_ij (1 − q^{x_i}) q^{x_j}` with
/// `q = 1 − p`.
#[derive(Debug, Clone)]
pub struct RevenueInstance {
    graph: Arc<Graph>,
    p: f64,
    ln_q: f64,
}

impl RevenueInstance {
    pub fn new(graph: Arc<Graph>, p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidArgument(format!("p = {p} outside (0, 1)")));
        }
        Ok(Self {
            graph,
            p,
            ln_q: (1.0 - p).ln(),
        })
    }

    pub fn graph(&self) -> &Arc<Graph> {
        &self.graph
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// The instance whose value is the sum of the given ones.
    pub fn aggregate(parts: &[&RevenueInstance]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidArgument("nothing to aggregate".into()))?;
        if parts.iter().any(|r| r.p != first.p) {
            return Err(Error::InvalidArgument("aggregated instances differ in p".into()));
        }
        let graphs: Vec<&Graph> = parts.iter().map(|r| r.graph.as_ref()).collect();
        Self::new(Arc::new(Graph::sum(&graphs)?), first.p)
    }

    fn powers(&self, x: &[f64]) -> Vec<f64> {
        x.iter().map(|v| (self.ln_q * v).exp()).collect()
    }
}

impl DrFunction for RevenueInstance {
    fn dim(&self) -> usize {
        self.graph.vertex_count()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let q = self.powers(x);
        (0..self.dim())
            .map(|i| {
                let out: f64 = self.graph.neighbors(i).map(|(j, w)| w * q[j]).sum();
                (1.0 - q[i]) * out
            })
            .sum()
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let q = self.powers(x);
        (0..self.dim())
            .map(|k| {
                let (stay, reached) = self
                    .graph
                    .neighbors(k)
                    .fold((0.0, 0.0), |(s, r), (j, w)| (s + w * q[j], r + w * (1.0 - q[j])));
                self.ln_q * q[k] * (reached - stay)
            })
            .collect()
    }

    fn params(&self) -> Option<SmoothnessParams> {
        let degrees: Vec<f64> = (0..self.dim()).map(|i| self.graph.degree(i)).collect();
        let l2 = degrees.iter().map(|d| d * d).sum::<f64>().sqrt();
        let max = degrees.iter().cloned().fold(0.0, f64::max);
        Some(SmoothnessParams {
            lipschitz: self.ln_q.abs() * l2,
            smoothness: 3.0 * self.ln_q * self.ln_q * max,
            noise: 0.0,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checks::{dr_check, grad_check};
    use crate::instances::gen_random_graph;
    use crate::rng::RngStream;

    fn pair() -> RevenueInstance {
        RevenueInstance::new(Arc::new(Graph::from_edges(2, &[(0, 1, 1.0)]).unwrap()), 0.5).unwrap()
    }

    #[test]
    fn two_vertex_values() {
        let f = pair();
        assert!((f.value(&[1.0, 0.0]) - 0.5).abs() < 1e-15);
        assert!((f.value(&[1.0, 1.0]) - 0.5).abs() < 1e-15);
        assert_eq!(f.value(&[0.0, 0.0]), 0.0);
        let g = f.gradient(&[0.0, 0.0]);
        assert!((g[0] - 2f64.ln()).abs() < 1e-15 && (g[1] - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn flat_in_second_coordinate_at_half() {
        let f = pair();
        assert!(f.gradient(&[1.0, 1.0])[1] <= 1e-12);
        let g = f.gradient(&[1.0, 0.5]);
        assert!(g[1].abs() < 1e-12);
    }

    #[test]
    fn decreasing_for_large_p() {
        let f = RevenueInstance::new(pair().graph().clone(), 0.8).unwrap();
        assert!(f.gradient(&[1.0, 1.0])[1] < 0.0);
    }

    #[test]
    fn random_instance_checks() {
        let g = Arc::new(gen_random_graph(12, 0.4, (0.5, 1.5), 3).unwrap());
        let f = RevenueInstance::new(g, 0.3).unwrap();
        let mut rng = RngStream::new(1);
        assert!(dr_check(&f, 300, &mut rng).passed);
        let x: Vec<f64> = (0..12).map(|_| rng.uniform_in(0.1, 0.9)).collect();
        assert!(grad_check(&f, &x, 1e-5).unwrap() <= 1e-5);
        assert_eq!(f.value(&[0.0; 12]), 0.0);
    }

    #[test]
    fn aggregate_adds() {
        let g1 = Arc::new(gen_random_graph(6, 0.5, (0.0, 1.0), 1).unwrap());
        let g2 = Arc::new(gen_random_graph(6, 0.5, (0.0, 1.0), 2).unwrap());
        let a = RevenueInstance::new(g1, 0.2).unwrap();
        let b = RevenueInstance::new(g2, 0.2).unwrap();
        let s = RevenueInstance::aggregate(&[&a, &b]).unwrap();
        let x = [0.1, 0.9, 0.3, 0.5, 0.7, 0.2];
        assert!((s.value(&x) - a.value(&x) - b.value(&x)).abs() < 1e-12);
    }
}
