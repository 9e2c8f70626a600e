use std::sync::Arc;

use rand::seq::index;

use crate::error::{Error, Result};
use crate::rng::RngStream;

use super::graph::Graph;
use super::revenue::RevenueInstance;

/// Draws each round's revenue function from a uniform `k`-subset of the
/// vertices, keeping the weights of edges inside the subset.
#[derive(Debug, Clone)]
pub struct BatchSampler {
    graph: Arc<Graph>,
    k: usize,
    p: f64,
    rng: RngStream,
}

impl BatchSampler {
    pub fn new(graph: Arc<Graph>, k: usize, p: f64, rng: RngStream) -> Result<Self> {
        if k > graph.vertex_count() {
            return Err(Error::InvalidArgument(format!(
                "batch of {k} from {} vertices",
                graph.vertex_count()
            )));
        }
        RevenueInstance::new(graph.clone(), p)?;
        Ok(Self { graph, k, p, rng })
    }

    pub fn graph(&self) -> &Arc<Graph> {
        &self.graph
    }

    pub fn batch_size(&self) -> usize {
        self.k
    }

    pub fn sample_vertices(&mut self) -> Vec<bool> {
        let n = self.graph.vertex_count();
        let mut keep = vec![false; n];
        for v in index::sample(&mut self.rng, n, self.k) {
            keep[v] = true;
        }
        keep
    }

    pub fn sample(&mut self) -> Result<RevenueInstance> {
        let keep = self.sample_vertices();
        RevenueInstance::new(Arc::new(self.graph.induced(&keep)), self.p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checks::dr_check;
    use crate::function::DrFunction;
    use crate::instances::gen_random_graph;

    #[test]
    fn full_and_empty_batches() {
        let g = Arc::new(gen_random_graph(10, 0.5, (1.0, 1.0), 1).unwrap());
        let full = RevenueInstance::new(g.clone(), 0.1).unwrap();
        let x: Vec<f64> = (0..10).map(|i| i as f64 / 10.0).collect();
        let mut all = BatchSampler::new(g.clone(), 10, 0.1, RngStream::new(1)).unwrap();
        assert!((all.sample().unwrap().value(&x) - full.value(&x)).abs() < 1e-12);
        let mut none = BatchSampler::new(g, 0, 0.1, RngStream::new(1)).unwrap();
        assert_eq!(none.sample().unwrap().value(&x), 0.0);
    }

    #[test]
    fn batches_are_dr_and_sized() {
        let g = Arc::new(gen_random_graph(30, 0.3, (0.5, 2.0), 2).unwrap());
        let mut s = BatchSampler::new(g, 8, 0.05, RngStream::new(3)).unwrap();
        let mut rng = RngStream::new(4);
        for _ in 0..5 {
            assert_eq!(s.sample_vertices().iter().filter(|b| **b).count(), 8);
            let f = s.sample().unwrap();
            assert!(dr_check(&f, 100, &mut rng).passed);
        }
    }

    #[test]
    fn oversized_batch_rejected() {
        let g = Arc::new(gen_random_graph(3, 1.0, (1.0, 1.0), 1).unwrap());
        assert!(BatchSampler::new(g, 4, 0.1, RngStream::new(1)).is_err());
    }
}
