use std::sync::Arc;

use drsub_core::function::{DrFunction, LinearFunction};
use drsub_core::instances::{
    gen_random_graph, load_edge_list, BatchSampler, Graph, NoisyGradient, Objective, QuadraticInstance,
};
use drsub_core::RngStream;

use crate::config::{ExperimentConfig, GraphSpec, InstanceSpec};
use crate::error::BenchResult;

/// The per-round objectives of one replica.
pub struct FunctionStream {
    /// Exact objectives, used for rewards and the comparator.
    pub exact: Vec<Objective>,
    /// What the learner sees: the exact objective, or a noisy-gradient
    /// wrapper when `σ > 0`.
    pub revealed: Vec<Arc<dyn DrFunction>>,
    pub dim: usize,
    /// Largest declared gradient-norm bound over the stream, at least 1e-9.
    pub gradient_bound: f64,
}

impl FunctionStream {
    /// Sum of all exact objectives.
    pub fn aggregate(&self) -> BenchResult<Objective> {
        let refs: Vec<&Objective> = self.exact.iter().collect();
        Ok(Objective::aggregate(&refs)?)
    }
}

pub fn load_graph(spec: &GraphSpec) -> BenchResult<Graph> {
    Ok(match &spec.path {
        Some(path) => load_edge_list(path)?,
        None => gen_random_graph(
            spec.vertices,
            spec.edge_prob,
            (spec.weight_min, spec.weight_max),
            spec.seed,
        )?,
    })
}

pub fn build_stream(cfg: &ExperimentConfig, rng: RngStream) -> BenchResult<FunctionStream> {
    let mut rng = rng;
    let t = cfg.horizon;
    let exact: Vec<Objective> = match &cfg.instance {
        InstanceSpec::Revenue { graph, p, batch, .. } => {
            let g = Arc::new(load_graph(graph)?);
            let mut sampler = BatchSampler::new(g, *batch, *p, rng.fork(1))?;
            (0..t)
                .map(|_| Ok(Objective::Revenue(sampler.sample()?)))
                .collect::<BenchResult<_>>()?
        }
        InstanceSpec::Quadratic {
            n,
            jitter,
            instance_seed,
        } => {
            let base = QuadraticInstance::random(*n, &mut RngStream::new(*instance_seed))?;
            (0..t)
                .map(|_| Ok(Objective::Quadratic(base.jittered(*jitter, &mut rng)?)))
                .collect::<BenchResult<_>>()?
        }
        InstanceSpec::Linear { weights } => {
            vec![Objective::Linear(LinearFunction::new(weights.clone())); t]
        }
        InstanceSpec::Zero { n } => {
            vec![Objective::Linear(LinearFunction::with_offset(vec![0.0; *n], 0.0)); t]
        }
    };
    let dim = exact.first().map_or(0, |f| f.dim());
    let gradient_bound = exact
        .iter()
        .filter_map(|f| f.params())
        .map(|p| p.lipschitz)
        .fold(1e-9, f64::max);
    let revealed = exact
        .iter()
        .map(|f| -> Arc<dyn DrFunction> {
            if cfg.sigma > 0.0 {
                Arc::new(NoisyGradient::new(f.clone(), cfg.sigma))
            } else {
                Arc::new(f.clone())
            }
        })
        .collect();
    Ok(FunctionStream {
        exact,
        revealed,
        dim,
        gradient_bound,
    })
}
