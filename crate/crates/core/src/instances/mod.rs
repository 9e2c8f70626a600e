//! Objectives and data: revenue maximization on graphs, quadratic test
//! functions, batch sampling and gradient noise.

mod graph;
mod noise;
mod quadratic;
mod revenue;
mod sampler;

pub use graph::{gen_random_graph, load_edge_list, parse_edge_list, Graph};
pub use noise::NoisyGradient;
pub use quadratic::QuadraticInstance;
pub use revenue::RevenueInstance;
pub use sampler::BatchSampler;

use crate::error::{Error, Result};
use crate::function::{DrFunction, LinearFunction, SmoothnessParams};

/// The objective families that can be summed into one function of the
/// same family.
#[derive(Debug, Clone)]
pub enum Objective {
    Revenue(RevenueInstance),
    Quadratic(QuadraticInstance),
    Linear(LinearFunction),
}

impl Objective {
    pub fn aggregate(parts: &[&Objective]) -> Result<Objective> {
        let mismatch = || Error::InvalidArgument("cannot aggregate objectives of different kinds".into());
        match parts.first() {
            None => Err(Error::InvalidArgument("nothing to aggregate".into())),
            Some(Objective::Revenue(_)) => {
                let rs = parts
                    .iter()
                    .map(|o| match o {
                        Objective::Revenue(r) => Ok(r),
                        _ => Err(mismatch()),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Objective::Revenue(RevenueInstance::aggregate(&rs)?))
            }
            Some(Objective::Quadratic(_)) => {
                let qs = parts
                    .iter()
                    .map(|o| match o {
                        Objective::Quadratic(q) => Ok(q),
                        _ => Err(mismatch()),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Objective::Quadratic(QuadraticInstance::aggregate(&qs)?))
            }
            Some(Objective::Linear(first)) => {
                let n = first.weights().len();
                let mut w = vec![0.0; n];
                let mut offset = 0.0;
                for o in parts {
                    let Objective::Linear(l) = o else { return Err(mismatch()) };
                    crate::error::check_dim(n, l.weights().len())?;
                    crate::vector::axpy(1.0, l.weights(), &mut w);
                    offset += l.offset();
                }
                Ok(Objective::Linear(LinearFunction::with_offset(w, offset)))
            }
        }
    }

    fn inner(&self) -> &dyn DrFunction {
        match self {
            Objective::Revenue(f) => f,
            Objective::Quadratic(f) => f,
            Objective::Linear(f) => f,
        }
    }
}

impl DrFunction for Objective {
    fn dim(&self) -> usize {
        self.inner().dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.inner().value(x)
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.inner().gradient(x)
    }
    fn params(&self) -> Option<SmoothnessParams> {
        self.inner().params()
    }
}
