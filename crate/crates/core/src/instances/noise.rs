use rand_distr::{Distribution, Normal};

use crate::function::{DrFunction, SmoothnessParams};
use crate::rng::RngStream;

/// Adds zero-mean Gaussian noise of total variance `σ²` (per coordinate
/// `σ²/n`) to the exact gradient.
#[derive(Debug, Clone)]
pub struct NoisyGradient<F> {
    inner: F,
    sigma: f64,
}

impl<F: DrFunction> NoisyGradient<F> {
    pub fn new(inner: F, sigma: f64) -> Self {
        Self {
            inner,
            sigma: sigma.max(0.0),
        }
    }

    pub fn inner(&self) -> &F {
        &self.inner
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

impl<F: DrFunction> DrFunction for NoisyGradient<F> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.inner.value(x)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.inner.gradient(x)
    }

    fn stochastic_gradient(&self, x: &[f64], rng: &mut RngStream) -> Vec<f64> {
        let mut g = self.inner.gradient(x);
        if self.sigma > 0.0 {
            let sd = self.sigma / (g.len().max(1) as f64).sqrt();
            let normal = Normal::new(0.0, sd).expect("finite positive deviation");
            for v in g.iter_mut() {
                *v += normal.sample(rng);
            }
        }
        g
    }

    fn params(&self) -> Option<SmoothnessParams> {
        self.inner.params().map(|p| SmoothnessParams {
            noise: self.sigma,
            ..p
        })
    }
}
