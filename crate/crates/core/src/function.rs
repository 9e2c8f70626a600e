//! Objective interface for non-negative DR-submodular functions on `[0,1]^n`.

use std::sync::Arc;

use crate::rng::RngStream;
use crate::vector;

/// Regularity constants: gradient-norm bound `G`, smoothness `β`, and the
/// standard deviation `σ` of the stochastic gradient.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SmoothnessParams {
    pub lipschitz: f64,
    pub smoothness: f64,
    pub noise: f64,
}

pub trait DrFunction: Send + Sync {
    fn dim(&self) -> usize;

    /// `F(x) ≥ 0` for `x ∈ [0,1]^n`.
    fn value(&self, x: &[f64]) -> f64;

    fn gradient(&self, x: &[f64]) -> Vec<f64>;

    /// Unbiased estimate of `∇F(x)`. Exact unless overridden.
    fn stochastic_gradient(&self, x: &[f64], rng: &mut RngStream) -> Vec<f64> {
        let _ = rng;
        self.gradient(x)
    }

    /// Declared constants, when the instance knows them.
    fn params(&self) -> Option<SmoothnessParams> {
        None
    }
}

impl<F: DrFunction + ?Sized> DrFunction for Arc<F> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (**self).gradient(x)
    }
    fn stochastic_gradient(&self, x: &[f64], rng: &mut RngStream) -> Vec<f64> {
        (**self).stochastic_gradient(x, rng)
    }
    fn params(&self) -> Option<SmoothnessParams> {
        (**self).params()
    }
}

impl<F: DrFunction + ?Sized> DrFunction for &F {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (**self).gradient(x)
    }
    fn stochastic_gradient(&self, x: &[f64], rng: &mut RngStream) -> Vec<f64> {
        (**self).stochastic_gradient(x, rng)
    }
    fn params(&self) -> Option<SmoothnessParams> {
        (**self).params()
    }
}

/// `F(x) = ⟨w, x⟩ + offset`, with the offset chosen so that `F ≥ 0` on the
/// cube. Modular, hence DR-submodular with equality in every diminishing
/// returns inequality.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFunction {
    weights: Vec<f64>,
    offset: f64,
}

impl LinearFunction {
    pub fn new(weights: Vec<f64>) -> Self {
        let offset = weights.iter().map(|w| (-w).max(0.0)).sum();
        Self { weights, offset }
    }

    pub fn with_offset(weights: Vec<f64>, offset: f64) -> Self {
        Self { weights, offset }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }
}

impl DrFunction for LinearFunction {
    fn dim(&self) -> usize {
        self.weights.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        vector::dot(&self.weights, x) + self.offset
    }

    fn gradient(&self, _x: &[f64]) -> Vec<f64> {
        self.weights.clone()
    }

    fn params(&self) -> Option<SmoothnessParams> {
        Some(SmoothnessParams {
            lipschitz: vector::norm(&self.weights),
            smoothness: 0.0,
            noise: 0.0,
        })
    }
}

/// Empirical constants: `1.1 ×` the largest sampled gradient norm, gradient
/// difference quotient, and stochastic-gradient deviation.
pub fn estimate_params(f: &dyn DrFunction, samples: usize, rng: &mut RngStream) -> SmoothnessParams {
    let n = f.dim();
    let mut g_max = 0.0_f64;
    let mut beta = 0.0_f64;
    let mut noise_sq = 0.0_f64;
    for _ in 0..samples.max(1) {
        let x: Vec<f64> = (0..n).map(|_| rng.uniform()).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.uniform()).collect();
        let gx = f.gradient(&x);
        let gy = f.gradient(&y);
        g_max = g_max.max(vector::norm(&gx)).max(vector::norm(&gy));
        let d = vector::dist(&x, &y);
        if d > 1e-12 {
            beta = beta.max(vector::dist(&gx, &gy) / d);
        }
        let sg = f.stochastic_gradient(&x, rng);
        noise_sq += vector::dist(&sg, &gx).powi(2);
    }
    let est = SmoothnessParams {
        lipschitz: 1.1 * g_max,
        smoothness: 1.1 * beta,
        noise: 1.1 * (noise_sq / samples.max(1) as f64).sqrt(),
    };
    log::info!(
        "estimated constants from {samples} samples: G={:.4e} beta={:.4e} sigma={:.4e}",
        est.lipschitz,
        est.smoothness,
        est.noise
    );
    est
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_offset_keeps_nonnegative() {
        let f = LinearFunction::new(vec![2.0, -3.0]);
        assert_eq!(f.value(&[0.0, 1.0]), 0.0);
        assert_eq!(f.value(&[1.0, 0.0]), 5.0);
    }

    #[test]
    fn estimate_on_linear() {
        let f = LinearFunction::new(vec![3.0, 4.0]);
        let p = estimate_params(&f, 20, &mut RngStream::new(1));
        assert!((p.lipschitz - 5.5).abs() < 1e-12);
        assert_eq!(p.smoothness, 0.0);
        assert_eq!(p.noise, 0.0);
    }
}
