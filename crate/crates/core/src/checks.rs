//! Randomized correctness checks for objectives: the diminishing-returns
//! inequality, gradient antitonicity, finite-difference gradients, and the
//! structural inequalities every non-negative DR-submodular function obeys.

use crate::error::{check_dim, Error, Result};
use crate::function::DrFunction;
use crate::rng::RngStream;
use crate::vector;

/// Tolerance for DR-type inequalities.
pub const DR_TOL: f64 = 1e-8;

/// Pass threshold for [`grad_check`].
pub const GRAD_TOL: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrReport {
    pub trials: usize,
    /// Largest `[F(x+αe_i) − F(x)] − [F(y+αe_i) − F(y)]` over `y ≤ x`.
    pub max_return_violation: f64,
    /// Largest `∇F(x)_i − ∇F(y)_i` over `y ≤ x`.
    pub max_gradient_violation: f64,
    pub passed: bool,
}

fn random_point(n: usize, rng: &mut RngStream) -> Vec<f64> {
    (0..n).map(|_| rng.uniform()).collect()
}

/// Random pair `y ≤ x` in the cube.
fn ordered_pair(n: usize, rng: &mut RngStream) -> (Vec<f64>, Vec<f64>) {
    let x = random_point(n, rng);
    let y = x.iter().map(|v| v * rng.uniform()).collect();
    (x, y)
}

pub fn dr_check(f: &dyn DrFunction, trials: usize, rng: &mut RngStream) -> DrReport {
    let n = f.dim();
    let mut ret = 0.0_f64;
    let mut grad = 0.0_f64;
    for _ in 0..trials {
        let (x, y) = ordered_pair(n, rng);
        let i = rng.index(n);
        let alpha = (1.0 - x[i]) * rng.uniform();
        let mut xa = x.clone();
        xa[i] += alpha;
        let mut ya = y.clone();
        ya[i] += alpha;
        let gain_x = f.value(&xa) - f.value(&x);
        let gain_y = f.value(&ya) - f.value(&y);
        ret = ret.max(gain_x - gain_y);

        let gx = f.gradient(&x);
        let gy = f.gradient(&y);
        for (a, b) in gx.iter().zip(&gy) {
            grad = grad.max(a - b);
        }
    }
    DrReport {
        trials,
        max_return_violation: ret,
        max_gradient_violation: grad,
        passed: ret <= DR_TOL && grad <= DR_TOL,
    }
}

/// Largest central-difference error relative to `max(1, |∂_i F|)`.
pub fn grad_check(f: &dyn DrFunction, x: &[f64], h: f64) -> Result<f64> {
    check_dim(f.dim(), x.len())?;
    if !(1e-6..=1e-3).contains(&h) {
        return Err(Error::InvalidArgument(format!(
            "finite-difference step {h} outside [1e-6, 1e-3]"
        )));
    }
    if x.iter().any(|&v| v - h < 0.0 || v + h > 1.0) {
        return Err(Error::InvalidArgument(
            "finite differences need an interior point".into(),
        ));
    }
    let g = f.gradient(x);
    let mut worst = 0.0_f64;
    let mut probe = x.to_vec();
    for i in 0..x.len() {
        probe[i] = x[i] + h;
        let up = f.value(&probe);
        probe[i] = x[i] - h;
        let down = f.value(&probe);
        probe[i] = x[i];
        let fd = (up - down) / (2.0 * h);
        worst = worst.max((fd - g[i]).abs() / g[i].abs().max(1.0));
    }
    Ok(worst)
}

/// `F(x) ≤ F(y) + ⟨∇F(y), x − y⟩` for `x ≥ y`; returns the largest excess.
pub fn concavity_violation(f: &dyn DrFunction, trials: usize, rng: &mut RngStream) -> f64 {
    let n = f.dim();
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..trials {
        let (x, y) = ordered_pair(n, rng);
        let lin = f.value(&y) + vector::dot(&f.gradient(&y), &vector::sub(&x, &y));
        worst = worst.max(f.value(&x) - lin);
    }
    worst
}

/// `⟨∇F(x), y − x⟩ ≥ F(x∨y) + F(x∧y) − 2F(x)`; returns the largest excess of
/// the right side over the left.
pub fn join_meet_violation(f: &dyn DrFunction, trials: usize, rng: &mut RngStream) -> f64 {
    let n = f.dim();
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..trials {
        let x = random_point(n, rng);
        let y = random_point(n, rng);
        let lhs = vector::dot(&f.gradient(&x), &vector::sub(&y, &x));
        let rhs = f.value(&vector::join(&x, &y)) + f.value(&vector::meet(&x, &y)) - 2.0 * f.value(&x);
        worst = worst.max(rhs - lhs);
    }
    worst
}

/// `F(x ∨ y) ≥ (1 − ‖x‖_∞) F(y)`; returns the largest shortfall.
pub fn join_lower_bound_violation(f: &dyn DrFunction, trials: usize, rng: &mut RngStream) -> f64 {
    let n = f.dim();
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..trials {
        // vary the sup-norm of x over the whole range
        let s = rng.uniform();
        let x: Vec<f64> = (0..n).map(|_| s * rng.uniform()).collect();
        let y = random_point(n, rng);
        let bound = (1.0 - vector::norm_inf(&x)) * f.value(&y);
        worst = worst.max(bound - f.value(&vector::join(&x, &y)));
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::LinearFunction;

    struct NormSquared(usize);
    impl DrFunction for NormSquared {
        fn dim(&self) -> usize {
            self.0
        }
        fn value(&self, x: &[f64]) -> f64 {
            vector::dot(x, x)
        }
        fn gradient(&self, x: &[f64]) -> Vec<f64> {
            vector::scale(x, 2.0)
        }
    }

    #[test]
    fn linear_passes_with_zero_violation() {
        let f = LinearFunction::new(vec![1.0, -0.5, 2.0]);
        let r = dr_check(&f, 500, &mut RngStream::new(1));
        assert!(r.passed);
        assert!(r.max_return_violation.abs() < 1e-14);
        assert_eq!(r.max_gradient_violation, 0.0);
        assert!(grad_check(&f, &[0.5; 3], 1e-4).unwrap() < 1e-9);
    }

    #[test]
    fn convex_square_fails() {
        let f = NormSquared(3);
        let r = dr_check(&f, 200, &mut RngStream::new(2));
        assert!(!r.passed);
        assert!(r.max_return_violation > 0.0 && r.max_gradient_violation > 0.0);
        // explicit witness: y = 0, x = (0.5,0,0), i = 0, α = 0.5
        let gain_x = f.value(&[1.0, 0.0, 0.0]) - f.value(&[0.5, 0.0, 0.0]);
        let gain_y = f.value(&[0.5, 0.0, 0.0]) - f.value(&[0.0; 3]);
        assert!((gain_x - gain_y - 0.5).abs() < 1e-15);
    }

    #[test]
    fn grad_check_rejects_bad_step() {
        let f = LinearFunction::new(vec![1.0]);
        assert!(grad_check(&f, &[0.5], 0.1).is_err());
        assert!(grad_check(&f, &[0.0], 1e-4).is_err());
    }
}
