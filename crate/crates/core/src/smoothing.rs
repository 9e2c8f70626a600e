use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::function::DrFunction;
use crate::rng::RngStream;
use crate::vector;

fn unit_sphere(n: usize, rng: &mut RngStream) -> Vec<f64> {
    loop {
        let g: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        let r = vector::norm(&g);
        if r > 1e-12 {
            return vector::scale(&g, 1.0 / r);
        }
    }
}

fn unit_ball(n: usize, rng: &mut RngStream) -> Vec<f64> {
    let u = unit_sphere(n, rng);
    let radius = rng.uniform().powf(1.0 / n as f64);
    vector::scale(&u, radius)
}

/// Monte-Carlo estimates of `F̂_δ(x) = E_{r∼B}[F(x + δr)]` and its gradient.
///
/// Draws are antithetic pairs: the value uses `r` and `−r` from the unit
/// ball, the gradient uses the symmetric sphere estimator
/// `(n / 2δ)(F(x + δu) − F(x − δu)) u`, which is unbiased for `∇F̂_δ`.
/// `samples` counts pairs.
pub fn smoothed_value_and_gradient(
    f: &dyn DrFunction,
    x: &[f64],
    delta: f64,
    samples: usize,
    rng: &mut RngStream,
) -> Result<(f64, Vec<f64>)> {
    let n = f.dim();
    crate::error::check_dim(n, x.len())?;
    if !(delta > 0.0) || samples == 0 {
        return Err(Error::InvalidArgument(
            "smoothing needs delta > 0 and at least one sample".into(),
        ));
    }
    if x.iter().any(|&v| v < delta - 1e-15 || v > 1.0 - delta + 1e-15) {
        return Err(Error::InvalidArgument(format!(
            "point must lie in [delta, 1 - delta]^n for delta = {delta}"
        )));
    }
    let mut value = 0.0;
    let mut grad = vec![0.0; n];
    let mut plus = vec![0.0; n];
    let mut minus = vec![0.0; n];
    for _ in 0..samples {
        let r = unit_ball(n, rng);
        for i in 0..n {
            plus[i] = x[i] + delta * r[i];
            minus[i] = x[i] - delta * r[i];
        }
        value += 0.5 * (f.value(&plus) + f.value(&minus));

        let u = unit_sphere(n, rng);
        for i in 0..n {
            plus[i] = x[i] + delta * u[i];
            minus[i] = x[i] - delta * u[i];
        }
        let diff = (f.value(&plus) - f.value(&minus)) * n as f64 / (2.0 * delta);
        vector::axpy(diff, &u, &mut grad);
    }
    let inv = 1.0 / samples as f64;
    Ok((value * inv, vector::scale(&grad, inv)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::LinearFunction;

    struct Constant(f64, usize);
    impl DrFunction for Constant {
        fn dim(&self) -> usize {
            self.1
        }
        fn value(&self, _: &[f64]) -> f64 {
            self.0
        }
        fn gradient(&self, _: &[f64]) -> Vec<f64> {
            vec![0.0; self.1]
        }
    }

    #[test]
    fn linear_value_is_exact() {
        let f = LinearFunction::new(vec![1.0, -2.0, 0.5]);
        let x = [0.3, 0.5, 0.7];
        let (v, g) = smoothed_value_and_gradient(&f, &x, 0.1, 2000, &mut RngStream::new(3)).unwrap();
        assert!((v - f.value(&x)).abs() < 1e-12);
        for (gi, wi) in g.iter().zip(f.weights()) {
            assert!((gi - wi).abs() < 0.15, "{gi} vs {wi}");
        }
    }

    #[test]
    fn constant_gradient_vanishes() {
        let f = Constant(2.0, 3);
        let (v, g) = smoothed_value_and_gradient(&f, &[0.5; 3], 0.01, 100, &mut RngStream::new(4)).unwrap();
        assert_eq!(v, 2.0);
        assert!(g.iter().all(|x| *x == 0.0));
    }

    #[test]
    fn delta_from_horizon() {
        let t = 10_000.0_f64;
        assert!((1.0 / t.sqrt() - 0.01).abs() < 1e-15);
    }

    #[test]
    fn boundary_rejected() {
        let f = Constant(1.0, 2);
        assert!(smoothed_value_and_gradient(&f, &[0.05, 0.5], 0.1, 1, &mut RngStream::new(0)).is_err());
    }
}
