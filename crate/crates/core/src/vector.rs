//! Dense vector helpers over `[f64]`.
//!
//! Iterates live in `[0,1]^n` and are represented as plain `Vec<f64>`; the
//! lattice operations `∨` (coordinate-wise max) and `∧` (coordinate-wise min)
//! are [`join`] and [`meet`].

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Coordinate-wise maximum `a ∨ b`.
pub fn join(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x.max(*y)).collect()
}

/// Coordinate-wise minimum `a ∧ b`.
pub fn meet(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x.min(*y)).collect()
}

/// Element-wise product `a ∘ b`.
pub fn hadamard(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Standard basis vector `e_i` in dimension `n`.
pub fn basis(n: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[i] = 1.0;
    e
}

pub fn is_finite(a: &[f64]) -> bool {
    a.iter().all(|x| x.is_finite())
}

pub fn in_unit_cube(a: &[f64], tol: f64) -> bool {
    a.iter().all(|&x| x >= -tol && x <= 1.0 + tol)
}

/// `a ≤ b` coordinate-wise, up to `tol`.
pub fn leq(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| *x <= *y + tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn join_meet_identity() {
        let a = [0.2, 0.9, 0.5];
        let b = [0.4, 0.1, 0.5];
        let s = add(&join(&a, &b), &meet(&a, &b));
        assert_eq!(s, add(&a, &b));
        assert_eq!(norm_inf(&[-0.3, 0.2]), 0.3);
    }
}
