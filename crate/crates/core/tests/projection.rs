//! Polytope projection against an active-set enumeration of the KKT system.

use nalgebra::{DMatrix, DVector};

use drsub_core::{vector, ConvexBody, RngStream};

/// Constraints `a·x ≤ b`, including the unit-box bounds.
fn all_constraints(rows: &[Vec<f64>], rhs: &[f64], n: usize) -> Vec<(Vec<f64>, f64)> {
    let mut out: Vec<(Vec<f64>, f64)> = rows.iter().cloned().zip(rhs.iter().copied()).collect();
    for i in 0..n {
        out.push((vector::scale(&vector::basis(n, i), -1.0), 0.0));
        out.push((vector::basis(n, i), 1.0));
    }
    out
}

fn subsets(k: usize, max: usize) -> Vec<Vec<usize>> {
    (0u32..1 << k)
        .filter(|m| m.count_ones() as usize <= max)
        .map(|m| (0..k).filter(|i| m >> i & 1 == 1).collect())
        .collect()
}

fn kkt_projection(y: &[f64], cons: &[(Vec<f64>, f64)]) -> Vec<f64> {
    let n = y.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for active in subsets(cons.len(), n) {
        let k = active.len();
        let mut m = DMatrix::zeros(n + k, n + k);
        let mut rhs = DVector::zeros(n + k);
        for i in 0..n {
            m[(i, i)] = 1.0;
            rhs[i] = y[i];
        }
        for (r, &c) in active.iter().enumerate() {
            for i in 0..n {
                m[(i, n + r)] = cons[c].0[i];
                m[(n + r, i)] = cons[c].0[i];
            }
            rhs[n + r] = cons[c].1;
        }
        let Some(sol) = m.lu().solve(&rhs) else { continue };
        let x: Vec<f64> = (0..n).map(|i| sol[i]).collect();
        let multipliers_ok = (0..k).all(|r| sol[n + r] >= -1e-10);
        let feasible = cons.iter().all(|(a, b)| vector::dot(a, &x) <= b + 1e-10);
        if multipliers_ok && feasible {
            let d = vector::dist(&x, y);
            if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                best = Some((d, x));
            }
        }
    }
    best.expect("a KKT point exists").1
}

#[test]
fn polytope_projection_matches_kkt() {
    let mut rng = RngStream::new(17);
    let n = 3;
    for _ in 0..40 {
        let rows: Vec<Vec<f64>> = (0..2).map(|_| (0..n).map(|_| rng.uniform_in(-1.0, 2.0)).collect()).collect();
        let rhs: Vec<f64> = (0..2).map(|_| rng.uniform_in(0.2, 1.5)).collect();
        let body = ConvexBody::polytope(rows.clone(), rhs.clone()).unwrap();
        let y: Vec<f64> = (0..n).map(|_| rng.uniform_in(-0.5, 1.5)).collect();
        let got = body.project(&y).unwrap();
        let want = kkt_projection(&y, &all_constraints(&rows, &rhs, n));
        assert!(vector::dist(&got, &want) <= 1e-6, "{got:?} vs {want:?}; y {y:?} rows {rows:?} rhs {rhs:?} d {} {}", vector::dist(&got, &y), vector::dist(&want, &y));
    }
}

#[test]
fn budget_projection_matches_kkt() {
    let mut rng = RngStream::new(5);
    let n = 4;
    for _ in 0..40 {
        let budget = rng.uniform_in(0.3, 3.0);
        let body = ConvexBody::uniform_budget(n, budget).unwrap();
        let y: Vec<f64> = (0..n).map(|_| rng.uniform_in(-0.5, 1.5)).collect();
        let got = body.project(&y).unwrap();
        let want = kkt_projection(&y, &all_constraints(&[vec![1.0; n]], &[budget], n));
        assert!(vector::dist(&got, &want) <= 1e-9, "{got:?} vs {want:?}");
    }
}
