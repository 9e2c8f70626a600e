use crate::error::{Error, Result};
use crate::function::{DrFunction, SmoothnessParams};
use crate::rng::RngStream;

const EXACT_OFFSET_DIM: usize = 20;

/// `F(x) = ½ xᵀHx + hᵀx + c` with `H ≤ 0` entrywise and `h ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticInstance {
    h_mat: Vec<Vec<f64>>,
    h_vec: Vec<f64>,
    offset: f64,
}

impl QuadraticInstance {
    /// Picks the smallest offset keeping `F ≥ 0` on the cube. The minimum of
    /// such an `F` over `[0,1]^n` sits at a vertex, so it is exact up to 20
    /// coordinates and falls back to the bound `−½ ΣH` beyond.
    pub fn new(h_mat: Vec<Vec<f64>>, h_vec: Vec<f64>) -> Result<Self> {
        let mut inst = Self::with_offset(h_mat, h_vec, 0.0)?;
        inst.offset = (-inst.min_over_cube()).max(0.0);
        Ok(inst)
    }

    pub fn with_offset(h_mat: Vec<Vec<f64>>, h_vec: Vec<f64>, offset: f64) -> Result<Self> {
        let n = h_vec.len();
        if h_mat.len() != n || h_mat.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument("Hessian must be n×n".into()));
        }
        for i in 0..n {
            for j in 0..n {
                if h_mat[i][j] > 0.0 || (h_mat[i][j] - h_mat[j][i]).abs() > 1e-12 {
                    return Err(Error::InvalidArgument(
                        "Hessian must be symmetric with non-positive entries".into(),
                    ));
                }
            }
        }
        if h_vec.iter().any(|v| *v < 0.0) || !(offset >= 0.0) {
            return Err(Error::InvalidArgument("linear term and offset must be >= 0".into()));
        }
        Ok(Self {
            h_mat,
            h_vec,
            offset,
        })
    }

    /// `H_ij ~ −Uniform[0,1]` symmetric, `h = −θ·H·1` with `θ = ½`, so the
    /// stationary region sits inside the cube.
    pub fn random(n: usize, rng: &mut RngStream) -> Result<Self> {
        let mut h_mat = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i..n {
                let v = -rng.uniform();
                h_mat[i][j] = v;
                h_mat[j][i] = v;
            }
        }
        let h_vec = h_mat.iter().map(|r| -0.5 * r.iter().sum::<f64>()).collect();
        Self::new(h_mat, h_vec)
    }

    /// A perturbed copy: every `H` entry and `h` coordinate is scaled by an
    /// independent factor in `[1 − s, 1 + s]`.
    pub fn jittered(&self, scale: f64, rng: &mut RngStream) -> Result<Self> {
        let s = scale.clamp(0.0, 1.0);
        let n = self.h_vec.len();
        let mut h_mat = self.h_mat.clone();
        for i in 0..n {
            for j in i..n {
                let v = self.h_mat[i][j] * rng.uniform_in(1.0 - s, 1.0 + s);
                h_mat[i][j] = v;
                h_mat[j][i] = v;
            }
        }
        let h_vec = self.h_vec.iter().map(|v| v * rng.uniform_in(1.0 - s, 1.0 + s)).collect();
        Self::new(h_mat, h_vec)
    }

    pub fn aggregate(parts: &[&QuadraticInstance]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidArgument("nothing to aggregate".into()))?;
        let n = first.h_vec.len();
        let mut h_mat = vec![vec![0.0; n]; n];
        let mut h_vec = vec![0.0; n];
        let mut offset = 0.0;
        for p in parts {
            if p.h_vec.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: p.h_vec.len() });
            }
            for i in 0..n {
                h_vec[i] += p.h_vec[i];
                for j in 0..n {
                    h_mat[i][j] += p.h_mat[i][j];
                }
            }
            offset += p.offset;
        }
        Self::with_offset(h_mat, h_vec, offset)
    }

    pub fn hessian(&self) -> &[Vec<f64>] {
        &self.h_mat
    }

    pub fn linear(&self) -> &[f64] {
        &self.h_vec
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    fn raw(&self, x: &[f64]) -> f64 {
        let quad: f64 = self
            .h_mat
            .iter()
            .zip(x)
            .map(|(row, xi)| xi * row.iter().zip(x).map(|(h, xj)| h * xj).sum::<f64>())
            .sum();
        0.5 * quad + self.h_vec.iter().zip(x).map(|(h, xi)| h * xi).sum::<f64>()
    }

    fn min_over_cube(&self) -> f64 {
        let n = self.h_vec.len();
        if n > EXACT_OFFSET_DIM {
            return 0.5 * self.h_mat.iter().flatten().sum::<f64>();
        }
        (0u32..1 << n)
            .map(|mask| {
                let x: Vec<f64> = (0..n).map(|i| (mask >> i & 1) as f64).collect();
                self.raw(&x)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

impl DrFunction for QuadraticInstance {
    fn dim(&self) -> usize {
        self.h_vec.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.raw(x) + self.offset
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.h_mat
            .iter()
            .zip(&self.h_vec)
            .map(|(row, h)| h + row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>())
            .collect()
    }

    fn params(&self) -> Option<SmoothnessParams> {
        let frob = self.h_mat.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
        let lin = self.h_vec.iter().map(|v| v * v).sum::<f64>().sqrt();
        Some(SmoothnessParams {
            lipschitz: frob * (self.dim() as f64).sqrt() + lin,
            smoothness: frob,
            noise: 0.0,
        })
    }
}
