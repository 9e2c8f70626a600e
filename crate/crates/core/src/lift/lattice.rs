use crate::error::{check_dim, Error, Result};

const SNAP_SLACK: f64 = 1e-9;

/// The lattice `{0, 1/M, …, 1}^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnaryLattice {
    n: usize,
    m: usize,
}

impl UnaryLattice {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::InvalidArgument(
                "lattice needs n >= 1 and M >= 1".into(),
            ));
        }
        Ok(Self { n, m })
    }

    /// `M = ⌈(T/n)^{1/4}⌉`, at least 1.
    pub fn default_granularity(horizon: usize, n: usize) -> usize {
        let m = (horizon as f64 / n.max(1) as f64).powf(0.25).ceil();
        (m as usize).max(1)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn granularity(&self) -> usize {
        self.m
    }

    pub fn lifted_dim(&self) -> usize {
        self.n * self.m
    }

    /// Rounds every coordinate down to the lattice.
    pub fn snap(&self, c: &[f64]) -> Vec<f64> {
        let m = self.m as f64;
        c.iter()
            .map(|v| ((v.clamp(0.0, 1.0) * m + SNAP_SLACK).floor().min(m)) / m)
            .collect()
    }

    fn level(&self, v: f64) -> Option<usize> {
        let scaled = v * self.m as f64;
        let l = scaled.round();
        ((scaled - l).abs() <= SNAP_SLACK && l >= 0.0 && l <= self.m as f64).then_some(l as usize)
    }

    /// The unary code: coordinate `ℓ/M` becomes the block `1^ℓ 0^{M−ℓ}`.
    pub fn lift(&self, x: &[f64]) -> Result<LiftedPoint> {
        check_dim(self.n, x.len())?;
        let levels = x
            .iter()
            .enumerate()
            .map(|(i, v)| {
                self.level(*v)
                    .ok_or_else(|| Error::OffLattice(format!("coordinate {i} = {v} with M = {}", self.m)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LiftedPoint { m: self.m, levels })
    }

    pub fn unlift(&self, p: &LiftedPoint) -> Result<Vec<f64>> {
        check_dim(self.n, p.levels.len())?;
        if p.m != self.m {
            return Err(Error::InvalidArgument("granularity mismatch".into()));
        }
        let m = self.m as f64;
        Ok(p.levels.iter().map(|l| *l as f64 / m).collect())
    }

    /// `ã_{i,j} = a_i / M`, so that `⟨a, c̄⟩ = ⟨ã, m(c̄)⟩` on lattice points.
    pub fn lift_reward(&self, a: &[f64]) -> Vec<f64> {
        let m = self.m as f64;
        a.iter()
            .flat_map(|v| std::iter::repeat_n(v / m, self.m))
            .collect()
    }
}

/// A staircase point of `{0,1}^{n×M}`, stored by its per-block levels so the
/// staircase property `bit_{i,j} ≥ bit_{i,j+1}` holds by construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LiftedPoint {
    m: usize,
    levels: Vec<usize>,
}

impl LiftedPoint {
    pub fn from_levels(m: usize, levels: Vec<usize>) -> Result<Self> {
        if let Some(block) = levels.iter().position(|l| *l > m) {
            return Err(Error::InvalidArgument(format!(
                "block {block} level exceeds M = {m}"
            )));
        }
        Ok(Self { m, levels })
    }

    /// Rejects bit vectors that are not a staircase in every block.
    pub fn from_bits(n: usize, m: usize, bits: &[bool]) -> Result<Self> {
        check_dim(n * m, bits.len())?;
        let mut levels = Vec::with_capacity(n);
        for (block, chunk) in bits.chunks(m).enumerate() {
            let l = chunk.iter().take_while(|b| **b).count();
            if chunk[l..].iter().any(|b| *b) {
                return Err(Error::Staircase { block });
            }
            levels.push(l);
        }
        Ok(Self { m, levels })
    }

    pub fn zeros(n: usize, m: usize) -> Self {
        Self {
            m,
            levels: vec![0; n],
        }
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    pub fn granularity(&self) -> usize {
        self.m
    }

    pub fn bits(&self) -> Vec<bool> {
        self.levels
            .iter()
            .flat_map(|l| (0..self.m).map(move |j| j < *l))
            .collect()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        self.levels
            .iter()
            .flat_map(|l| (0..self.m).map(move |j| if j < *l { 1.0 } else { 0.0 }))
            .collect()
    }

    /// Number of ones.
    pub fn weight(&self) -> usize {
        self.levels.iter().sum()
    }

    /// Bitwise OR, which on staircases is the per-block max level.
    pub fn join(&self, other: &LiftedPoint) -> LiftedPoint {
        LiftedPoint {
            m: self.m,
            levels: self
                .levels
                .iter()
                .zip(&other.levels)
                .map(|(a, b)| *a.max(b))
                .collect(),
        }
    }

    pub fn dot(&self, w: &[f64]) -> f64 {
        self.levels
            .iter()
            .enumerate()
            .map(|(i, l)| w[i * self.m..i * self.m + l].iter().sum::<f64>())
            .sum()
    }
}

/// Checks `y_{i,j} ≥ y_{i,j+1}` within `tol` on a relaxed lifted vector.
pub fn is_staircase(y: &[f64], m: usize, tol: f64) -> bool {
    y.chunks(m)
        .all(|block| block.windows(2).all(|w| w[0] + tol >= w[1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snap_examples() {
        let lat = UnaryLattice::new(2, 2).unwrap();
        assert_eq!(lat.snap(&[0.49, 0.99]), vec![0.0, 0.5]);
        assert_eq!(lat.snap(&[0.5, 1.0]), vec![0.5, 1.0]);
        let ten = UnaryLattice::new(1, 10).unwrap();
        assert_eq!(ten.snap(&[0.3]), vec![0.3]);
    }

    #[test]
    fn lift_example() {
        let lat = UnaryLattice::new(2, 2).unwrap();
        let p = lat.lift(&[0.5, 1.0]).unwrap();
        assert_eq!(p.bits(), vec![true, false, true, true]);
        assert!(matches!(lat.lift(&[0.3, 1.0]), Err(Error::OffLattice(_))));
    }

    #[test]
    fn staircase_violation_rejected() {
        assert!(matches!(
            LiftedPoint::from_bits(2, 2, &[true, false, false, true]),
            Err(Error::Staircase { block: 1 })
        ));
    }

    #[test]
    fn reward_lifting() {
        let lat = UnaryLattice::new(2, 2).unwrap();
        let a = [2.0, -4.0];
        let at = lat.lift_reward(&a);
        assert_eq!(at, vec![1.0, 1.0, -2.0, -2.0]);
        let c = lat.lift(&[0.5, 1.0]).unwrap();
        assert_eq!(c.dot(&at), -3.0);
        assert_eq!(crate::vector::dot(&a, &[0.5, 1.0]), -3.0);
        assert_eq!(lat.lift_reward(&[0.0, 0.0]), vec![0.0; 4]);
    }

    #[test]
    fn default_granularity_floor() {
        assert_eq!(UnaryLattice::default_granularity(1, 10), 1);
        assert_eq!(UnaryLattice::default_granularity(500, 20), 3);
        assert_eq!(UnaryLattice::default_granularity(16, 1), 2);
    }
}
