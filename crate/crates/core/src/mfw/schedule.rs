use crate::error::{Error, Result};

/// `κ = ln 3 / 2`.
pub const KAPPA: f64 = 0.549_306_144_334_054_9;

/// `ρ_ℓ = 2/(ℓ+3)^{2/3}` for 1-based `ℓ`.
pub fn default_rho(level: usize) -> f64 {
    2.0 / ((level + 3) as f64).powf(2.0 / 3.0)
}

pub fn harmonic_number(l: usize) -> f64 {
    (1..=l).map(|k| 1.0 / k as f64).sum()
}

/// Per-level Frank-Wolfe steps `η_ℓ` and averaging weights `ρ_ℓ`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepSchedule {
    eta: Vec<f64>,
    rho: Vec<f64>,
}

impl StepSchedule {
    /// `η_ℓ = 1/L`.
    pub fn uniform(levels: usize) -> Result<Self> {
        Self::custom(vec![1.0 / levels.max(1) as f64; levels])
    }

    /// `η_ℓ = κ/(ℓ H_L)`.
    pub fn harmonic(levels: usize) -> Result<Self> {
        let h = harmonic_number(levels);
        Self::custom((1..=levels).map(|l| KAPPA / (l as f64 * h)).collect())
    }

    pub fn custom(eta: Vec<f64>) -> Result<Self> {
        if eta.is_empty() {
            return Err(Error::InvalidArgument("schedule needs at least one level".into()));
        }
        if eta.iter().any(|e| !(*e > 0.0 && *e <= 1.0)) {
            return Err(Error::InvalidArgument("step sizes must lie in (0, 1]".into()));
        }
        let rho = (1..=eta.len()).map(default_rho).collect();
        Ok(Self { eta, rho })
    }

    pub fn with_rho(mut self, rho: Vec<f64>) -> Result<Self> {
        if rho.len() != self.eta.len() {
            return Err(Error::DimensionMismatch {
                expected: self.eta.len(),
                got: rho.len(),
            });
        }
        if rho.iter().any(|r| !(*r > 0.0 && *r <= 1.0)) {
            return Err(Error::InvalidArgument("averaging weights must lie in (0, 1]".into()));
        }
        self.rho = rho;
        Ok(self)
    }

    pub fn levels(&self) -> usize {
        self.eta.len()
    }

    pub fn eta(&self) -> &[f64] {
        &self.eta
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    /// `Π_{ℓ' ≤ ℓ} (1 − η_ℓ')` for `ℓ = 0..=L`.
    pub fn survival(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.eta.len() + 1);
        let mut acc = 1.0;
        out.push(acc);
        for e in &self.eta {
            acc *= 1.0 - e;
            out.push(acc);
        }
        out
    }
}

/// Momentum averaging `d_ℓ = (1 − ρ_ℓ) d_{ℓ−1} + ρ_ℓ g_ℓ`, with `d_0 = 0`.
#[derive(Debug, Clone)]
pub struct GradientAverager {
    rho: Vec<f64>,
    d: Vec<f64>,
    level: usize,
}

impl GradientAverager {
    pub fn new(n: usize, rho: Vec<f64>) -> Self {
        Self {
            rho,
            d: vec![0.0; n],
            level: 0,
        }
    }

    pub fn reset(&mut self) {
        self.d.iter_mut().for_each(|v| *v = 0.0);
        self.level = 0;
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn current(&self) -> &[f64] {
        &self.d
    }

    pub fn step(&mut self, g: &[f64]) -> Result<&[f64]> {
        crate::error::check_dim(self.d.len(), g.len())?;
        let rho = *self
            .rho
            .get(self.level)
            .ok_or(Error::Protocol("averager stepped past its last level"))?;
        for (d, g) in self.d.iter_mut().zip(g) {
            *d = (1.0 - rho) * *d + rho * g;
        }
        self.level += 1;
        Ok(&self.d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kappa_value() {
        assert!((KAPPA - 3f64.ln() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn rho_values() {
        assert!((default_rho(1) - 0.793_700_5).abs() < 1e-6);
        assert!((default_rho(2) - 0.683_990_3).abs() < 1e-6);
        assert!((1..1000).all(|l| default_rho(l) > 0.0 && default_rho(l) < 1.0));
    }

    #[test]
    fn sums() {
        for l in [1, 4, 17, 64, 500] {
            let u: f64 = StepSchedule::uniform(l).unwrap().eta().iter().sum();
            assert!((u - 1.0).abs() < 1e-12);
            let h: f64 = StepSchedule::harmonic(l).unwrap().eta().iter().sum();
            assert!((h - KAPPA).abs() < 1e-12);
        }
    }

    #[test]
    fn harmonic_four_levels() {
        assert!((harmonic_number(4) - 25.0 / 12.0).abs() < 1e-15);
        let s = StepSchedule::harmonic(4).unwrap();
        let expect = [0.263_667, 0.131_833, 0.087_889, 0.065_917];
        for (a, b) in s.eta().iter().zip(expect) {
            assert!((a - b).abs() < 1e-6);
        }
        assert!((s.survival()[4] - 0.544_641_4).abs() < 1e-6);
    }

    #[test]
    fn averager_unroll() {
        let w = [1.0, 0.0];
        let mut avg = GradientAverager::new(2, StepSchedule::uniform(3).unwrap().rho().to_vec());
        let d1 = avg.step(&w).unwrap().to_vec();
        assert!((d1[0] - 0.793_700_5).abs() < 1e-6 && d1[1] == 0.0);
        let d2 = avg.step(&w).unwrap()[0];
        let r1 = default_rho(1);
        let r2 = default_rho(2);
        assert!((d2 - ((1.0 - r2) * r1 + r2)).abs() < 1e-15);
        avg.reset();
        assert_eq!(avg.current(), &[0.0, 0.0]);
    }
}
