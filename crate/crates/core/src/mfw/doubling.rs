use std::sync::Arc;

use crate::error::Result;
use crate::function::DrFunction;

use super::engine::{OnlineLearner, LEVEL_CAP};

/// Phase of 1-based round `t`: phase `m` spans `[2^m, 2^{m+1} − 1]`.
pub fn phase_of(round: usize) -> usize {
    (usize::BITS - 1 - round.max(1).leading_zeros()) as usize
}

/// Lengths of the phases that cover `1..=T`, the last one truncated.
pub fn phase_lengths(horizon: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut m = 0;
    while (1usize << m) <= horizon {
        let start = 1usize << m;
        let end = ((1usize << (m + 1)) - 1).min(horizon);
        out.push(end - start + 1);
        m += 1;
    }
    out
}

/// `min(2^{m+1}, cap)`.
pub fn phase_levels(phase: usize, cap: usize) -> usize {
    1usize.checked_shl(phase as u32 + 1).unwrap_or(usize::MAX).min(cap)
}

/// Builds the engine for a phase from `(phase, levels, phase length)`.
pub type PhaseFactory = dyn FnMut(usize, usize, usize) -> Result<Box<dyn OnlineLearner>> + Send;

/// Runs a fresh engine per doubling phase, so the horizon need not be known.
pub struct DoublingLearner {
    factory: Box<PhaseFactory>,
    n: usize,
    level_cap: usize,
    current: Option<(usize, Box<dyn OnlineLearner>)>,
    round: usize,
}

impl DoublingLearner {
    pub fn new(n: usize, factory: Box<PhaseFactory>) -> Self {
        Self::with_level_cap(n, LEVEL_CAP, factory)
    }

    pub fn with_level_cap(n: usize, level_cap: usize, factory: Box<PhaseFactory>) -> Self {
        Self {
            factory,
            n,
            level_cap: level_cap.max(1),
            current: None,
            round: 0,
        }
    }

    pub fn phase(&self) -> Option<usize> {
        self.current.as_ref().map(|(m, _)| *m)
    }

    pub fn rounds(&self) -> usize {
        self.round
    }
}

impl OnlineLearner for DoublingLearner {
    fn dim(&self) -> usize {
        self.n
    }

    fn play(&mut self) -> Result<Vec<f64>> {
        let m = phase_of(self.round + 1);
        if self.phase() != Some(m) {
            let engine = (self.factory)(m, phase_levels(m, self.level_cap), 1usize << m)?;
            self.current = Some((m, engine));
        }
        self.current.as_mut().expect("engine built above").1.play()
    }

    fn feedback(&mut self, f: &Arc<dyn DrFunction>) -> Result<f64> {
        let engine = &mut self
            .current
            .as_mut()
            .ok_or(crate::error::Error::Protocol("feedback without a preceding play"))?
            .1;
        let reward = engine.feedback(f)?;
        self.round += 1;
        Ok(reward)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::ConvexBody;
    use crate::function::{DrFunction, LinearFunction};
    use crate::mfw::{MfwConfig, MfwGeneral};
    use crate::oracles::OloKind;
    use crate::rng::RngStream;

    #[test]
    fn phases() {
        assert_eq!(phase_lengths(10), vec![1, 2, 4, 3]);
        assert_eq!(phase_lengths(1), vec![1]);
        assert_eq!(phase_levels(0, 64), 2);
        assert_eq!(phase_levels(9, 64), 64);
        assert_eq!((1..=10).map(phase_of).collect::<Vec<_>>(), vec![0, 1, 1, 2, 2, 2, 2, 3, 3, 3]);
    }

    fn factory(seed: u64, log: std::sync::Arc<std::sync::Mutex<Vec<usize>>>) -> Box<PhaseFactory> {
        Box::new(move |m, levels, len| {
            log.lock().unwrap().push(levels);
            let cfg = MfwConfig {
                levels,
                horizon: len,
                gradient_bound: 1.0,
                oracle: OloKind::GradientAscent,
                granularity: None,
            };
            let e = MfwGeneral::new(ConvexBody::hypercube(2)?, cfg, RngStream::new(seed).fork(m as u64))?;
            Ok(Box::new(e) as Box<dyn OnlineLearner>)
        })
    }

    #[test]
    fn rebuilds_per_phase() {
        let log = std::sync::Arc::new(std::sync::Mutex::new(Vec::new()));
        let mut d = DoublingLearner::new(2, factory(1, log.clone()));
        let f: Arc<dyn DrFunction> = Arc::new(LinearFunction::new(vec![1.0, -1.0]));
        for _ in 0..10 {
            d.play().unwrap();
            d.feedback(&f).unwrap();
        }
        assert_eq!(*log.lock().unwrap(), vec![2, 4, 8, 16]);
    }

    #[test]
    fn matches_fresh_engines() {
        let f: Arc<dyn DrFunction> = Arc::new(LinearFunction::new(vec![0.3, -0.2]));
        let log = std::sync::Arc::new(std::sync::Mutex::new(Vec::new()));
        let mut d = DoublingLearner::new(2, factory(7, log.clone()));
        let mut doubled = Vec::new();
        for _ in 0..7 {
            doubled.push(d.play().unwrap());
            d.feedback(&f).unwrap();
        }
        let mut fresh = Vec::new();
        let mut make = factory(7, log);
        for (m, len) in phase_lengths(7).into_iter().enumerate() {
            let mut e = make(m, phase_levels(m, 64), 1 << m).unwrap();
            for _ in 0..len {
                fresh.push(e.play().unwrap());
                e.feedback(&f).unwrap();
            }
        }
        assert_eq!(doubled, fresh);
    }
}
