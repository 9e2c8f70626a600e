//! Online linear optimization oracles with an explicit play/feedback
//! protocol. Rewards are maximized.

use std::sync::Arc;

use crate::body::ConvexBody;
use crate::error::{check_dim, Error, Result};
use crate::rng::RngStream;
use crate::vector;

/// A feasible region that online linear oracles can act on.
pub trait LinearDomain: Send + Sync {
    fn dim(&self) -> usize;
    fn contains(&self, x: &[f64]) -> bool;
    fn linear_maximize(&self, w: &[f64]) -> Result<Vec<f64>>;
    fn project(&self, x: &[f64]) -> Result<Vec<f64>>;
    fn diameter(&self) -> f64;
    /// Where gradient ascent starts.
    fn start_point(&self) -> Result<Vec<f64>>;
}

impl LinearDomain for ConvexBody {
    fn dim(&self) -> usize {
        ConvexBody::dim(self)
    }
    fn contains(&self, x: &[f64]) -> bool {
        ConvexBody::contains(self, x).unwrap_or(false)
    }
    fn linear_maximize(&self, w: &[f64]) -> Result<Vec<f64>> {
        ConvexBody::linear_maximize(self, w)
    }
    fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        ConvexBody::project(self, x)
    }
    fn diameter(&self) -> f64 {
        ConvexBody::diameter(self).value
    }
    fn start_point(&self) -> Result<Vec<f64>> {
        self.min_inf_norm_point()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OloStrategy {
    /// Projected online gradient ascent with step `step_scale / √t`.
    GradientAscent { step_scale: f64 },
    /// Follow-the-perturbed-leader: play `argmax ⟨Σ d + noise, x⟩` with
    /// i.i.d. `Uniform[0, noise_scale]` noise per coordinate, redrawn every
    /// round. `noise_scale` is the inverse of the perturbation parameter η.
    PerturbedLeader { noise_scale: f64 },
}

/// Which online linear learner to instantiate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OloKind {
    GradientAscent,
    PerturbedLeader,
}

impl OloStrategy {
    /// Textbook tuning of either learner for diameter `D`, reward bound `G`
    /// and horizon `T`.
    pub fn tuned(kind: OloKind, diameter: f64, gradient_bound: f64, horizon: usize) -> Self {
        match kind {
            OloKind::GradientAscent => Self::ascent_for(diameter, gradient_bound),
            OloKind::PerturbedLeader => Self::leader_for(horizon, gradient_bound),
        }
    }

    /// Ascent with the textbook step `η_t = D / (G √t)`.
    pub fn ascent_for(diameter: f64, gradient_bound: f64) -> Self {
        let g = if gradient_bound > 0.0 { gradient_bound } else { 1.0 };
        OloStrategy::GradientAscent {
            step_scale: diameter.max(1e-12) / g,
        }
    }

    /// Perturbed leader with `η = 1/√T` in units of the reward bound `G`.
    pub fn leader_for(horizon: usize, gradient_bound: f64) -> Self {
        let g = if gradient_bound > 0.0 { gradient_bound } else { 1.0 };
        OloStrategy::PerturbedLeader {
            noise_scale: g * (horizon.max(1) as f64).sqrt(),
        }
    }
}

/// Single-owner online linear optimization state machine.
#[derive(Debug, Clone)]
pub struct LinearOracle<D: LinearDomain> {
    domain: Arc<D>,
    strategy: OloStrategy,
    /// Current iterate (ascent).
    state: Vec<f64>,
    /// Sum of all reward vectors seen.
    cumulative: Vec<f64>,
    /// `Σ_t ⟨d_t, play_t⟩`.
    earned: f64,
    current: Option<Vec<f64>>,
    round: usize,
    rng: RngStream,
}

impl<D: LinearDomain> LinearOracle<D> {
    pub fn new(domain: Arc<D>, strategy: OloStrategy, rng: RngStream) -> Result<Self> {
        match strategy {
            OloStrategy::GradientAscent { step_scale } if !(step_scale > 0.0) => {
                return Err(Error::InvalidArgument("ascent step scale must be > 0".into()))
            }
            OloStrategy::PerturbedLeader { noise_scale } if !(noise_scale >= 0.0) => {
                return Err(Error::InvalidArgument("noise scale must be >= 0".into()))
            }
            _ => {}
        }
        let state = domain.start_point()?;
        let n = domain.dim();
        Ok(Self {
            domain,
            strategy,
            state,
            cumulative: vec![0.0; n],
            earned: 0.0,
            current: None,
            round: 0,
            rng,
        })
    }

    pub fn domain(&self) -> &Arc<D> {
        &self.domain
    }

    pub fn strategy(&self) -> OloStrategy {
        self.strategy
    }

    /// Rounds completed (feedback calls accepted).
    pub fn rounds(&self) -> usize {
        self.round
    }

    pub fn cumulative_reward_vector(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn earned(&self) -> f64 {
        self.earned
    }

    /// The point for the current round. Repeated calls before feedback return
    /// the same point.
    pub fn play(&mut self) -> Result<Vec<f64>> {
        if let Some(p) = &self.current {
            return Ok(p.clone());
        }
        let point = match self.strategy {
            OloStrategy::GradientAscent { .. } => self.state.clone(),
            OloStrategy::PerturbedLeader { noise_scale } => {
                let w: Vec<f64> = self
                    .cumulative
                    .iter()
                    .map(|c| c + noise_scale * self.rng.uniform())
                    .collect();
                self.domain.linear_maximize(&w)?
            }
        };
        self.current = Some(point.clone());
        Ok(point)
    }

    /// Reveal the reward vector `d` of the current round.
    pub fn feedback(&mut self, d: &[f64]) -> Result<()> {
        check_dim(self.domain.dim(), d.len())?;
        let played = self
            .current
            .take()
            .ok_or(Error::Protocol("feedback without a preceding play"))?;
        self.earned += vector::dot(d, &played);
        vector::axpy(1.0, d, &mut self.cumulative);
        self.round += 1;
        if let OloStrategy::GradientAscent { step_scale } = self.strategy {
            let eta = step_scale / (self.round as f64).sqrt();
            let mut next = self.state.clone();
            vector::axpy(eta, d, &mut next);
            self.state = self.domain.project(&next)?;
        }
        Ok(())
    }

    /// Regret against the best fixed point of the domain in hindsight.
    pub fn regret(&self) -> Result<f64> {
        let best = self.domain.linear_maximize(&self.cumulative)?;
        Ok(vector::dot(&self.cumulative, &best) - self.earned)
    }
}

/// `max_{x∈K} Σ⟨r_t, x⟩ − Σ⟨r_t, p_t⟩`, with the comparator from one linear
/// maximization of the summed reward.
pub fn olo_regret<D: LinearDomain + ?Sized>(
    plays: &[Vec<f64>],
    rewards: &[Vec<f64>],
    domain: &D,
) -> Result<f64> {
    if plays.len() != rewards.len() {
        return Err(Error::InvalidArgument(format!(
            "{} plays but {} rewards",
            plays.len(),
            rewards.len()
        )));
    }
    let n = domain.dim();
    let mut total = vec![0.0; n];
    let mut earned = 0.0;
    for (p, r) in plays.iter().zip(rewards) {
        check_dim(n, p.len())?;
        check_dim(n, r.len())?;
        vector::axpy(1.0, r, &mut total);
        earned += vector::dot(p, r);
    }
    let best = domain.linear_maximize(&total)?;
    Ok(vector::dot(&total, &best) - earned)
}
