use std::sync::Arc;

use rayon::prelude::*;

use crate::body::ConvexBody;
use crate::error::{Error, Result};
use crate::function::DrFunction;
use crate::lift::{LiftedBody, UnaryLattice, VeeConfig, VeeOracle};
use crate::oracles::{LinearDomain, LinearOracle, OloKind, OloStrategy};
use crate::rng::RngStream;
use crate::vector;

use super::schedule::{GradientAverager, StepSchedule};

pub const LEVEL_CAP: usize = 64;

/// `min(⌈T^{3/4}⌉, 64)`.
pub fn default_levels_down_closed(horizon: usize) -> usize {
    ((horizon.max(1) as f64).powf(0.75).ceil() as usize).clamp(1, LEVEL_CAP)
}

/// `min(T, 64)`.
pub fn default_levels_general(horizon: usize) -> usize {
    horizon.clamp(1, LEVEL_CAP)
}

/// Full-information online maximization of a stream of objectives.
pub trait OnlineLearner: Send {
    fn dim(&self) -> usize;

    /// The point for the current round; repeated calls return the same point.
    fn play(&mut self) -> Result<Vec<f64>>;

    /// Reveals this round's objective. Returns `F(x_t)`.
    fn feedback(&mut self, f: &Arc<dyn DrFunction>) -> Result<f64>;
}

impl<L: OnlineLearner + ?Sized> OnlineLearner for Box<L> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn play(&mut self) -> Result<Vec<f64>> {
        (**self).play()
    }
    fn feedback(&mut self, f: &Arc<dyn DrFunction>) -> Result<f64> {
        (**self).feedback(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MfwConfig {
    pub levels: usize,
    /// Horizon the inner oracles are tuned for.
    pub horizon: usize,
    /// Bound on `‖∇F‖`, used to tune the inner oracles.
    pub gradient_bound: f64,
    pub oracle: OloKind,
    /// Lattice granularity for the vee oracles; `None` picks `⌈(T/n)^{1/4}⌉`.
    pub granularity: Option<usize>,
}

/// Shared per-round bookkeeping: the level iterates `x_1, …, x_{L+1}` of the
/// current round and the momentum estimates.
#[derive(Debug, Clone)]
struct RoundState {
    trace: Vec<Vec<f64>>,
    played: bool,
}

fn averaged_gradients(
    f: &dyn DrFunction,
    trace: &[Vec<f64>],
    schedule: &StepSchedule,
    rng: &mut RngStream,
) -> Result<Vec<Vec<f64>>> {
    let n = trace[0].len();
    crate::error::check_dim(n, f.dim())?;
    let mut avg = GradientAverager::new(n, schedule.rho().to_vec());
    trace[..schedule.levels()]
        .iter()
        .map(|x| {
            let g = f.stochastic_gradient(x, rng);
            Ok(avg.step(&g)?.to_vec())
        })
        .collect()
}

/// Meta-Frank-Wolfe over a down-closed body with one vee oracle per level.
pub struct MfwDownClosed {
    body: ConvexBody,
    schedule: StepSchedule,
    oracles: Vec<VeeOracle>,
    state: RoundState,
    rng: RngStream,
    round: usize,
}

impl MfwDownClosed {
    pub fn new(body: ConvexBody, config: MfwConfig, rng: RngStream) -> Result<Self> {
        let schedule = StepSchedule::uniform(config.levels)?;
        Self::with_schedule(body, config, schedule, rng)
    }

    pub fn with_schedule(
        body: ConvexBody,
        config: MfwConfig,
        schedule: StepSchedule,
        rng: RngStream,
    ) -> Result<Self> {
        if !body.is_down_closed() {
            return Err(Error::InvalidArgument(
                "the down-closed engine needs a down-closed body".into(),
            ));
        }
        if schedule.levels() != config.levels {
            return Err(Error::DimensionMismatch {
                expected: config.levels,
                got: schedule.levels(),
            });
        }
        let n = body.dim();
        let m = config
            .granularity
            .unwrap_or_else(|| UnaryLattice::default_granularity(config.horizon, n));
        let lifted = Arc::new(LiftedBody::new(UnaryLattice::new(n, m)?, body.clone())?);
        let vee = VeeConfig::for_horizon(&lifted, config.oracle, config.gradient_bound, config.horizon);
        let oracles = (0..config.levels)
            .map(|l| VeeOracle::new(lifted.clone(), vee, rng.fork(l as u64 + 1)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            body,
            schedule,
            oracles,
            state: RoundState {
                trace: Vec::new(),
                played: false,
            },
            rng: rng.fork(0),
            round: 0,
        })
    }

    pub fn schedule(&self) -> &StepSchedule {
        &self.schedule
    }

    pub fn granularity(&self) -> usize {
        self.oracles[0].body().lattice().granularity()
    }

    /// `x_1, …, x_{L+1}` of the latest round.
    pub fn last_trace(&self) -> &[Vec<f64>] {
        &self.state.trace
    }

    pub fn rounds(&self) -> usize {
        self.round
    }

    pub fn oracles(&self) -> &[VeeOracle] {
        &self.oracles
    }
}

impl OnlineLearner for MfwDownClosed {
    fn dim(&self) -> usize {
        self.body.dim()
    }

    fn play(&mut self) -> Result<Vec<f64>> {
        if self.state.played {
            return Ok(self.state.trace.last().cloned().unwrap_or_default());
        }
        let n = self.body.dim();
        let mut x = vec![0.0; n];
        let mut trace = Vec::with_capacity(self.oracles.len() + 1);
        trace.push(x.clone());
        for (oracle, eta) in self.oracles.iter_mut().zip(self.schedule.eta()) {
            let u: Vec<f64> = oracle.play();
            for (xi, ui) in x.iter_mut().zip(&u) {
                *xi += eta * (ui.max(*xi) - *xi);
            }
            trace.push(x.clone());
        }
        if !self.body.contains_unchecked(&x, crate::body::FEASIBILITY_TOL) {
            return Err(Error::Internal(format!(
                "down-closed play left the body at round {}",
                self.round + 1
            )));
        }
        self.state = RoundState {
            trace,
            played: true,
        };
        Ok(x)
    }

    fn feedback(&mut self, f: &Arc<dyn DrFunction>) -> Result<f64> {
        if !self.state.played {
            return Err(Error::Protocol("feedback without a preceding play"));
        }
        let trace = &self.state.trace;
        let ds = averaged_gradients(f.as_ref(), trace, &self.schedule, &mut self.rng)?;
        self.oracles
            .par_iter_mut()
            .zip(ds.par_iter())
            .zip(trace.par_iter())
            .try_for_each(|((oracle, d), x)| oracle.feedback(x, d).map(|_| ()))?;
        let reward = f.value(trace.last().expect("trace is never empty"));
        self.state.played = false;
        self.round += 1;
        Ok(reward)
    }
}

/// Meta-Frank-Wolfe over a general body with one linear oracle per level.
pub struct MfwGeneral {
    body: Arc<ConvexBody>,
    schedule: StepSchedule,
    start: Vec<f64>,
    oracles: Vec<LinearOracle<ConvexBody>>,
    state: RoundState,
    rng: RngStream,
    round: usize,
}

impl MfwGeneral {
    pub fn new(body: ConvexBody, config: MfwConfig, rng: RngStream) -> Result<Self> {
        let schedule = StepSchedule::harmonic(config.levels)?;
        Self::with_schedule(body, config, schedule, rng)
    }

    pub fn with_schedule(
        body: ConvexBody,
        config: MfwConfig,
        schedule: StepSchedule,
        rng: RngStream,
    ) -> Result<Self> {
        if schedule.levels() != config.levels {
            return Err(Error::DimensionMismatch {
                expected: config.levels,
                got: schedule.levels(),
            });
        }
        let start = body.min_inf_norm_point()?;
        let body = Arc::new(body);
        let strategy = OloStrategy::tuned(
            config.oracle,
            LinearDomain::diameter(body.as_ref()),
            config.gradient_bound,
            config.horizon,
        );
        let oracles = (0..config.levels)
            .map(|l| LinearOracle::new(body.clone(), strategy, rng.fork(l as u64 + 1)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            body,
            schedule,
            start,
            oracles,
            state: RoundState {
                trace: Vec::new(),
                played: false,
            },
            rng: rng.fork(0),
            round: 0,
        })
    }

    pub fn schedule(&self) -> &StepSchedule {
        &self.schedule
    }

    /// The minimum-∞-norm point every round starts from.
    pub fn start_point(&self) -> &[f64] {
        &self.start
    }

    pub fn last_trace(&self) -> &[Vec<f64>] {
        &self.state.trace
    }

    pub fn rounds(&self) -> usize {
        self.round
    }

    /// Regret of each level's oracle on the rewards it has received.
    pub fn level_regrets(&self) -> Result<Vec<f64>> {
        self.oracles.iter().map(|o| o.regret()).collect()
    }
}

impl OnlineLearner for MfwGeneral {
    fn dim(&self) -> usize {
        self.body.dim()
    }

    fn play(&mut self) -> Result<Vec<f64>> {
        if self.state.played {
            return Ok(self.state.trace.last().cloned().unwrap_or_default());
        }
        let mut x = self.start.clone();
        let mut trace = Vec::with_capacity(self.oracles.len() + 1);
        trace.push(x.clone());
        for (oracle, eta) in self.oracles.iter_mut().zip(self.schedule.eta()) {
            let v = oracle.play()?;
            x = vector::add(&vector::scale(&x, 1.0 - eta), &vector::scale(&v, *eta));
            trace.push(x.clone());
        }
        if !self.body.contains_unchecked(&x, crate::body::FEASIBILITY_TOL) {
            return Err(Error::Internal(format!(
                "general play left the body at round {}",
                self.round + 1
            )));
        }
        self.state = RoundState {
            trace,
            played: true,
        };
        Ok(x)
    }

    fn feedback(&mut self, f: &Arc<dyn DrFunction>) -> Result<f64> {
        if !self.state.played {
            return Err(Error::Protocol("feedback without a preceding play"));
        }
        let trace = &self.state.trace;
        let ds = averaged_gradients(f.as_ref(), trace, &self.schedule, &mut self.rng)?;
        self.oracles
            .par_iter_mut()
            .zip(ds.par_iter())
            .try_for_each(|(oracle, d)| oracle.feedback(d))?;
        let reward = f.value(trace.last().expect("trace is never empty"));
        self.state.played = false;
        self.round += 1;
        Ok(reward)
    }
}

/// Smallest `(1 − ‖x_{ℓ+1}‖_∞) − Π_{ℓ' ≤ ℓ}(1 − η_ℓ')` over the levels of a
/// trace. Non-negative when the down-closed bound holds.
pub fn infinity_norm_slack(trace: &[Vec<f64>], eta: &[f64]) -> f64 {
    let mut survival = 1.0;
    let mut slack = f64::INFINITY;
    for (x, e) in trace.iter().skip(1).zip(eta) {
        survival *= 1.0 - e;
        slack = slack.min(1.0 - vector::norm_inf(x) - survival);
    }
    slack
}

/// Smallest `(1 − x_{ℓ+1,i}) − Π_{ℓ' ≤ ℓ}(1 − η_ℓ')(1 − x_{1,i})` over levels
/// and coordinates.
pub fn coordinate_slack(trace: &[Vec<f64>], eta: &[f64]) -> f64 {
    let first = &trace[0];
    let mut survival = 1.0;
    let mut slack = f64::INFINITY;
    for (x, e) in trace.iter().skip(1).zip(eta) {
        survival *= 1.0 - e;
        for (xi, x1) in x.iter().zip(first) {
            slack = slack.min((1.0 - xi) - survival * (1.0 - x1));
        }
    }
    slack
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::{DrFunction, LinearFunction};

    fn config(levels: usize) -> MfwConfig {
        MfwConfig {
            levels,
            horizon: 100,
            gradient_bound: 2.0,
            oracle: OloKind::GradientAscent,
            granularity: Some(2),
        }
    }

    #[test]
    fn first_round_zero_play() {
        let mut e = MfwDownClosed::new(ConvexBody::hypercube(3).unwrap(), config(4), RngStream::new(1)).unwrap();
        assert_eq!(e.play().unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn refuses_non_down_closed() {
        let body = ConvexBody::total_band(3, 0.1, 1.0).unwrap();
        assert!(MfwDownClosed::new(body, config(2), RngStream::new(1)).is_err());
    }

    #[test]
    fn feedback_before_play() {
        let mut e = MfwGeneral::new(ConvexBody::hypercube(2).unwrap(), config(2), RngStream::new(1)).unwrap();
        let f: Arc<dyn DrFunction> = Arc::new(LinearFunction::new(vec![1.0, 1.0]));
        assert!(matches!(e.feedback(&f), Err(Error::Protocol(_))));
    }

    #[test]
    fn linear_objective_learns_up() {
        let mut e = MfwDownClosed::new(ConvexBody::hypercube(2).unwrap(), config(4), RngStream::new(2)).unwrap();
        let f: Arc<dyn DrFunction> = Arc::new(LinearFunction::new(vec![1.0, 0.5]));
        let mut last = 0.0;
        for _ in 0..100 {
            e.play().unwrap();
            last = e.feedback(&f).unwrap();
            assert!(infinity_norm_slack(e.last_trace(), e.schedule().eta()) >= -1e-12);
        }
        assert!(last > 1.0, "{last}");
    }

    #[test]
    fn general_bound_and_start() {
        let body = ConvexBody::total_band(2, 0.1, 1.0).unwrap();
        let mut e = MfwGeneral::new(body, config(4), RngStream::new(3)).unwrap();
        assert_eq!(e.start_point(), &[0.05, 0.05]);
        let f: Arc<dyn DrFunction> = Arc::new(LinearFunction::new(vec![-1.0, 2.0]));
        for _ in 0..30 {
            e.play().unwrap();
            e.feedback(&f).unwrap();
            assert!(coordinate_slack(e.last_trace(), e.schedule().eta()) >= -1e-12);
        }
        assert!(e.level_regrets().unwrap().iter().all(|r| r.is_finite()));
    }

    #[test]
    fn zero_objective_keeps_defaults() {
        let mut e = MfwGeneral::new(ConvexBody::hypercube(2).unwrap(), config(3), RngStream::new(4)).unwrap();
        let f: Arc<dyn DrFunction> = Arc::new(LinearFunction::with_offset(vec![0.0, 0.0], 0.0));
        for _ in 0..5 {
            assert_eq!(e.play().unwrap(), vec![0.0, 0.0]);
            assert_eq!(e.feedback(&f).unwrap(), 0.0);
        }
    }

    #[test]
    fn canary_schedule_breaks_reference_bound() {
        let l = 4;
        let doubled = StepSchedule::custom(vec![2.0 / l as f64; l]).unwrap();
        let reference = vec![1.0 / l as f64; l];
        let mut e = MfwDownClosed::with_schedule(
            ConvexBody::hypercube(2).unwrap(),
            config(l),
            doubled,
            RngStream::new(5),
        )
        .unwrap();
        let f: Arc<dyn DrFunction> = Arc::new(LinearFunction::new(vec![1.0, 1.0]));
        let mut worst = f64::INFINITY;
        for _ in 0..50 {
            e.play().unwrap();
            e.feedback(&f).unwrap();
            worst = worst.min(infinity_norm_slack(e.last_trace(), &reference));
        }
        assert!(worst < 0.0);
    }

    #[test]
    fn default_levels() {
        assert_eq!(default_levels_down_closed(500), 64);
        assert_eq!(default_levels_down_closed(16), 8);
        assert_eq!(default_levels_general(10), 10);
        assert_eq!(default_levels_general(1000), 64);
    }
}
