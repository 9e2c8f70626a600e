use std::sync::Arc;

use crate::error::{check_dim, Error, Result};
use crate::oracles::{LinearDomain, LinearOracle, OloKind, OloStrategy};
use crate::rng::RngStream;
use crate::vector;

use super::body::LiftedBody;
use super::lattice::LiftedPoint;
use super::round::{caratheodory_decompose, Decomposition, DEFAULT_CARATHEODORY_CONSTANT};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VeeConfig {
    pub strategy: OloStrategy,
    /// Rounding accuracy.
    pub epsilon: f64,
    pub caratheodory_constant: f64,
}

impl VeeConfig {
    /// `ε = 1/√T`, with the inner learner tuned for the lifted rewards,
    /// whose norm is at most `G/√M`.
    pub fn for_horizon(body: &LiftedBody, kind: OloKind, gradient_bound: f64, horizon: usize) -> Self {
        let m = body.lattice().granularity() as f64;
        let lifted_bound = gradient_bound / m.sqrt();
        Self {
            strategy: OloStrategy::tuned(kind, body.diameter(), lifted_bound, horizon),
            epsilon: 1.0 / (horizon.max(1) as f64).sqrt(),
            caratheodory_constant: DEFAULT_CARATHEODORY_CONSTANT,
        }
    }
}

/// Online learner for rewards of the form `⟨a_t, c_t ∨ x⟩`, playing lattice
/// points of the base body.
#[derive(Debug, Clone)]
pub struct VeeOracle {
    body: Arc<LiftedBody>,
    inner: LinearOracle<LiftedBody>,
    config: VeeConfig,
    point: LiftedPoint,
    x: Vec<f64>,
    initial: Vec<f64>,
    cache: Option<(Vec<f64>, Decomposition)>,
    awaiting: bool,
    round: usize,
    realized: f64,
    rng: RngStream,
}

impl VeeOracle {
    /// Starts from the origin of the lattice.
    pub fn new(body: Arc<LiftedBody>, config: VeeConfig, rng: RngStream) -> Result<Self> {
        let inner = LinearOracle::new(body.clone(), config.strategy, rng.fork(1))?;
        let n = body.lattice().dim();
        let m = body.lattice().granularity();
        Ok(Self {
            body,
            inner,
            config,
            point: LiftedPoint::zeros(n, m),
            x: vec![0.0; n],
            initial: vec![0.0; n],
            cache: None,
            awaiting: false,
            round: 0,
            realized: 0.0,
            rng: rng.fork(2),
        })
    }

    pub fn body(&self) -> &Arc<LiftedBody> {
        &self.body
    }

    pub fn config(&self) -> &VeeConfig {
        &self.config
    }

    pub fn initial_point(&self) -> &[f64] {
        &self.initial
    }

    pub fn lifted_point(&self) -> &LiftedPoint {
        &self.point
    }

    pub fn rounds(&self) -> usize {
        self.round
    }

    /// `Σ_t ⟨a_t, c_t ∨ x_t⟩`.
    pub fn realized_total(&self) -> f64 {
        self.realized
    }

    pub fn inner_regret(&self) -> Result<f64> {
        self.inner.regret()
    }

    pub fn play(&mut self) -> Vec<f64> {
        self.awaiting = true;
        self.x.clone()
    }

    /// Reveals `(c_t, a_t)` and prepares the next play. Returns the realized
    /// reward `⟨a_t, c_t ∨ x_t⟩`.
    pub fn feedback(&mut self, c: &[f64], a: &[f64]) -> Result<f64> {
        let lattice = *self.body.lattice();
        check_dim(lattice.dim(), c.len())?;
        check_dim(lattice.dim(), a.len())?;
        if !self.awaiting {
            return Err(Error::Protocol("vee feedback without a preceding play"));
        }
        if !vector::in_unit_cube(c, 1e-9) {
            return Err(Error::InvalidArgument("vee point outside [0,1]^n".into()));
        }
        let reward: f64 = a
            .iter()
            .zip(c.iter().zip(&self.x))
            .map(|(ai, (ci, xi))| ai * ci.max(*xi))
            .sum();
        let indicator = lattice.lift(&lattice.snap(c))?.to_dense();
        let lifted: Vec<f64> = lattice
            .lift_reward(a)
            .iter()
            .zip(&indicator)
            .map(|(r, b)| r * (1.0 - b))
            .collect();
        self.inner.play()?;
        self.inner.feedback(&lifted)?;
        let y = self.inner.play()?;
        let reuse = matches!(&self.cache, Some((prev, _)) if *prev == y);
        if !reuse {
            let d = caratheodory_decompose(
                &self.body,
                &y,
                self.config.epsilon,
                self.config.caratheodory_constant,
            )?;
            self.cache = Some((y, d));
        }
        let (_, d) = self.cache.as_ref().expect("decomposition cached above");
        self.point = d.sample(&mut self.rng).clone();
        self.x = lattice.unlift(&self.point)?;
        self.realized += reward;
        self.round += 1;
        self.awaiting = false;
        Ok(reward)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::ConvexBody;
    use crate::lift::UnaryLattice;

    fn oracle(base: ConvexBody, m: usize, kind: OloKind, seed: u64) -> VeeOracle {
        let n = base.dim();
        let body = Arc::new(LiftedBody::new(UnaryLattice::new(n, m).unwrap(), base).unwrap());
        let cfg = VeeConfig::for_horizon(&body, kind, 2.0, 500);
        VeeOracle::new(body, cfg, RngStream::new(seed)).unwrap()
    }

    #[test]
    fn indicator_join_identity() {
        let ind = [1.0, 0.0];
        let z = [0.3, 0.7];
        let lhs: Vec<f64> = ind.iter().zip(&z).map(|(a, b): (&f64, &f64)| a.max(*b)).collect();
        let rhs: Vec<f64> = ind.iter().zip(&z).map(|(a, b)| b + a * (1.0 - b)).collect();
        assert_eq!(lhs, vec![1.0, 0.7]);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn feedback_requires_play() {
        let mut o = oracle(ConvexBody::hypercube(2).unwrap(), 2, OloKind::GradientAscent, 1);
        let err = o.feedback(&[0.0, 0.0], &[1.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::Protocol(_)));
    }

    #[test]
    fn first_play_is_origin() {
        let mut o = oracle(ConvexBody::uniform_budget(3, 1.0).unwrap(), 2, OloKind::PerturbedLeader, 1);
        assert_eq!(o.play(), vec![0.0; 3]);
        assert_eq!(o.initial_point(), &[0.0; 3]);
    }

    #[test]
    fn fuzz_plays_feasible_on_lattice() {
        for kind in [OloKind::GradientAscent, OloKind::PerturbedLeader] {
            let base = ConvexBody::uniform_budget(4, 1.5).unwrap();
            let mut o = oracle(base.clone(), 3, kind, 9);
            let mut rng = RngStream::new(5);
            for _ in 0..500 {
                let x = o.play();
                assert!(base.contains(&x).unwrap(), "{x:?}");
                assert!(o.body().lattice().lift(&x).is_ok());
                let c: Vec<f64> = (0..4).map(|_| rng.uniform() * 0.35).collect();
                let a: Vec<f64> = (0..4).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
                o.feedback(&c, &a).unwrap();
            }
        }
    }

    #[test]
    fn zero_rewards_keep_origin() {
        let mut o = oracle(ConvexBody::hypercube(2).unwrap(), 2, OloKind::GradientAscent, 4);
        for _ in 0..20 {
            assert_eq!(o.play(), vec![0.0, 0.0]);
            assert_eq!(o.feedback(&[0.5, 0.2], &[0.0, 0.0]).unwrap(), 0.0);
        }
    }

    #[test]
    fn replay_is_deterministic() {
        let run = || {
            let mut o = oracle(ConvexBody::hypercube(3).unwrap(), 2, OloKind::PerturbedLeader, 11);
            let mut rng = RngStream::new(2);
            let mut traj = Vec::new();
            for _ in 0..50 {
                traj.push(o.play());
                let c: Vec<f64> = (0..3).map(|_| rng.uniform()).collect();
                let a: Vec<f64> = (0..3).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
                o.feedback(&c, &a).unwrap();
            }
            traj
        };
        assert_eq!(run(), run());
    }
}
