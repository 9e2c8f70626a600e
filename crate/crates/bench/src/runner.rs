use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use drsub_core::hypercube::{BinaryLattice, HypercubeLearner};
use drsub_core::lift::UnaryLattice;
use drsub_core::mfw::{
    default_levels_down_closed, default_levels_general, DoublingLearner, MfwConfig, MfwDownClosed, MfwGeneral,
    OnlineLearner, LEVEL_CAP,
};
use drsub_core::{ConvexBody, RngStream};

use crate::config::{Algorithm, ExperimentConfig};
use crate::error::BenchResult;
use crate::hindsight::{compute_hindsight, Comparator};
use crate::stream::{build_stream, FunctionStream};

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundRecord {
    pub t: usize,
    pub reward: f64,
    pub cum_reward: f64,
    pub comparator_cum: f64,
    pub ratio: f64,
    pub elapsed_ms: f64,
}

/// Parameters filled in from defaults, recorded in the metadata.
#[derive(Debug, Clone, Serialize)]
pub struct ResolvedParams {
    pub dim: usize,
    pub levels: Option<usize>,
    pub level_cap: usize,
    /// Unary granularity (vee oracles) or binary depth (hypercube).
    pub granularity: Option<usize>,
    pub rounding_epsilon: Option<f64>,
    pub step_schedule: &'static str,
    pub rho_rule: &'static str,
    pub gradient_bound: f64,
    pub initial_point: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReplicaOutcome {
    pub replica: usize,
    pub stream_seed: u64,
    pub algorithm_seed: u64,
    pub records: Vec<RoundRecord>,
    pub comparator: Comparator,
    pub final_ratio: f64,
    /// Rows whose ratio was defined by the 0/0 rule.
    pub degenerate_rows: usize,
    pub params: ResolvedParams,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentOutcome {
    pub replicas: Vec<ReplicaOutcome>,
    pub mean_final_ratio: f64,
    pub std_final_ratio: f64,
}

/// `cum / comparator`, or 1 when the comparator total is not positive.
pub fn ratio(cum: f64, comparator_cum: f64) -> (f64, bool) {
    if comparator_cum > 0.0 {
        (cum / comparator_cum, false)
    } else {
        (1.0, true)
    }
}

pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len().max(1) as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

pub fn build_learner(
    cfg: &ExperimentConfig,
    body: &ConvexBody,
    dim: usize,
    gradient_bound: f64,
    rng: RngStream,
) -> BenchResult<(Box<dyn OnlineLearner>, ResolvedParams)> {
    let t = cfg.horizon;
    let oracle = cfg.oracle.into();
    let mut params = ResolvedParams {
        dim,
        levels: None,
        level_cap: LEVEL_CAP,
        granularity: None,
        rounding_epsilon: None,
        step_schedule: "",
        rho_rule: "2/(l+3)^(2/3)",
        gradient_bound,
        initial_point: "",
    };
    let learner: Box<dyn OnlineLearner> = match cfg.algorithm {
        Algorithm::DownClosed => {
            let levels = cfg.levels.unwrap_or_else(|| default_levels_down_closed(t));
            let m = cfg.granularity.unwrap_or_else(|| UnaryLattice::default_granularity(t, dim));
            params.levels = Some(levels);
            params.granularity = Some(m);
            params.rounding_epsilon = Some(1.0 / (t as f64).sqrt());
            params.step_schedule = "uniform 1/L";
            params.initial_point = "x_1 = 0 every round; vee oracles start at 0";
            let mfw = MfwConfig {
                levels,
                horizon: t,
                gradient_bound,
                oracle,
                granularity: Some(m),
            };
            Box::new(MfwDownClosed::new(body.clone(), mfw, rng)?)
        }
        Algorithm::General => {
            let levels = cfg.levels.unwrap_or_else(|| default_levels_general(t));
            params.levels = Some(levels);
            params.step_schedule = "harmonic ln3/(2 l H_L)";
            params.initial_point = "x_1 = min-inf-norm point every round";
            let mfw = MfwConfig {
                levels,
                horizon: t,
                gradient_bound,
                oracle,
                granularity: None,
            };
            Box::new(MfwGeneral::new(body.clone(), mfw, rng)?)
        }
        Algorithm::Hypercube => {
            let depth = cfg.granularity.unwrap_or_else(|| BinaryLattice::default_depth(t));
            params.granularity = Some(depth);
            params.step_schedule = "none";
            params.rho_rule = "none";
            params.initial_point = "x_1 = 0 (empty set)";
            Box::new(HypercubeLearner::baseline(dim, depth, rng)?)
        }
        Algorithm::DoublingDownClosed | Algorithm::DoublingGeneral => {
            let cap = cfg.levels.unwrap_or(LEVEL_CAP);
            let down = cfg.algorithm == Algorithm::DoublingDownClosed;
            params.level_cap = cap;
            params.step_schedule = if down {
                "doubling phases, uniform 1/L, L = min(2^(m+1), cap)"
            } else {
                "doubling phases, harmonic, L = min(2^(m+1), cap)"
            };
            params.initial_point = if down { "x_1 = 0" } else { "x_1 = min-inf-norm point" };
            let body = body.clone();
            let granularity = cfg.granularity;
            let factory = move |m: usize, levels: usize, len: usize| -> drsub_core::Result<Box<dyn OnlineLearner>> {
                let phase_rng = rng.fork(m as u64);
                let mfw = MfwConfig {
                    levels,
                    horizon: len,
                    gradient_bound,
                    oracle,
                    granularity,
                };
                Ok(if down {
                    Box::new(MfwDownClosed::new(body.clone(), mfw, phase_rng)?)
                } else {
                    Box::new(MfwGeneral::new(body.clone(), mfw, phase_rng)?)
                })
            };
            Box::new(DoublingLearner::with_level_cap(dim, cap, Box::new(factory)))
        }
    };
    Ok((learner, params))
}

/// Plays the whole stream and returns the per-round rewards and plays.
pub fn drive(
    learner: &mut dyn OnlineLearner,
    stream: &FunctionStream,
    timing: bool,
) -> BenchResult<(Vec<f64>, Vec<Vec<f64>>, Vec<f64>)> {
    let start = Instant::now();
    let mut rewards = Vec::with_capacity(stream.revealed.len());
    let mut plays = Vec::with_capacity(stream.revealed.len());
    let mut elapsed = Vec::with_capacity(stream.revealed.len());
    for f in &stream.revealed {
        plays.push(learner.play()?);
        rewards.push(learner.feedback(f)?);
        elapsed.push(if timing {
            start.elapsed().as_secs_f64() * 1e3
        } else {
            0.0
        });
    }
    Ok((rewards, plays, elapsed))
}

pub fn run_replica(cfg: &ExperimentConfig, replica: usize) -> BenchResult<ReplicaOutcome> {
    let master = RngStream::new(cfg.seed);
    let stream_rng = master.fork(1000 + replica as u64);
    let algo_rng = master.fork(2000 + replica as u64);
    let mut hindsight_rng = master.fork(3000 + replica as u64);
    let stream = build_stream(cfg, stream_rng.clone())?;
    let body = cfg.body.build(stream.dim)?;
    let (mut learner, params) = build_learner(cfg, &body, stream.dim, stream.gradient_bound, algo_rng.clone())?;
    let (rewards, plays, elapsed) = drive(learner.as_mut(), &stream, cfg.timing)?;
    let total = stream.aggregate()?;
    let comparator = compute_hindsight(&total, &body, &plays, &cfg.hindsight, &mut hindsight_rng)?;
    let mut records = Vec::with_capacity(rewards.len());
    let (mut cum, mut comp, mut degenerate) = (0.0, 0.0, 0);
    for (i, f) in stream.exact.iter().enumerate() {
        cum += rewards[i];
        comp += drsub_core::DrFunction::value(f, &comparator.point);
        let (r, flag) = ratio(cum, comp);
        degenerate += flag as usize;
        records.push(RoundRecord {
            t: i + 1,
            reward: rewards[i],
            cum_reward: cum,
            comparator_cum: comp,
            ratio: r,
            elapsed_ms: elapsed[i],
        });
    }
    let final_ratio = records.last().map_or(1.0, |r| r.ratio);
    log::info!("replica {replica}: final ratio {final_ratio:.4}");
    Ok(ReplicaOutcome {
        replica,
        stream_seed: stream_rng.seed(),
        algorithm_seed: algo_rng.seed(),
        records,
        comparator,
        final_ratio,
        degenerate_rows: degenerate,
        params,
    })
}

pub fn run_experiment(cfg: &ExperimentConfig) -> BenchResult<ExperimentOutcome> {
    cfg.validate()?;
    let replicas = (0..cfg.replicas)
        .into_par_iter()
        .map(|r| run_replica(cfg, r))
        .collect::<BenchResult<Vec<_>>>()?;
    let finals: Vec<f64> = replicas.iter().map(|r| r.final_ratio).collect();
    let (mean, std) = mean_std(&finals);
    Ok(ExperimentOutcome {
        replicas,
        mean_final_ratio: mean,
        std_final_ratio: std,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{BodySpec, InstanceSpec};

    #[test]
    fn zero_stream_ratio_one() {
        let cfg = ExperimentConfig {
            instance: InstanceSpec::Zero { n: 3 },
            horizon: 5,
            replicas: 1,
            timing: false,
            ..Default::default()
        };
        let out = run_experiment(&cfg).unwrap();
        let rep = &out.replicas[0];
        assert!(rep.records.iter().all(|r| r.reward == 0.0 && r.ratio == 1.0));
        assert_eq!(rep.degenerate_rows, 5);
    }

    #[test]
    fn prefix_sums_exact() {
        let cfg = ExperimentConfig {
            horizon: 20,
            replicas: 1,
            levels: Some(4),
            timing: false,
            ..Default::default()
        };
        let rep = run_replica(&cfg, 0).unwrap();
        let mut cum = 0.0;
        for r in &rep.records {
            cum += r.reward;
            assert_eq!(cum, r.cum_reward);
            assert_eq!(r.ratio, r.cum_reward / r.comparator_cum);
        }
    }

    #[test]
    fn linear_stream_ratio_grows() {
        let ratio_at = |t: usize| {
            let cfg = ExperimentConfig {
                instance: InstanceSpec::Linear {
                    weights: vec![1.0, 0.4, -0.5],
                },
                body: BodySpec::Budget { budget: 1.0 },
                horizon: t,
                replicas: 1,
                levels: Some(8),
                timing: false,
                ..Default::default()
            };
            run_replica(&cfg, 0).unwrap().final_ratio
        };
        let (short, long) = (ratio_at(20), ratio_at(400));
        assert!(long > short, "{short} {long}");
    }
}
