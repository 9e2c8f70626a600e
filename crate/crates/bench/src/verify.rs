use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use drsub_core::checks::{
    concavity_violation, dr_check, grad_check, join_lower_bound_violation, join_meet_violation, DR_TOL, GRAD_TOL,
};
use drsub_core::function::{DrFunction, LinearFunction};
use drsub_core::hypercube::{
    double_greedy, submodularity_bruteforce, BinaryLattice, SetFunction, SetFunctionView,
};
use drsub_core::instances::{
    gen_random_graph, parse_edge_list, Graph, NoisyGradient, QuadraticInstance, RevenueInstance,
};
use drsub_core::lift::{caratheodory_decompose, LiftedBody, LiftedPoint, UnaryLattice};
use drsub_core::mfw::{
    coordinate_slack, infinity_norm_slack, GradientAverager, MfwConfig, MfwDownClosed, MfwGeneral, OnlineLearner,
    StepSchedule, KAPPA,
};
use drsub_core::oracles::OloKind;
use drsub_core::{vector, ConvexBody, RngStream};

use crate::config::{BodySpec, ExperimentConfig};
use crate::error::{BenchError, BenchResult};
use crate::stream::build_stream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Core,
    Lift,
    Mfw,
    Hypercube,
    Instances,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Core => "core",
            Suite::Lift => "lift",
            Suite::Mfw => "mfw",
            Suite::Hypercube => "hypercube",
            Suite::Instances => "instances",
            Suite::All => "all",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub violation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when `violation ≤ tolerance`.
    pub fn new(name: impl Into<String>, violation: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            violation,
            tolerance,
            passed: violation <= tolerance,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<44} max violation {:>10.3e} (tol {:.1e})",
            if self.passed { "ok  " } else { "FAIL" },
            self.name,
            self.violation,
            self.tolerance
        )
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

const SEED: u64 = 20_240_601;

/// Revenue and quadratic instances used by the property suites.
pub fn sample_instances(seed: u64) -> BenchResult<Vec<(String, Arc<dyn DrFunction>)>> {
    let mut rng = RngStream::new(seed);
    let mut out: Vec<(String, Arc<dyn DrFunction>)> = Vec::new();
    for (n, p) in [(12, 0.01), (8, 0.3), (6, 0.5)] {
        let g = Arc::new(gen_random_graph(n, 0.4, (0.5, 1.5), seed + n as u64)?);
        out.push((format!("revenue n={n} p={p}"), Arc::new(RevenueInstance::new(g, p)?)));
    }
    for n in [3, 6, 10] {
        out.push((format!("quadratic n={n}"), Arc::new(QuadraticInstance::random(n, &mut rng)?)));
    }
    Ok(out)
}

/// Diminishing-returns and finite-difference gradient checks.
pub fn dr_gradient_checks(trials: usize, seed: u64) -> BenchResult<Vec<Check>> {
    let mut rng = RngStream::new(seed);
    let mut out = Vec::new();
    for (name, f) in sample_instances(seed)? {
        let rep = dr_check(f.as_ref(), trials, &mut rng);
        out.push(Check::new(
            format!("dr {name}"),
            rep.max_return_violation.max(rep.max_gradient_violation),
            DR_TOL,
        ));
        let mut worst = 0.0_f64;
        for _ in 0..20 {
            let x: Vec<f64> = (0..f.dim()).map(|_| rng.uniform_in(0.01, 0.99)).collect();
            worst = worst.max(grad_check(f.as_ref(), &x, 1e-5)?);
        }
        out.push(Check::new(format!("gradient {name}"), worst, GRAD_TOL));
    }
    Ok(out)
}

/// Concavity along non-negative directions and the two join inequalities.
pub fn structural_checks(pairs: usize, seed: u64) -> BenchResult<Vec<Check>> {
    let mut rng = RngStream::new(seed);
    let mut out = Vec::new();
    for (name, f) in sample_instances(seed)? {
        let f = f.as_ref();
        out.push(Check::new(format!("concave upward {name}"), concavity_violation(f, pairs, &mut rng), DR_TOL));
        out.push(Check::new(format!("join-meet {name}"), join_meet_violation(f, pairs, &mut rng), DR_TOL));
        out.push(Check::new(
            format!("join lower bound {name}"),
            join_lower_bound_violation(f, pairs, &mut rng),
            DR_TOL,
        ));
    }
    Ok(out)
}

fn level_tuples(n: usize, m: usize) -> Vec<Vec<usize>> {
    let side = m + 1;
    (0..side.pow(n as u32))
        .map(|mut idx| {
            let mut v = vec![0; n];
            for l in v.iter_mut() {
                *l = idx % side;
                idx /= side;
            }
            v
        })
        .collect()
}

/// Exhaustive unary (`n=2, M=4`) and binary (`n=2, M=3`) round trips.
/// The violation is the number of mismatches.
pub fn round_trip_checks() -> BenchResult<Vec<Check>> {
    let unary = UnaryLattice::new(2, 4)?;
    let mut bad = 0usize;
    for levels in level_tuples(2, 4) {
        let p = LiftedPoint::from_levels(4, levels)?;
        let x = unary.unlift(&p)?;
        bad += (unary.lift(&x)? != p) as usize;
        let bits = p.bits();
        bad += (LiftedPoint::from_bits(2, 4, &bits)? != p) as usize;
    }
    let binary = BinaryLattice::new(2, 3)?;
    let g = binary.ground_size();
    for x in binary.points() {
        bad += (binary.unlift(&binary.lift(&x)?)? != x) as usize;
    }
    for mask in 0u32..(1 << g) {
        let bits: Vec<bool> = (0..g).map(|e| mask >> e & 1 == 1).collect();
        if binary.in_image(&bits) {
            let x = binary.unlift(&bits)?;
            bad += (binary.unlift(&binary.lift(&x)?)? != x) as usize;
        }
    }
    Ok(vec![Check::new("lattice round trips", bad as f64, 0.0)])
}

/// `⟨a, c̄⟩ = ⟨ã, 1_C⟩` and `⟨a, c̄ ∨ x⟩ = ⟨ã, 1_C ∨ 1_X⟩` on random cases.
pub fn lifting_identity_checks(cases: usize, seed: u64) -> BenchResult<Vec<Check>> {
    let mut rng = RngStream::new(seed);
    let (mut linear, mut vee) = (0.0_f64, 0.0_f64);
    for _ in 0..cases {
        let n = 1 + rng.index(6);
        let m = 1 + rng.index(6);
        let lat = UnaryLattice::new(n, m)?;
        let a: Vec<f64> = (0..n).map(|_| rng.uniform_in(-2.0, 2.0)).collect();
        let c = lat.snap(&(0..n).map(|_| rng.uniform()).collect::<Vec<_>>());
        let x = lat.snap(&(0..n).map(|_| rng.uniform()).collect::<Vec<_>>());
        let ta = lat.lift_reward(&a);
        let (lc, lx) = (lat.lift(&c)?, lat.lift(&x)?);
        linear = linear.max((vector::dot(&a, &c) - lc.dot(&ta)).abs());
        let joined = vector::join(&c, &x);
        vee = vee.max((vector::dot(&a, &joined) - lc.join(&lx).dot(&ta)).abs());
    }
    Ok(vec![
        Check::new("lifted linear reward", linear, 1e-12),
        Check::new("lifted vee reward", vee, 1e-12),
    ])
}

/// Random relaxed staircase point of the `n × M` hypercube lift.
pub fn random_staircase(n: usize, m: usize, rng: &mut RngStream) -> Vec<f64> {
    let mut y = Vec::with_capacity(n * m);
    for _ in 0..n {
        let mut block: Vec<f64> = (0..m).map(|_| rng.uniform()).collect();
        block.sort_by(|a, b| b.total_cmp(a));
        y.extend(block);
    }
    y
}

/// Rounding accuracy on random points and the sampling frequency on one.
pub fn caratheodory_checks(points: usize, eps: f64, draws: usize, seed: u64) -> BenchResult<Vec<Check>> {
    let (n, m) = (4, 4);
    let body = LiftedBody::new(UnaryLattice::new(n, m)?, ConvexBody::hypercube(n)?)?;
    let mut rng = RngStream::new(seed);
    let mut worst_gap = 0.0_f64;
    let mut worst_mean = 0.0_f64;
    for _ in 0..points {
        let y = random_staircase(n, m, &mut rng);
        let d = caratheodory_decompose(&body, &y, eps, drsub_core::lift::DEFAULT_CARATHEODORY_CONSTANT)?;
        worst_gap = worst_gap.max(d.gap);
        worst_mean = worst_mean.max(vector::dist(&d.mean(), &y));
    }
    let y = random_staircase(n, m, &mut rng);
    let d = caratheodory_decompose(&body, &y, eps, drsub_core::lift::DEFAULT_CARATHEODORY_CONSTANT)?;
    let mean = d.mean();
    let mut acc = vec![0.0; mean.len()];
    for _ in 0..draws {
        vector::axpy(1.0, &d.sample(&mut rng).to_dense(), &mut acc);
    }
    let empirical = vector::scale(&acc, 1.0 / draws as f64);
    Ok(vec![
        Check::new("rounding gap", worst_gap.max(worst_mean), eps),
        Check::new("rounding sample mean (inf-norm)", vector::norm_inf(&vector::sub(&empirical, &mean)), 0.02),
    ])
}

/// Lifted linear maximization against enumeration of lattice points.
pub fn lifted_oracle_check(trials: usize, seed: u64) -> BenchResult<Check> {
    let mut rng = RngStream::new(seed);
    let mut worst = 0.0_f64;
    for _ in 0..trials {
        let (n, m) = (3, 3);
        let budget = rng.uniform_in(0.2, 2.5);
        let base = ConvexBody::uniform_budget(n, budget)?;
        let body = LiftedBody::new(UnaryLattice::new(n, m)?, base.clone())?;
        let w: Vec<f64> = (0..n * m).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
        let got = body.vertex_maximize(&w)?.dot(&w);
        let best = level_tuples(n, m)
            .into_iter()
            .map(|l| LiftedPoint::from_levels(m, l).expect("levels in range"))
            .filter(|p| {
                let x: Vec<f64> = p.levels().iter().map(|&l| l as f64 / m as f64).collect();
                base.contains(&x).unwrap_or(false)
            })
            .map(|p| p.dot(&w))
            .fold(f64::NEG_INFINITY, f64::max);
        worst = worst.max((best - got).abs());
    }
    Ok(Check::new("lifted oracle vs enumeration", worst, 1e-12))
}

fn revenue_config(body: BodySpec, horizon: usize, levels: usize) -> ExperimentConfig {
    ExperimentConfig {
        body,
        horizon,
        levels: Some(levels),
        oracle: crate::config::OracleChoice::Leader,
        replicas: 1,
        timing: false,
        ..Default::default()
    }
}

/// Smallest sup-norm slack of a down-closed run, measured against the
/// reference `η = 1/L` schedule. `schedule` overrides the engine's steps.
pub fn down_closed_slack(
    horizon: usize,
    levels: usize,
    schedule: Option<StepSchedule>,
    seed: u64,
) -> BenchResult<f64> {
    let cfg = revenue_config(BodySpec::Budget { budget: 1.0 }, horizon, levels);
    let master = RngStream::new(seed);
    let stream = build_stream(&cfg, master.fork(1))?;
    let body = cfg.body.build(stream.dim)?;
    let mfw = MfwConfig {
        levels,
        horizon,
        gradient_bound: stream.gradient_bound,
        oracle: OloKind::PerturbedLeader,
        granularity: None,
    };
    let reference = StepSchedule::uniform(levels)?;
    let schedule = schedule.unwrap_or_else(|| reference.clone());
    let mut engine = MfwDownClosed::with_schedule(body, mfw, schedule, master.fork(2))?;
    let mut worst = f64::INFINITY;
    for f in &stream.revealed {
        engine.play()?;
        worst = worst.min(infinity_norm_slack(engine.last_trace(), reference.eta()));
        engine.feedback(f)?;
    }
    Ok(worst)
}

/// Runs the down-closed engine with `η = 2/L` and reports whether the
/// sup-norm bound or the feasibility assertion rejects it.
pub fn doubled_steps_caught(seed: u64) -> BenchResult<bool> {
    let doubled = StepSchedule::custom(vec![2.0 / 16.0; 16])?;
    match down_closed_slack(20, 16, Some(doubled), seed) {
        Ok(slack) => Ok(slack < -1e-12),
        Err(BenchError::Core(drsub_core::Error::Internal(_))) => Ok(true),
        Err(e) => Err(e),
    }
}

/// Smallest per-coordinate slack of a general-body run over `Σx ∈ [0.1, 1]`.
pub fn general_slack(horizon: usize, levels: usize, seed: u64) -> BenchResult<f64> {
    let cfg = revenue_config(
        BodySpec::Band {
            min_total: 0.1,
            max_total: 1.0,
        },
        horizon,
        levels,
    );
    let master = RngStream::new(seed);
    let stream = build_stream(&cfg, master.fork(1))?;
    let body = cfg.body.build(stream.dim)?;
    let mfw = MfwConfig {
        levels,
        horizon,
        gradient_bound: stream.gradient_bound,
        oracle: OloKind::PerturbedLeader,
        granularity: None,
    };
    let mut engine = MfwGeneral::new(body, mfw, master.fork(2))?;
    let eta = engine.schedule().eta().to_vec();
    let mut worst = f64::INFINITY;
    for f in &stream.revealed {
        engine.play()?;
        worst = worst.min(coordinate_slack(engine.last_trace(), &eta));
        engine.feedback(f)?;
    }
    Ok(worst)
}

/// Synthetic momentum-averaging harness. Returns the largest
/// `E‖a_ℓ − d_ℓ‖² − 2Q/(ℓ+s+1)^{2/3}` over `ℓ ≥ 5`.
pub fn variance_reduction_excess(c: f64, sigma: f64, s: usize, levels: usize, seeds: usize) -> BenchResult<f64> {
    let n = 5;
    let rho: Vec<f64> = (1..=levels)
        .map(|l| 2.0 / ((l + s) as f64).powf(2.0 / 3.0))
        .collect();
    let mut err = vec![0.0; levels + 1];
    for seed in 0..seeds {
        let mut rng = RngStream::new(SEED + seed as u64);
        let mut a: Vec<f64> = (0..n).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
        let norm = vector::norm(&a);
        a = vector::scale(&a, 1.0 / norm);
        let mut avg = GradientAverager::new(n, rho.clone());
        err[0] += vector::norm(&a).powi(2);
        for l in 1..=levels {
            let mut u: Vec<f64> = (0..n).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
            let un = vector::norm(&u).max(1e-12);
            u = vector::scale(&u, c / ((l + 3) as f64 * un));
            a = vector::add(&a, &u);
            let noisy = NoisyGradient::new(LinearFunction::new(a.clone()), sigma);
            let g = noisy.stochastic_gradient(&vec![0.0; n], &mut rng);
            let d = avg.step(&g)?;
            err[l] += vector::dist(&a, d).powi(2);
        }
    }
    let err: Vec<f64> = err.iter().map(|e| e / seeds as f64).collect();
    let q = (err[0] * ((s + 1) as f64).powf(2.0 / 3.0)).max(4.0 * sigma * sigma + 1.5 * c * c);
    Ok((5..=levels)
        .map(|l| err[l] - 2.0 * q / ((l + s + 1) as f64).powf(2.0 / 3.0))
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Non-negative symmetric cut function of a weighted graph.
struct CutFunction(Graph);

impl SetFunction for CutFunction {
    fn ground_size(&self) -> usize {
        self.0.vertex_count()
    }

    fn value(&self, set: &[bool]) -> f64 {
        self.0
            .edges()
            .iter()
            .filter(|(u, v, _)| set[*u] != set[*v])
            .map(|(_, _, w)| w)
            .sum()
    }
}

/// Largest `½·OPT − E[f(double greedy)]` over random cut functions on 8
/// elements; the expectation is estimated from `draws` runs.
pub fn double_greedy_shortfall(instances: usize, draws: usize, seed: u64) -> BenchResult<f64> {
    let mut rng = RngStream::new(seed);
    let mut worst = f64::NEG_INFINITY;
    for i in 0..instances {
        let f = CutFunction(gen_random_graph(8, 0.5, (0.1, 2.0), seed + i as u64)?);
        let opt = (0u32..256)
            .map(|mask| f.value(&(0..8).map(|e| mask >> e & 1 == 1).collect::<Vec<_>>()))
            .fold(0.0, f64::max);
        let mut total = 0.0;
        for _ in 0..draws {
            total += f.value(&double_greedy(&f, &mut rng)?);
        }
        worst = worst.max(0.5 * opt - total / draws as f64);
    }
    Ok(worst)
}

fn core_suite(out: &mut Vec<Check>) -> BenchResult<()> {
    out.extend(dr_gradient_checks(1000, SEED)?);
    out.extend(structural_checks(1000, SEED + 1)?);
    Ok(())
}

fn lift_suite(out: &mut Vec<Check>) -> BenchResult<()> {
    out.extend(round_trip_checks()?);
    out.extend(lifting_identity_checks(1000, SEED)?);
    out.push(lifted_oracle_check(200, SEED)?);
    out.extend(caratheodory_checks(100, 0.05, 10_000, SEED)?);
    Ok(())
}

fn mfw_suite(out: &mut Vec<Check>) -> BenchResult<()> {
    let uniform: f64 = StepSchedule::uniform(16)?.eta().iter().sum();
    let harmonic: f64 = StepSchedule::harmonic(16)?.eta().iter().sum();
    out.push(Check::new("uniform step sum is 1", (uniform - 1.0).abs(), 1e-12));
    out.push(Check::new("harmonic step sum is ln3/2", (harmonic - KAPPA).abs(), 1e-12));
    out.push(Check::new("sup-norm bound, down-closed", -down_closed_slack(200, 16, None, SEED)?, 1e-12));
    out.push(Check::new("coordinate bound, general", -general_slack(200, 16, SEED)?, 1e-12));
    out.push(Check::new("doubled steps are caught", !doubled_steps_caught(SEED)? as u8 as f64, 0.0));
    out.push(Check::new("momentum averaging error", variance_reduction_excess(1.0, 0.5, 3, 200, 100)?, 0.0));
    Ok(())
}

fn hypercube_suite(out: &mut Vec<Check>) -> BenchResult<()> {
    let mut rng = RngStream::new(SEED);
    let pair = Arc::new(Graph::from_edges(2, &[(0, 1, 1.0)])?);
    let mut worst = 0.0_f64;
    for p in [0.01, 0.3, 0.5] {
        let f: Arc<dyn DrFunction> = Arc::new(RevenueInstance::new(pair.clone(), p)?);
        let view = SetFunctionView::new(f, BinaryLattice::new(2, 2)?)?;
        worst = worst.max(submodularity_bruteforce(&view, 0, &mut rng)?);
    }
    for n in [2, 3] {
        let g = Arc::new(gen_random_graph(n, 0.8, (0.5, 1.5), SEED)?);
        let f: Arc<dyn DrFunction> = Arc::new(RevenueInstance::new(g, 0.4)?);
        let view = SetFunctionView::new(f, BinaryLattice::new(n, 2)?)?;
        worst = worst.max(submodularity_bruteforce(&view, 2000, &mut rng)?);
    }
    out.push(Check::new("lifted revenue submodularity", worst, 1e-9));
    out.push(Check::new("double greedy half of optimum", double_greedy_shortfall(20, 400, SEED)?, 0.0));
    Ok(())
}

fn instances_suite(out: &mut Vec<Check>) -> BenchResult<()> {
    let text = "0 1 1.0\n1 2 0.5\n# comment\n0 1 0.25\n2 3\n";
    let g = parse_edge_list(text.as_bytes())?;
    let expected = Graph::from_edges(4, &[(0, 1, 1.25), (1, 2, 0.5), (2, 3, 1.0)])?;
    let mismatch = (g.edges() != expected.edges() || g.vertex_count() != 4) as usize;
    out.push(Check::new("edge-list parsing", mismatch as f64, 0.0));
    let mut rng = RngStream::new(SEED);
    let (mut grad, mut smooth, mut neg) = (0.0_f64, 0.0_f64, 0.0_f64);
    for (_, f) in sample_instances(SEED)? {
        let params = f.params().expect("instances declare their constants");
        let n = f.dim();
        for _ in 0..500 {
            let x: Vec<f64> = (0..n).map(|_| rng.uniform()).collect();
            let y: Vec<f64> = (0..n).map(|_| rng.uniform()).collect();
            let gx = f.gradient(&x);
            grad = grad.max(vector::norm(&gx) - params.lipschitz);
            let lip = vector::dist(&gx, &f.gradient(&y)) - params.smoothness * vector::dist(&x, &y);
            smooth = smooth.max(lip);
            neg = neg.max(-f.value(&x));
        }
    }
    out.push(Check::new("declared gradient bound", grad, 1e-9));
    out.push(Check::new("declared smoothness", smooth, 1e-9));
    out.push(Check::new("non-negativity", neg, 1e-12));
    let noisy = NoisyGradient::new(LinearFunction::new(vec![0.3, -0.2, 0.1, 0.0]), 0.5);
    let mut mean = vec![0.0; 4];
    let mut var = 0.0;
    let draws = 20_000;
    for _ in 0..draws {
        let g = noisy.stochastic_gradient(&[0.5; 4], &mut rng);
        var += vector::dist(&g, &[0.3, -0.2, 0.1, 0.0]).powi(2);
        vector::axpy(1.0 / draws as f64, &g, &mut mean);
    }
    let bias = vector::dist(&mean, &[0.3, -0.2, 0.1, 0.0]);
    out.push(Check::new("noisy gradient bias", bias, 0.02));
    out.push(Check::new("noisy gradient variance", (var / draws as f64 - 0.25).abs(), 0.02));
    Ok(())
}

pub fn run_suite(suite: Suite) -> BenchResult<Report> {
    let mut checks = Vec::new();
    let all = suite == Suite::All;
    if all || suite == Suite::Core {
        core_suite(&mut checks)?;
    }
    if all || suite == Suite::Lift {
        lift_suite(&mut checks)?;
    }
    if all || suite == Suite::Mfw {
        mfw_suite(&mut checks)?;
    }
    if all || suite == Suite::Hypercube {
        hypercube_suite(&mut checks)?;
    }
    if all || suite == Suite::Instances {
        instances_suite(&mut checks)?;
    }
    Ok(Report { checks })
}
