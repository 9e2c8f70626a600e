//! Binary lifting of `[0,1]^n` onto a submodular set function, online
//! discrete oracles, and the learner that plays their unlifted outputs.

use std::sync::Arc;

use rand::RngCore;

use crate::error::{check_dim, Error, Result};
use crate::function::DrFunction;
use crate::mfw::OnlineLearner;
use crate::rng::RngStream;

const IMAGE_TOL: f64 = 1e-12;

/// The lattice `{0, 2^{−M}, …, 1}^n` with ground set `n × (M+1)`; element
/// `(i, j)` carries weight `2^{−j}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BinaryLattice {
    n: usize,
    m: usize,
}

impl BinaryLattice {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if n == 0 || m == 0 || m > 52 {
            return Err(Error::InvalidArgument("binary lattice needs n >= 1 and 1 <= M <= 52".into()));
        }
        Ok(Self { n, m })
    }

    /// `⌈log2 T⌉`, at least 1.
    pub fn default_depth(horizon: usize) -> usize {
        let t = horizon.max(2);
        (usize::BITS - (t - 1).leading_zeros()) as usize
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.m
    }

    pub fn ground_size(&self) -> usize {
        self.n * (self.m + 1)
    }

    pub fn element(&self, coord: usize, bit: usize) -> usize {
        coord * (self.m + 1) + bit
    }

    fn block_value(&self, block: &[bool]) -> f64 {
        block
            .iter()
            .enumerate()
            .filter(|(_, b)| **b)
            .map(|(j, _)| 0.5f64.powi(j as i32))
            .sum()
    }

    pub fn lift(&self, x: &[f64]) -> Result<Vec<bool>> {
        check_dim(self.n, x.len())?;
        let top = 1u64 << self.m;
        let mut bits = Vec::with_capacity(self.ground_size());
        for (i, v) in x.iter().enumerate() {
            let scaled = v * top as f64;
            let k = scaled.round();
            if (scaled - k).abs() > 1e-9 || k < 0.0 || k > top as f64 {
                return Err(Error::OffLattice(format!("coordinate {i} = {v} with M = {}", self.m)));
            }
            let k = k as u64;
            if k == top {
                bits.push(true);
                bits.extend(std::iter::repeat_n(false, self.m));
            } else {
                bits.push(false);
                bits.extend((1..=self.m).map(|j| (k >> (self.m - j)) & 1 == 1));
            }
        }
        Ok(bits)
    }

    /// Whether every block encodes a value of at most 1.
    pub fn in_image(&self, bits: &[bool]) -> bool {
        bits.len() == self.ground_size()
            && bits
                .chunks(self.m + 1)
                .all(|b| self.block_value(b) <= 1.0 + IMAGE_TOL)
    }

    pub fn unlift(&self, bits: &[bool]) -> Result<Vec<f64>> {
        check_dim(self.ground_size(), bits.len())?;
        bits.chunks(self.m + 1)
            .enumerate()
            .map(|(i, b)| {
                let v = self.block_value(b);
                if v > 1.0 + IMAGE_TOL {
                    Err(Error::OffLattice(format!("block {i} encodes {v} > 1")))
                } else {
                    Ok(v)
                }
            })
            .collect()
    }

    /// Unlift with every block value capped at 1; used for sets outside the
    /// image of the lifting.
    pub fn unlift_clamped(&self, bits: &[bool]) -> Vec<f64> {
        bits.chunks(self.m + 1)
            .map(|b| self.block_value(b).min(1.0))
            .collect()
    }

    /// All lattice points, in lexicographic order of level indices.
    pub fn points(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        let side = (1usize << self.m) + 1;
        let total = side.pow(self.n as u32);
        let step = 1.0 / (1u64 << self.m) as f64;
        (0..total).map(move |mut idx| {
            let mut x = vec![0.0; self.n];
            for xi in x.iter_mut().rev() {
                *xi = (idx % side) as f64 * step;
                idx /= side;
            }
            x
        })
    }
}

pub trait SetFunction: Send + Sync {
    fn ground_size(&self) -> usize;
    fn value(&self, set: &[bool]) -> f64;
}

impl<S: SetFunction + ?Sized> SetFunction for Arc<S> {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }
    fn value(&self, set: &[bool]) -> f64 {
        (**self).value(set)
    }
}

/// `f̃(1_S) = F(unlift(1_S))`, evaluated lazily.
#[derive(Clone)]
pub struct SetFunctionView {
    f: Arc<dyn DrFunction>,
    lattice: BinaryLattice,
}

impl SetFunctionView {
    pub fn new(f: Arc<dyn DrFunction>, lattice: BinaryLattice) -> Result<Self> {
        check_dim(lattice.dim(), f.dim())?;
        Ok(Self { f, lattice })
    }

    pub fn lattice(&self) -> &BinaryLattice {
        &self.lattice
    }

    /// Rejects sets outside the image of the lifting.
    pub fn value_strict(&self, set: &[bool]) -> Result<f64> {
        Ok(self.f.value(&self.lattice.unlift(set)?))
    }
}

impl SetFunction for SetFunctionView {
    fn ground_size(&self) -> usize {
        self.lattice.ground_size()
    }

    /// Sets outside the image are evaluated at the clamped point.
    fn value(&self, set: &[bool]) -> f64 {
        self.f.value(&self.lattice.unlift_clamped(set))
    }
}

/// A weighted sum of set functions on one ground set.
pub struct SumSetFunction {
    ground: usize,
    parts: Vec<Arc<dyn SetFunction>>,
}

impl SumSetFunction {
    pub fn new(ground: usize, parts: Vec<Arc<dyn SetFunction>>) -> Result<Self> {
        for p in &parts {
            check_dim(ground, p.ground_size())?;
        }
        Ok(Self { ground, parts })
    }
}

impl SetFunction for SumSetFunction {
    fn ground_size(&self) -> usize {
        self.ground
    }
    fn value(&self, set: &[bool]) -> f64 {
        self.parts.iter().map(|p| p.value(set)).sum()
    }
}

pub const EXHAUSTIVE_LIMIT: usize = 12;
pub const SAMPLED_LIMIT: usize = 20;

/// Largest `[f(T∪k) − f(T)] − [f(S∪k) − f(S)]` over chains `S ⊆ T`,
/// `k ∉ T` with `T∪k` admissible. Exhaustive up to 12 elements, sampled
/// (`samples` chains) up to 20.
pub fn submodularity_violation(
    f: &dyn SetFunction,
    admissible: &dyn Fn(&[bool]) -> bool,
    samples: usize,
    rng: &mut RngStream,
) -> Result<f64> {
    let g = f.ground_size();
    if g > SAMPLED_LIMIT {
        return Err(Error::InvalidArgument(format!(
            "ground set of {g} elements exceeds {SAMPLED_LIMIT}"
        )));
    }
    let to_set = |mask: u32| -> Vec<bool> { (0..g).map(|e| mask >> e & 1 == 1).collect() };
    let mut worst = f64::NEG_INFINITY;
    let mut check = |s: u32, t: u32, k: usize| {
        let kb = 1u32 << k;
        let outer = f.value(&to_set(t | kb)) - f.value(&to_set(t));
        let inner = f.value(&to_set(s | kb)) - f.value(&to_set(s));
        worst = worst.max(outer - inner);
    };
    if g <= EXHAUSTIVE_LIMIT {
        for t in 0u32..(1 << g) {
            for k in (0..g).filter(|k| t >> k & 1 == 0) {
                if !admissible(&to_set(t | 1 << k)) {
                    continue;
                }
                let mut s = t;
                loop {
                    check(s, t, k);
                    if s == 0 {
                        break;
                    }
                    s = (s - 1) & t;
                }
            }
        }
    } else {
        let mut drawn = 0;
        let mut attempts = 0;
        while drawn < samples && attempts < samples * 100 {
            attempts += 1;
            let t = (rng.next_u64() as u32) & ((1 << g) - 1);
            let free: Vec<usize> = (0..g).filter(|k| t >> k & 1 == 0).collect();
            if free.is_empty() {
                continue;
            }
            let k = free[rng.index(free.len())];
            if !admissible(&to_set(t | 1 << k)) {
                continue;
            }
            let s = t & (rng.next_u64() as u32);
            check(s, t, k);
            drawn += 1;
        }
    }
    Ok(worst.max(0.0))
}


/// [`submodularity_violation`] restricted to the image of the lifting.
pub fn submodularity_bruteforce(
    view: &SetFunctionView,
    samples: usize,
    rng: &mut RngStream,
) -> Result<f64> {
    let lattice = *view.lattice();
    submodularity_violation(view, &|s| lattice.in_image(s), samples, rng)
}

/// Randomized double greedy sweeping the elements in index order.
pub fn double_greedy(f: &dyn SetFunction, rng: &mut RngStream) -> Result<Vec<bool>> {
    let order: Vec<usize> = (0..f.ground_size()).collect();
    double_greedy_ordered(f, &order, rng)
}

/// Double greedy with an explicit sweep order. Includes element `e` with
/// probability `a/(a+b)` for the clipped marginals `a` (adding to `A`) and
/// `b` (removing from `B`), and always when `a + b = 0`.
pub fn double_greedy_ordered(
    f: &dyn SetFunction,
    order: &[usize],
    rng: &mut RngStream,
) -> Result<Vec<bool>> {
    let g = f.ground_size();
    check_dim(g, order.len())?;
    let checked = |v: f64| -> Result<f64> {
        if v < -1e-9 || !v.is_finite() {
            Err(Error::InvalidArgument(format!("double greedy needs f >= 0, saw {v}")))
        } else {
            Ok(v)
        }
    };
    let mut a = vec![false; g];
    let mut b = vec![true; g];
    let mut fa = checked(f.value(&a))?;
    let mut fb = checked(f.value(&b))?;
    for &e in order {
        a[e] = true;
        let fa_plus = checked(f.value(&a))?;
        a[e] = false;
        b[e] = false;
        let fb_minus = checked(f.value(&b))?;
        b[e] = true;
        let gain_add = (fa_plus - fa).max(0.0);
        let gain_drop = (fb_minus - fb).max(0.0);
        let total = gain_add + gain_drop;
        let include = total == 0.0 || rng.uniform() * total < gain_add;
        if include {
            a[e] = true;
            fa = fa_plus;
        } else {
            b[e] = false;
            fb = fb_minus;
        }
    }
    Ok(a)
}

/// Online learner over subsets of a ground set.
pub trait DiscreteOracle: Send {
    fn ground_size(&self) -> usize;
    fn play(&mut self) -> Result<Vec<bool>>;
    fn feedback(&mut self, f: Arc<dyn SetFunction>) -> Result<()>;
}

/// Follow-the-leader: each round, double greedy on the sum of every set
/// function seen so far, with a fresh stream per round.
pub struct BaselineDiscreteOracle {
    ground: usize,
    history: Vec<Arc<dyn SetFunction>>,
    current: Vec<bool>,
    awaiting: bool,
    rng: RngStream,
}

impl BaselineDiscreteOracle {
    /// Starts from the empty set.
    pub fn new(ground: usize, rng: RngStream) -> Self {
        Self {
            ground,
            history: Vec::new(),
            current: vec![false; ground],
            awaiting: false,
            rng,
        }
    }
}

impl DiscreteOracle for BaselineDiscreteOracle {
    fn ground_size(&self) -> usize {
        self.ground
    }

    fn play(&mut self) -> Result<Vec<bool>> {
        self.awaiting = true;
        Ok(self.current.clone())
    }

    fn feedback(&mut self, f: Arc<dyn SetFunction>) -> Result<()> {
        if !self.awaiting {
            return Err(Error::Protocol("discrete feedback without a preceding play"));
        }
        check_dim(self.ground, f.ground_size())?;
        self.history.push(f);
        let total = SumSetFunction::new(self.ground, self.history.clone())?;
        let mut round_rng = self.rng.fork(self.history.len() as u64);
        self.current = double_greedy(&total, &mut round_rng)?;
        self.awaiting = false;
        Ok(())
    }
}

/// Plays the unlifted output of a discrete oracle fed the lifted objectives.
pub struct HypercubeLearner<O: DiscreteOracle> {
    lattice: BinaryLattice,
    oracle: O,
    current: Option<Vec<f64>>,
    clamped_rounds: usize,
    round: usize,
}

impl<O: DiscreteOracle> HypercubeLearner<O> {
    pub fn new(lattice: BinaryLattice, oracle: O) -> Result<Self> {
        check_dim(lattice.ground_size(), oracle.ground_size())?;
        Ok(Self {
            lattice,
            oracle,
            current: None,
            clamped_rounds: 0,
            round: 0,
        })
    }

    pub fn lattice(&self) -> &BinaryLattice {
        &self.lattice
    }

    /// Rounds whose oracle output fell outside the lifting's image.
    pub fn clamped_rounds(&self) -> usize {
        self.clamped_rounds
    }
}

impl HypercubeLearner<BaselineDiscreteOracle> {
    pub fn baseline(n: usize, depth: usize, rng: RngStream) -> Result<Self> {
        let lattice = BinaryLattice::new(n, depth)?;
        Self::new(lattice, BaselineDiscreteOracle::new(lattice.ground_size(), rng))
    }
}

impl<O: DiscreteOracle> OnlineLearner for HypercubeLearner<O> {
    fn dim(&self) -> usize {
        self.lattice.dim()
    }

    fn play(&mut self) -> Result<Vec<f64>> {
        if let Some(x) = &self.current {
            return Ok(x.clone());
        }
        let bits = self.oracle.play()?;
        if !self.lattice.in_image(&bits) {
            self.clamped_rounds += 1;
        }
        let x = self.lattice.unlift_clamped(&bits);
        self.current = Some(x.clone());
        Ok(x)
    }

    fn feedback(&mut self, f: &Arc<dyn DrFunction>) -> Result<f64> {
        let x = self
            .current
            .take()
            .ok_or(Error::Protocol("feedback without a preceding play"))?;
        let view = SetFunctionView::new(f.clone(), self.lattice)?;
        self.oracle.feedback(Arc::new(view))?;
        self.round += 1;
        Ok(f.value(&x))
    }
}
