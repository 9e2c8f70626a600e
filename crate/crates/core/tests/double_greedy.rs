use drsub_core::hypercube::{double_greedy, double_greedy_ordered, SetFunction};
use drsub_core::instances::{gen_random_graph, Graph};
use drsub_core::RngStream;

struct Cut(Graph);

impl SetFunction for Cut {
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

/// `g(S) = f(π⁻¹ S)`: element `i` of `f` is element `π[i]` of `g`.
struct Relabeled<'a> {
    f: &'a dyn SetFunction,
    perm: Vec<usize>,
}

impl Relabeled<'_> {
    fn pull(&self, set: &[bool]) -> Vec<bool> {
        self.perm.iter().map(|&p| set[p]).collect()
    }
}

impl SetFunction for Relabeled<'_> {
    fn ground_size(&self) -> usize {
        self.f.ground_size()
    }
    fn value(&self, set: &[bool]) -> f64 {
        self.f.value(&self.pull(set))
    }
}

fn mask(set: &[bool]) -> usize {
    set.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| 1 << i).sum()
}

#[test]
fn half_of_optimum_in_expectation() {
    let mut rng = RngStream::new(1);
    for seed in 0..200 {
        let f = Cut(gen_random_graph(8, 0.5, (0.1, 2.0), seed).unwrap());
        let opt = (0..256usize)
            .map(|m| f.value(&(0..8).map(|e| m >> e & 1 == 1).collect::<Vec<_>>()))
            .fold(0.0, f64::max);
        let draws = 200;
        let mean = (0..draws)
            .map(|_| f.value(&double_greedy(&f, &mut rng).unwrap()))
            .sum::<f64>()
            / draws as f64;
        assert!(mean >= 0.5 * opt - 0.02 * opt.max(1e-12), "seed {seed}: {mean} vs {opt}");
    }
}

#[test]
fn relabeling_with_order_is_equivariant() {
    let f = Cut(gen_random_graph(4, 0.9, (0.2, 1.5), 11).unwrap());
    let perm = vec![2, 0, 3, 1];
    let g = Relabeled { f: &f, perm: perm.clone() };
    let trials = 10_000;
    let (mut a, mut b) = (vec![0usize; 16], vec![0usize; 16]);
    let (mut ra, mut rb) = (RngStream::new(100), RngStream::new(200));
    for _ in 0..trials {
        a[mask(&double_greedy(&f, &mut ra).unwrap())] += 1;
        let out = double_greedy_ordered(&g, &perm, &mut rb).unwrap();
        b[mask(&g.pull(&out))] += 1;
    }
    // two-sample chi-square, df ≤ 15, critical value at p = 0.001
    let chi: f64 = a
        .iter()
        .zip(&b)
        .filter(|(x, y)| **x + **y > 0)
        .map(|(&x, &y)| (x as f64 - y as f64).powi(2) / (x + y) as f64)
        .sum();
    assert!(chi < 37.7, "chi-square {chi}");

    let mut r1 = RngStream::new(7);
    let mut r2 = RngStream::new(7);
    for _ in 0..200 {
        let direct = double_greedy(&f, &mut r1).unwrap();
        let via = double_greedy_ordered(&g, &perm, &mut r2).unwrap();
        assert_eq!(g.pull(&via), direct);
    }
}

#[test]
fn modular_and_zero_examples() {
    struct Modular(Vec<f64>);
    impl SetFunction for Modular {
        fn ground_size(&self) -> usize {
            self.0.len()
        }
        fn value(&self, set: &[bool]) -> f64 {
            4.0 + self.0.iter().zip(set).filter(|(_, s)| **s).map(|(w, _)| w).sum::<f64>()
        }
    }
    let mut rng = RngStream::new(2);
    for _ in 0..50 {
        assert_eq!(double_greedy(&Modular(vec![3.0, -1.0]), &mut rng).unwrap(), vec![true, false]);
        assert_eq!(double_greedy(&Modular(vec![0.0; 3]), &mut rng).unwrap(), vec![true; 3]);
    }
}
