use proptest::prelude::*;

use drsub_core::checks::{concavity_violation, join_lower_bound_violation, join_meet_violation, DR_TOL};
use drsub_core::hypercube::BinaryLattice;
use drsub_core::instances::QuadraticInstance;
use drsub_core::lift::{is_staircase, LiftedPoint, UnaryLattice};
use drsub_core::{vector, ConvexBody, RngStream};

fn levels(n: usize, m: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0..=m, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quadratic_structural_inequalities(n in 1usize..7, seed in any::<u64>()) {
        let f = QuadraticInstance::random(n, &mut RngStream::new(seed)).unwrap();
        let mut rng = RngStream::new(seed ^ 0x5555);
        prop_assert!(concavity_violation(&f, 50, &mut rng) <= DR_TOL);
        prop_assert!(join_meet_violation(&f, 50, &mut rng) <= DR_TOL);
        prop_assert!(join_lower_bound_violation(&f, 50, &mut rng) <= DR_TOL);
    }

    #[test]
    fn unary_round_trip((m, lv) in (1usize..8).prop_flat_map(|m| (Just(m), levels(4, m)))) {
        let lat = UnaryLattice::new(4, m).unwrap();
        let p = LiftedPoint::from_levels(m, lv.clone()).unwrap();
        let x = lat.unlift(&p).unwrap();
        prop_assert_eq!(lat.lift(&x).unwrap(), p.clone());
        prop_assert!(is_staircase(&p.to_dense(), m, 0.0));
        prop_assert_eq!(LiftedPoint::from_bits(4, m, &p.bits()).unwrap(), p);
    }

    #[test]
    fn join_is_levelwise_max(
        (m, a, b) in (1usize..6).prop_flat_map(|m| (Just(m), levels(3, m), levels(3, m)))
    ) {
        let pa = LiftedPoint::from_levels(m, a.clone()).unwrap();
        let pb = LiftedPoint::from_levels(m, b.clone()).unwrap();
        let j = pa.join(&pb);
        let expected: Vec<usize> = a.iter().zip(&b).map(|(x, y)| *x.max(y)).collect();
        prop_assert_eq!(j.levels(), &expected[..]);
        let dense: Vec<f64> = vector::join(&pa.to_dense(), &pb.to_dense());
        prop_assert_eq!(j.to_dense(), dense);
    }

    #[test]
    fn snap_is_on_lattice_and_below(c in prop::collection::vec(0.0f64..=1.0, 3), m in 1usize..9) {
        let lat = UnaryLattice::new(3, m).unwrap();
        let s = lat.snap(&c);
        prop_assert!(lat.lift(&s).is_ok());
        for (si, ci) in s.iter().zip(&c) {
            prop_assert!(*si <= ci + 1e-12 && ci - si < 1.0 / m as f64 + 1e-12);
        }
    }

    #[test]
    fn binary_round_trip(depth in 1usize..5, idx in prop::collection::vec(any::<prop::sample::Index>(), 2)) {
        let lat = BinaryLattice::new(2, depth).unwrap();
        let side = (1usize << depth) + 1;
        let x: Vec<f64> = idx.iter().map(|i| i.index(side) as f64 / (side - 1) as f64).collect();
        let bits = lat.lift(&x).unwrap();
        prop_assert!(lat.in_image(&bits));
        prop_assert_eq!(lat.unlift(&bits).unwrap(), x);
    }

    #[test]
    fn band_projection_is_a_projection(
        y in prop::collection::vec(-0.5f64..1.5, 5),
        z in prop::collection::vec(0.0f64..=1.0, 5),
        lo in 0.0f64..1.0,
        width in 0.1f64..2.0,
    ) {
        let body = ConvexBody::total_band(5, lo, lo + width).unwrap();
        let p = body.project(&y).unwrap();
        prop_assert!(body.contains(&p).unwrap());
        let again = body.project(&p).unwrap();
        prop_assert!(vector::dist(&again, &p) <= 1e-9);
        // variational inequality against a feasible point
        let zf = body.project(&z).unwrap();
        let vi = vector::dot(&vector::sub(&y, &p), &vector::sub(&zf, &p));
        prop_assert!(vi <= 1e-8, "{}", vi);
    }
}
