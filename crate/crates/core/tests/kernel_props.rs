mod common;

use common::{q, random_int_system, vertex_oracle_feasible, IntSystem};
use credal_core::kernel::{
    enumerate_vertices, format_rational, lp_feasible, lp_feasible_point, lp_optimize, parse_rational, Interval,
    LinearConstraint, LinearSystem, Rational, Relation, Sense,
};
use credal_core::Error;
use num_traits::Zero;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn beach_first_iteration() -> LinearSystem {
    let row = |ones: &[usize], rel, rhs: &str| LinearConstraint::sum_of(5, ones, rel, parse_rational(rhs).unwrap());
    LinearSystem::simplex(5)
        .with(row(&[1, 2, 3, 4], Relation::Ge, ".65"))
        .with(row(&[1, 2, 3, 4], Relation::Le, ".95"))
        .with(row(&[0, 3, 4], Relation::Ge, ".95"))
}

#[test]
fn five_world_go_system_is_feasible() {
    // Go beats Do not go: (p1 + p2 + p4) .8 - (p3 + p5) .8 >= 0.
    let gap: Vec<Rational> = [1, 1, -1, 1, -1].iter().map(|&s| q(4 * s, 5)).collect();
    let system = beach_first_iteration().with(LinearConstraint::new(gap, Relation::Ge, Rational::zero()));
    assert!(lp_feasible(&system).unwrap());
    let point = lp_feasible_point(&system).unwrap().unwrap();
    assert!(system.is_satisfied_by(&point));
}

#[test]
fn contradictory_rows_are_infeasible() {
    let system = LinearSystem::simplex(2)
        .with(LinearConstraint::sum_of(2, &[0], Relation::Ge, q(7, 10)))
        .with(LinearConstraint::sum_of(2, &[1], Relation::Ge, q(7, 10)));
    assert!(!lp_feasible(&system).unwrap());
    assert_eq!(lp_optimize(&system, &[q(1, 1), q(0, 1)], Sense::Minimize), Err(Error::Infeasible));
}

#[test]
fn oracle_sanity() {
    let square = IntSystem { n: 2, rows: vec![(vec![1, 1], Relation::Le, 1)], normalized: false };
    assert!(vertex_oracle_feasible(&square));
    let empty = IntSystem { n: 2, rows: vec![(vec![1, 1], Relation::Ge, 2)], normalized: true };
    assert!(!vertex_oracle_feasible(&empty));
    let neg = IntSystem { n: 1, rows: vec![(vec![1], Relation::Le, -1)], normalized: false };
    assert!(!vertex_oracle_feasible(&neg));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn feasibility_matches_vertex_oracle(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let int = random_int_system(&mut rng);
        let system = int.to_linear();
        prop_assert_eq!(lp_feasible(&system).unwrap(), vertex_oracle_feasible(&int), "{}", system);
    }

    #[test]
    fn feasible_points_satisfy_the_system(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let system = random_int_system(&mut rng).to_linear();
        if let Some(point) = lp_feasible_point(&system).unwrap() {
            prop_assert!(system.is_satisfied_by(&point));
        }
    }

    #[test]
    fn optimum_bounds_every_vertex(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut int = random_int_system(&mut rng);
        // Bounded: normalized systems stay inside the simplex.
        int.normalized = true;
        let system = int.to_linear();
        let objective: Vec<Rational> = (0..int.n).map(|k| q((k as i64 * 7 + seed as i64 % 5) % 5 - 2, 1)).collect();
        match lp_optimize(&system, &objective, Sense::Maximize) {
            Ok(best) => {
                prop_assert!(system.is_satisfied_by(&best.point));
                let value = |p: &[Rational]| -> Rational { p.iter().zip(&objective).map(|(x, c)| x * c).sum() };
                prop_assert_eq!(value(&best.point), best.value.clone());
                let vertices = enumerate_vertices(&system).unwrap();
                prop_assert!(!vertices.is_empty());
                prop_assert!(vertices.iter().all(|v| value(v) <= best.value));
                prop_assert!(vertices.iter().any(|v| value(v) == best.value));
            }
            Err(e) => {
                prop_assert_eq!(e, Error::Infeasible);
                prop_assert!(!vertex_oracle_feasible(&int));
            }
        }
    }

    #[test]
    fn rational_text_round_trips(n in -1000i64..1000, d in 1i64..1000) {
        let x = q(n, d);
        prop_assert_eq!(parse_rational(&format_rational(&x)).unwrap(), x);
    }

    #[test]
    fn decimal_text_is_exact(whole in 0u32..10, frac in 0u32..10000) {
        let text = format!("{whole}.{frac:04}");
        let expected = q(whole as i64 * 10000 + frac as i64, 10000);
        prop_assert_eq!(parse_rational(&text).unwrap(), expected);
    }

    #[test]
    fn interval_intersection_is_the_meet(a in 0i64..=20, b in 0i64..=20, c in 0i64..=20, d in 0i64..=20) {
        let x = Interval::new(q(a.min(b), 20), q(a.max(b), 20)).unwrap();
        let y = Interval::new(q(c.min(d), 20), q(c.max(d), 20)).unwrap();
        match x.intersect(&y) {
            Some(z) => {
                prop_assert!(z.is_subset_of(&x) && z.is_subset_of(&y));
                prop_assert_eq!(z.lower(), x.lower().max(y.lower()));
            }
            None => prop_assert!(x.upper() < y.lower() || y.upper() < x.lower()),
        }
    }
}
