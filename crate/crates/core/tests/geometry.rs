use std::f64::consts::FRAC_PI_2;
use std::sync::OnceLock;

use num_complex::Complex64;
use proptest::prelude::*;

use pappus_core::limit_set::{general_position_census_vectors, kulkarni_distance, sample_curve, LimitSetApprox};
use pappus_core::marked_box::MarkedBox;
use pappus_core::projective::{dist, incident, join, meet, HPoint, ProjMap};

fn small() -> impl Strategy<Value = i64> {
    -20i64..=20
}

fn point() -> impl Strategy<Value = HPoint> {
    (small(), small(), 1i64..=5).prop_map(|(x, y, z)| HPoint::ints(x, y, z))
}

fn approx(depth: usize) -> &'static LimitSetApprox {
    static SHALLOW: OnceLock<LimitSetApprox> = OnceLock::new();
    static DEEP: OnceLock<LimitSetApprox> = OnceLock::new();
    let cell = if depth == 6 { &SHALLOW } else { &DEEP };
    cell.get_or_init(|| sample_curve(&MarkedBox::default_seed(), depth, 2).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn join_and_meet_are_exactly_incident(p in point(), q in point(), r in point(), s in point()) {
        prop_assume!(!p.equivalent(&q) && !r.equivalent(&s));
        let l1 = join(&p, &q).unwrap();
        prop_assert!(incident(&p, &l1, 0.0).unwrap() && incident(&q, &l1, 0.0).unwrap());
        let l2 = join(&r, &s).unwrap();
        prop_assume!(!l1.equivalent(&l2));
        let x = meet(&l1, &l2).unwrap();
        prop_assert!(incident(&x, &l1, 0.0).unwrap() && incident(&x, &l2, 0.0).unwrap());
    }

    #[test]
    fn distance_is_a_symmetric_angle(p in point(), q in point()) {
        let d = dist(&p, &q).unwrap();
        prop_assert!((0.0..=FRAC_PI_2 + 1e-15).contains(&d));
        prop_assert_eq!(d, dist(&q, &p).unwrap());
        prop_assert_eq!(dist(&p, &p).unwrap(), 0.0);
    }

    #[test]
    fn exact_maps_invert_exactly(m in proptest::array::uniform3(proptest::array::uniform3(-6i64..=6)), p in point()) {
        let Ok(a) = ProjMap::ints(m) else { return Ok(()); };
        prop_assert!(a.compose(&a.inverse()).is_identity());
        let back = a.inverse().apply_point(&a.apply_point(&p).unwrap()).unwrap();
        prop_assert!(back.equivalent(&p));
    }

    #[test]
    fn census_ignores_line_order(lines in proptest::collection::vec(proptest::array::uniform3(-3i32..=3), 3..12), rot in 0usize..12) {
        let vs: Vec<[f64; 3]> = lines.iter().filter(|l| l.iter().any(|x| *x != 0)).map(|l| l.map(f64::from)).collect();
        prop_assume!(vs.len() >= 3);
        let mut rotated = vs.clone();
        rotated.rotate_left(rot % vs.len());
        rotated.reverse();
        prop_assert_eq!(
            general_position_census_vectors(&vs, 1e-9).unwrap(),
            general_position_census_vectors(&rotated, 1e-9).unwrap()
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn kulkarni_distance_is_bounded_and_refinement_monotone(c in proptest::array::uniform6(-1.0f64..1.0)) {
        let z = [Complex64::new(c[0], c[1]), Complex64::new(c[2], c[3]), Complex64::new(c[4], c[5])];
        prop_assume!(z.iter().map(|w| w.norm_sqr()).sum::<f64>() > 1e-6);
        let p = HPoint::complex(z).unwrap();
        let coarse = kulkarni_distance(&p, approx(6)).unwrap();
        let fine = kulkarni_distance(&p, approx(8)).unwrap();
        prop_assert!((0.0..=FRAC_PI_2).contains(&coarse));
        prop_assert!(fine <= coarse, "{fine} > {coarse}");
    }
}
