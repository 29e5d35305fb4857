use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pappus_core::marked_box::{random_box, random_map, BoxOp, MarkedBox};
use pappus_core::projective::{collinear, det_ints};
use pappus_core::representation::{anti_homomorphism_residual, reduce_word, rho_hat_unchecked, MARK_TOL};

/// Pads a word so both its τ count and its i count are even.
fn even_parity(raw: &str) -> String {
    let mut w = raw.to_string();
    if w.chars().filter(|c| *c != 'i').count() % 2 == 1 {
        w.push('1');
    }
    if w.chars().filter(|c| *c == 'i').count() % 2 == 1 {
        w.push('i');
    }
    w
}

fn boxed(seed: u64) -> MarkedBox {
    random_box(&mut ChaCha8Rng::seed_from_u64(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pappus_points_are_collinear(seed in any::<u64>()) {
        let bx = boxed(seed);
        let pt = bx.pappus_triple().unwrap();
        let (u, m, v) = (pt.u.ints_ref().unwrap(), pt.m.ints_ref().unwrap(), pt.v.ints_ref().unwrap());
        prop_assert_eq!(det_ints(u, m, v), 0.into());
        prop_assert!(collinear(&pt.u, &pt.m, &pt.v));
    }

    #[test]
    fn i_is_an_involution(seed in any::<u64>()) {
        let bx = boxed(seed);
        let back = bx.apply(BoxOp::I).unwrap().apply(BoxOp::I).unwrap();
        prop_assert!(back.same_class(&bx));
    }

    #[test]
    fn tau2_is_tau1_conjugated_by_i(seed in any::<u64>()) {
        let bx = boxed(seed);
        let conj = bx.apply(BoxOp::I).unwrap().apply(BoxOp::Tau1).unwrap().apply(BoxOp::I).unwrap();
        prop_assert!(conj.same_class(&bx.apply(BoxOp::Tau2).unwrap()));
    }

    #[test]
    fn operations_commute_with_projective_maps(seed in any::<u64>(), op in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bx = random_box(&mut rng);
        let a = random_map(&mut rng);
        let op = BoxOp::ALL[op];
        let lhs = bx.transform(&a).unwrap().apply(op).unwrap();
        let rhs = bx.apply(op).unwrap().transform(&a).unwrap();
        prop_assert!(lhs.same_class(&rhs));
    }

    #[test]
    fn children_of_valid_boxes_are_valid(seed in any::<u64>(), word in "[12]{1,4}") {
        let bx = boxed(seed);
        prop_assert!(bx.is_valid());
        let child = bx.apply_word(&word).unwrap();
        prop_assert!(child.validate().is_empty(), "{:?}", child.validate());
    }

    #[test]
    fn reduction_is_idempotent(raw in "[i12]{0,16}") {
        let w = reduce_word(&raw).unwrap();
        prop_assert!(!w.as_str().contains("ii"));
        prop_assert_eq!(reduce_word(w.as_str()).unwrap(), w.clone());
        prop_assert_eq!(w.tau_count(), raw.chars().filter(|c| *c != 'i').count());
    }

    #[test]
    fn marked_elements_compose_anti_homomorphically(u in "[i12]{1,4}", v in "[i12]{1,4}") {
        let seed = MarkedBox::default_seed();
        let (u, v) = (reduce_word(&even_parity(&u)).unwrap(), reduce_word(&even_parity(&v)).unwrap());
        let in_sigma = |w: &pappus_core::representation::Word| {
            rho_hat_unchecked(w, &seed).map(|g| g.in_sigma(MARK_TOL)).unwrap_or(false)
        };
        prop_assume!(!u.is_empty() && !v.is_empty());
        prop_assume!(in_sigma(&u) && in_sigma(&v) && in_sigma(&u.concat(&v)));
        let r = anti_homomorphism_residual(&u, &v, &seed).unwrap();
        prop_assert!(r <= 1e-10, "residual {r:e}");
    }
}
