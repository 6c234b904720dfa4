use proptest::prelude::*;
use rfc_core::action::q;
use rfc_core::lemmas::{check_birth_death_shape, check_simple_equivalence, SimpleOutcome};
use rfc_core::{gen, Action, Fp};

fn field(p: u32) -> Fp {
    Fp::new(p).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(224))]

    #[test]
    fn gapped_equivalences_are_triangular_isomorphisms(seed in any::<u64>(), p in prop::sample::select(vec![2u32, 3]), n in 1usize..=7, eps_num in 1i64..=9) {
        let mut rng = gen::rng(seed);
        let delta = Action::int(10);
        // ε < δ/4
        let eps = Action::ratio(eps_num, 4);
        let cert = gen::simple_equivalence_instance(&mut rng, field(p), n, &delta, &eps, true);
        match check_simple_equivalence(&cert, &delta).unwrap() {
            SimpleOutcome::Verdict(v) => {
                prop_assert!(v.isomorphism && v.filtered_automorphism);
                prop_assert_eq!(v.upper_triangular, Some(true));
            }
            SimpleOutcome::HypothesisViolated(p) => prop_assert!(false, "false reject: {:?}", p),
        }
    }

    #[test]
    fn gap_violations_are_rejected(seed in any::<u64>(), n in 2usize..=7) {
        let mut rng = gen::rng(seed);
        let delta = Action::int(10);
        let cert = gen::simple_equivalence_instance(&mut rng, Fp::two(), n, &delta, &Action::int(2), true);
        // δ = 4ε exactly
        let out = check_simple_equivalence(&cert, &Action::int(8)).unwrap();
        prop_assert!(matches!(out, SimpleOutcome::HypothesisViolated(_)));
        // claimed gap wider than the actual one
        let vals = cert.source().action_values();
        let gap = vals.windows(2).map(|w| &w[1] - &w[0]).min().unwrap();
        let out = check_simple_equivalence(&cert, &(&gap + &Action::int(1))).unwrap();
        prop_assert!(matches!(out, SimpleOutcome::HypothesisViolated(_)));
    }

    #[test]
    fn birth_death_shapes(seed in any::<u64>(), p in prop::sample::select(vec![2u32, 3]), rest in 0usize..=6) {
        let mut rng = gen::rng(seed);
        let (delta, eps) = (Action::int(4), Action::ratio(1, 2));
        let inst = gen::birth_death_instance(&mut rng, field(p), rest, &delta, &eps);
        let v = check_birth_death_shape(&inst.c, &inst.c_prime, &inst.a, &inst.delta, &inst.eps, Some(&inst.cert)).unwrap();
        prop_assert_eq!(v.coeff != 0, true);
        // δ ≤ ε
        prop_assert!(check_birth_death_shape(&inst.c, &inst.c_prime, &inst.a, &delta, &Action::int(4), None).is_err());
        // window slid off the pair
        let a2 = &inst.a + &delta.scale(&q(2, 1));
        prop_assert!(check_birth_death_shape(&inst.c, &inst.c_prime, &a2, &delta, &eps, None).is_err());
    }
}
