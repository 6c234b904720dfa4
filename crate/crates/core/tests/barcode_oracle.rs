mod support;

use proptest::prelude::*;
use rfc_core::barcode::compute_barcode;
use rfc_core::{gen, Action, Fp};

fn levels() -> Vec<Action> {
    (0..14).map(|k| Action::ratio(k, 2)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn reduction_matches_persistent_ranks(seed in any::<u64>(), p in prop::sample::select(vec![2u32, 3]), n in 0usize..=12, distinct in any::<bool>()) {
        let f = Fp::new(p).unwrap();
        let mut rng = gen::rng(seed);
        let c = gen::random_complex(&mut rng, f, n, &levels(), distinct, 3);
        let bc = compute_barcode(&c);
        prop_assert_eq!(support::bars_of(&bc), support::bars_by_ranks(&c));
    }

    #[test]
    fn infinite_bars_count_homology(seed in any::<u64>(), n in 0usize..=10) {
        let mut rng = gen::rng(seed);
        let c = gen::random_complex(&mut rng, Fp::new(3).unwrap(), n, &levels(), false, 3);
        let h: std::collections::BTreeMap<i64, usize> = c.homology_dims().into_iter().filter(|(_, v)| *v > 0).collect();
        prop_assert_eq!(compute_barcode(&c).infinite_counts(), h);
        prop_assert_eq!(compute_barcode(&c).finite_bars().count(), c.d.rank());
    }
}

#[test]
fn two_generator_pair() {
    use rfc_core::complex::{BasisElem, FilteredComplex, Window};
    use rfc_core::Matrix;
    let f = Fp::two();
    let basis = vec![BasisElem::new("y", 0, Action::int(1)), BasisElem::new("x", 1, Action::int(3))];
    let c = FilteredComplex::new(f, 0, basis, Matrix::from_rows(f, &[vec![0, 1], vec![0, 0]]), Window::full()).unwrap();
    assert_eq!(support::bars_by_ranks(&c), vec![(Action::int(1), Some(Action::int(3)), 0)]);
    assert_eq!(support::bars_of(&compute_barcode(&c)), support::bars_by_ranks(&c));
}
