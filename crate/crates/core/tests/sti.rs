use std::collections::BTreeMap;

use proptest::prelude::*;
use rfc_core::transform::{apply_tame, find_augmentations, linearize, Sti};
use rfc_core::{gen, Fp};

fn nonzero(h: BTreeMap<i64, usize>) -> BTreeMap<i64, usize> {
    h.into_iter().filter(|(_, v)| *v > 0).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn linearized_homology_is_invariant(seed in any::<u64>(), p in prop::sample::select(vec![2u32, 3]), n in 1usize..=8, len in 1usize..=10) {
        let mut rng = gen::rng(seed);
        let dga = gen::random_dga(&mut rng, Fp::new(p).unwrap(), n);
        let Some(eps) = find_augmentations(&dga, 1 << 14).unwrap().into_iter().next() else { return Ok(()) };
        let before = nonzero(linearize(&dga, &eps).unwrap().homology_dims());
        let mut fresh = 0;
        let mut cur = dga.clone();
        let mut moves = Vec::new();
        for _ in 0..20 * len {
            if moves.len() == len {
                break;
            }
            let Some(mv) = gen::random_tame_move(&mut rng, &cur, &mut fresh) else { continue };
            if let Ok(next) = apply_tame(&cur, &mv) {
                cur = next;
                moves.push(mv);
            }
        }
        let (d2, e2) = Sti { moves }.transport(&dga, &eps).unwrap();
        prop_assert_eq!(before, nonzero(linearize(&d2, &e2).unwrap().homology_dims()));
    }
}

#[test]
fn hundred_checked_sequences() {
    let mut rng = gen::rng(11);
    let mut checked = 0;
    let mut tried = 0;
    while checked < 100 {
        tried += 1;
        assert!(tried < 1000, "too few DGAs admit augmentations");
        let f = Fp::new(2 + (tried % 2)).unwrap();
        let dga = gen::random_dga(&mut rng, f, 1 + tried as usize % 8);
        let Some(eps) = find_augmentations(&dga, 1 << 14).unwrap().into_iter().next() else { continue };
        let before = nonzero(linearize(&dga, &eps).unwrap().homology_dims());
        let (mut fresh, mut cur, mut moves) = (0, dga.clone(), Vec::new());
        for _ in 0..200 {
            if moves.len() == 1 + checked % 10 {
                break;
            }
            if let Some(mv) = gen::random_tame_move(&mut rng, &cur, &mut fresh) {
                if let Ok(next) = apply_tame(&cur, &mv) {
                    cur = next;
                    moves.push(mv);
                }
            }
        }
        let (d2, e2) = Sti { moves }.transport(&dga, &eps).unwrap();
        assert_eq!(before, nonzero(linearize(&d2, &e2).unwrap().homology_dims()));
        checked += 1;
    }
}
