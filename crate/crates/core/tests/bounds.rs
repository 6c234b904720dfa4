mod support;

use std::time::Instant;

use num::{One, Zero};
use rfc_core::action::{q, qi, Q};
use rfc_core::bounds::*;

fn spectrum(lengths: &[Q]) -> ChordSpectrum {
    ChordSpectrum::new(lengths.to_vec(), None, None).unwrap()
}

#[test]
fn main_theorem_examples() {
    let s = spectrum(&[q(1, 2), qi(1), qi(2)]);
    assert_eq!(main_theorem_bound(&[1, 1], 1, &q(1, 10), &s).unwrap(), BoundOutcome::Bound(2));
    for n in 1..=6 {
        let betti = vec![1; n + 1];
        assert_eq!(main_theorem_bound(&betti, 1, &q(1, 10), &s).unwrap(), BoundOutcome::Bound(n as i64 + 1));
    }
    assert!(matches!(main_theorem_bound(&[1, 1], 1, &q(1, 2), &s).unwrap(), BoundOutcome::Inadmissible { .. }));
}

#[test]
fn energy_constant_examples() {
    assert_eq!(scf_energy_constant(&[q(3, 5), q(4, 5), qi(1)], &q(1, 10)).unwrap(), q(1, 500));
    assert!(scf_energy_constant(&[q(1, 2), qi(1)], &q(1, 10)).is_err());
    assert!(scf_energy_constant(&[q(3, 5), q(3, 5), q(4, 5)], &q(1, 10)).is_err());
}

/// `(1 + x/N)^N ≤ eˣ ≤ (1 − x/N)^{−N}` for `0 ≤ x < N`.
fn crude_exp_bracket(x: &Q) -> (Q, Q) {
    let n = Q::from_integer(1024.into());
    let lo = num::pow(Q::one() + x / &n, 1024);
    let hi = num::pow(Q::one() / (Q::one() - x / &n), 1024);
    (lo, hi)
}

#[test]
fn exp_enclosures_are_sound() {
    for x in [q(0, 1), q(1, 100), q(1, 2), qi(1), q(101, 100), qi(3)] {
        let e = exp_enclosure(&x, 64);
        let (lo, hi) = crude_exp_bracket(&x);
        assert!(e.lo <= e.hi);
        assert!(lo <= e.hi && e.lo <= hi, "e^{x} enclosure [{}, {}] misses the crude bracket", e.lo, e.hi);
        let f = rfc_core::action::rational_to_f64(&x).exp();
        assert!(e.to_f64() - f < 1e-12 && f - e.to_f64() < 1e-12);
        assert!(e.width() < q(1, 1 << 40));
    }
}

#[test]
fn trace_length_examples() {
    let p = ConformalProfile { f_min: q(-1, 10), f_max: q(1, 5), eps: q(1, 100) };
    let t = trace_lengths(&p).unwrap();
    assert_eq!((t.len01.coeff.clone(), t.len01.exponent.clone()), (q(1, 10), q(101, 100)));
    assert_eq!((t.len10.coeff.clone(), t.len10.exponent.clone()), (q(1, 5), q(101, 100)));
    assert_eq!((t.c0.coeff.clone(), t.c0.exponent.clone()), (q(3, 10), q(101, 100)));
    let zero = trace_lengths(&ConformalProfile { f_min: Q::zero(), f_max: Q::zero(), eps: q(1, 10) }).unwrap();
    assert!(zero.len01.coeff.is_zero() && zero.len10.coeff.is_zero() && zero.c0.coeff.is_zero());
    let pos = trace_lengths(&ConformalProfile { f_min: Q::zero(), f_max: qi(2), eps: q(1, 10) }).unwrap();
    assert!(pos.len01.coeff.is_zero());
}

#[test]
fn trace_lengths_add_up_across_zero() {
    for (a, b) in [(-3, 5), (0, 1), (-1, 0), (-7, 7), (-2, 9)] {
        for e in [q(1, 100), q(1, 3), qi(2)] {
            let t = trace_lengths(&ConformalProfile { f_min: q(a, 4), f_max: q(b, 4), eps: e }).unwrap();
            assert_eq!(t.len01.exponent, t.c0.exponent);
            assert_eq!(&t.len01.coeff + &t.len10.coeff, t.c0.coeff);
        }
    }
}

#[test]
fn growth_examples() {
    let v = action_growth_check(&[(qi(1), q(1, 2)), (qi(1), qi(1))], &Q::zero()).unwrap();
    assert_eq!(v.violations(), vec![1]);
    let v = action_growth_check_with(&[(qi(1), qi(2))], Enclosure { lo: qi(1), hi: q(3, 2) }).unwrap();
    assert!(!v.passed());
    // e^{2δ} ≥ 4/3 once δ ≥ ½ ln(4/3) ≈ 0.1438
    let v = action_growth_check(&[(qi(1), q(5, 4))], &q(3, 20)).unwrap();
    assert!(v.passed());
}

#[test]
fn adversary_never_beats_the_bound() {
    let t = Instant::now();
    let s = support::adversary_sweep(8);
    assert!(s.failures.is_empty(), "{:#?}", s.failures);
    assert!(s.admissible > 200, "{s:?}");
    assert!(t.elapsed().as_secs() < 60);
}
