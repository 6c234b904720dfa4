//! Degree formulas for Reeb orbits and chords from Conley–Zehnder data, and the standard
//! Legendrian ℝPⁿ ⊂ ℝP²ⁿ⁺¹ worked out in full: mixed chords of a push-off pair, their
//! Rabinowitz Floer complex, the pure chord algebra and the action-shift isotopy.

use std::collections::BTreeMap;

use num::{ToPrimitive, Zero};

use crate::action::{q, qi, Action, Q};
use crate::algebra::{Flavor, Generator};
use crate::complex::Window;
use crate::dga::FilteredDGA;
use crate::error::{Error, Result};
use crate::field::Fp;
use crate::pwc::{Piecewise, PwcScript, WindowTraj};
use crate::rabinowitz::{build_rfc, BananaCounts, LinkDGA, RfcComplex};
use crate::transform::Augmentation;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrbitIndexInput {
    pub n: i64,
    pub mu_cz: i64,
    pub c1rel: i64,
    pub bott_dim: i64,
    pub morse_index: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChordIndexInput {
    pub cz: i64,
    pub maslov: i64,
    pub bott_dim: i64,
    pub morse_index: i64,
}

fn check_morse(bott_dim: i64, morse_index: i64) -> Result<()> {
    if !(0..=bott_dim).contains(&morse_index) {
        return Err(Error::InvalidInput(format!("Morse index {morse_index} outside [0, {bott_dim}]")));
    }
    Ok(())
}

/// Degree of a contractible orbit in dimension `2n + 1`: `(n+1) − 3 + μ_CZ + 2c₁`, shifted by
/// `index(p) − dim Γ` after a Morse perturbation of a Bott family.
pub fn plane_index(i: &OrbitIndexInput) -> Result<i64> {
    if i.n < 1 {
        return Err(Error::InvalidInput(format!("n = {} must be at least 1", i.n)));
    }
    check_morse(i.bott_dim, i.morse_index)?;
    Ok((i.n + 1) - 3 + i.mu_cz + 2 * i.c1rel + i.morse_index - i.bott_dim)
}

/// Degree of a pure chord: `(CZ − 1) + μ`, shifted by `index(p) − dim 𝒬` after perturbation.
pub fn halfplane_index(i: &ChordIndexInput) -> Result<i64> {
    check_morse(i.bott_dim, i.morse_index)?;
    Ok((i.cz - 1) + i.maslov + i.morse_index - i.bott_dim)
}

/// Perturbed degree of an orbit over the `m`-th cover family of ℝP²ⁿ⁺¹ (Bott manifold ℂPⁿ).
pub fn rpn_orbit_degree(n: i64, m: i64, morse_index: i64) -> Result<i64> {
    plane_index(&OrbitIndexInput { n, mu_cz: n, c1rel: m * (n + 1), bott_dim: 2 * n, morse_index })
}

/// Perturbed degree of a pure chord of length `kπ/2` on ℝPⁿ (Bott manifold ℝPⁿ).
pub fn rpn_pure_chord_degree(n: i64, k: i64, morse_index: i64) -> Result<i64> {
    halfplane_index(&ChordIndexInput { cz: n, maslov: k * (n + 1), bott_dim: n, morse_index })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// From the first copy to the push-off (`k ≥ 0`, positive action).
    ZeroToOne,
    /// From the push-off to the first copy (`k < 0`, negative action).
    OneToZero,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RpnChord {
    pub k: i64,
    pub j: i64,
    pub degree: i64,
    pub action: Action,
    pub direction: Direction,
}

impl RpnChord {
    pub fn name(&self) -> String {
        format!("c{}_{}", self.k, self.j)
    }
}

/// `ε = π / (200(n+1))`, a hundredth of the gap `π / (2(n+1))` between consecutive chords.
pub fn default_epsilon(n: i64) -> Action {
    Action::pi_linear(q(1, 200 * (n + 1)), Q::zero())
}

fn check_rpn(n: i64, eps: &Action) -> Result<()> {
    if n < 1 {
        return Err(Error::InvalidInput(format!("n = {n} must be at least 1")));
    }
    let max = Action::pi_linear(q(1, n + 1), Q::zero());
    if eps.signum().is_le() || *eps >= max {
        return Err(Error::InvalidInput(format!("ε = {eps} must lie in (0, π/{})", n + 1)));
    }
    Ok(())
}

/// The mixed chord `c^k_j`: degree `j + k(n+1) − 1` and action `½(π(j/(n+1) + k) − ε)`. For
/// `k < 0` this is minus the length of a chord from the push-off back to the first copy.
pub fn rpn_mixed_chord(n: i64, j: i64, k: i64, eps: &Action) -> Result<RpnChord> {
    check_rpn(n, eps)?;
    if !(1..=n + 1).contains(&j) {
        return Err(Error::InvalidInput(format!("j = {j} outside 1..={}", n + 1)));
    }
    let turns = q(j, n + 1) + qi(k);
    let action = (Action::pi_linear(turns, Q::zero()) - eps.clone()).half();
    let direction = if k >= 0 { Direction::ZeroToOne } else { Direction::OneToZero };
    Ok(RpnChord { k, j, degree: j + k * (n + 1) - 1, action, direction })
}

/// Chord following `c^k_j` under the action-shift isotopy.
pub fn rpn_next_label(n: i64, j: i64, k: i64) -> (i64, i64) {
    if j < n + 1 {
        (j + 1, k)
    } else {
        (1, k + 1)
    }
}

/// Mixed chords with action in a finite window, in increasing action order.
pub fn rpn_chords_in_window(n: i64, window: &Window, eps: &Action) -> Result<Vec<RpnChord>> {
    check_rpn(n, eps)?;
    let (Some(lo), Some(hi)) = (&window.lo, &window.hi) else {
        return Err(Error::InvalidInput("the ℝPⁿ window must be finite".into()));
    };
    // 𝔞(c^k_j) lies within π/2 of kπ/2, so this range of k is enough
    let k_of = |a: &Action| (a.to_f64() * 2.0 / std::f64::consts::PI).floor();
    let (k0, k1) = (k_of(lo) - 2.0, k_of(hi) + 2.0);
    let (k0, k1) = (
        k0.to_i64().ok_or_else(|| Error::Overflow("window too large".into()))?,
        k1.to_i64().ok_or_else(|| Error::Overflow("window too large".into()))?,
    );
    if k1 - k0 > 1_000_000 {
        return Err(Error::Overflow(format!("window spans {} chord periods", k1 - k0)));
    }
    let mut out = Vec::new();
    for k in k0..=k1 {
        for j in 1..=n + 1 {
            let c = rpn_mixed_chord(n, j, k, eps)?;
            if window.contains(&c.action) {
                out.push(c);
            }
        }
    }
    Ok(out)
}

/// Link DGA of the push-off pair restricted to chords with action in `window`: mixed chords only,
/// zero differential. Mixed10 chords carry the cohomological degree `n − 2 − |c|` so that the
/// cone degree is `|c|`.
pub fn rpn_link_dga(n: i64, window: &Window, eps: &Action) -> Result<LinkDGA> {
    let chords = rpn_chords_in_window(n, window, eps)?;
    let gens = chords
        .iter()
        .map(|c| match c.direction {
            Direction::ZeroToOne => Generator::new(c.name(), c.degree, c.action.clone()).with_flavor(Flavor::Mixed01),
            Direction::OneToZero => Generator::new(c.name(), n - 2 - c.degree, -&c.action).with_flavor(Flavor::Mixed10),
        })
        .collect();
    LinkDGA::new(FilteredDGA::new(Fp::two(), 0, gens, BTreeMap::new(), None)?)
}

/// The Rabinowitz Floer complex of the ℝPⁿ push-off pair in a finite window: one generator per
/// chord in the window, zero differential, no banana counts.
pub fn rpn_generate_rfc(n: i64, window: &Window, eps: &Action) -> Result<RfcComplex> {
    let link = rpn_link_dga(n, window, eps)?;
    build_rfc(&link, &Augmentation::zero(), &BananaCounts::zero(), window, n)
}

/// Pure chords of ℝPⁿ up to length `k_max·π/2` after a perfect Morse perturbation: chord `a{k}_{i}`
/// over the length-`kπ/2` family at the critical point of index `i`. The differential is zero
/// (a model: all degrees are at least `n`, so the zero augmentation exists).
pub fn rpn_pure_dga(n: i64, k_max: i64) -> Result<FilteredDGA> {
    if n < 1 || k_max < 1 {
        return Err(Error::InvalidInput("need n ≥ 1 and k_max ≥ 1".into()));
    }
    let mut gens = Vec::new();
    for k in 1..=k_max {
        for i in 0..=n {
            let action = Action::pi_linear(q(k, 2) + q(i, 400 * (n + 1)), Q::zero());
            gens.push(Generator::new(format!("a{k}_{i}"), rpn_pure_chord_degree(n, k, i)?, action));
        }
    }
    FilteredDGA::new(Fp::two(), 0, gens, BTreeMap::new(), None)
}

/// The action-shift isotopy on the chords in `window`: every chord `c^k_j` moves linearly to the
/// action of the next chord, and the window moves with them, so nothing enters, exits, is born
/// or dies.
pub fn rpn_action_shift_script(n: i64, window: &Window, eps: &Action) -> Result<PwcScript> {
    let rfc = rpn_generate_rfc(n, window, eps)?;
    let chords = rpn_chords_in_window(n, window, eps)?;
    let (t0, t1) = (qi(0), qi(1));
    let mut trajectories = BTreeMap::new();
    for c in &chords {
        let (j, k) = rpn_next_label(n, c.j, c.k);
        let next = rpn_mixed_chord(n, j, k, eps)?;
        trajectories.insert(c.name(), Piecewise::linear(t0.clone(), c.action.clone(), t1.clone(), next.action)?);
    }
    let step = Action::pi_linear(q(1, 2 * (n + 1)), Q::zero());
    let shift = |e: &Option<Action>| -> Result<Option<Piecewise>> {
        e.as_ref().map(|a| Piecewise::linear(t0.clone(), a.clone(), t1.clone(), a + &step)).transpose()
    };
    Ok(PwcScript {
        t_start: t0.clone(),
        t_end: t1.clone(),
        initial: rfc.cone,
        trajectories,
        window: WindowTraj { lo: shift(&window.lo)?, hi: shift(&window.hi)? },
        events: Vec::new(),
        pure: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barcode::compute_barcode;
    use crate::pwc::evolve;

    #[test]
    fn index_examples() {
        assert_eq!(plane_index(&OrbitIndexInput { n: 1, mu_cz: 1, c1rel: 2, bott_dim: 0, morse_index: 0 }).unwrap(), 4);
        assert_eq!(plane_index(&OrbitIndexInput { n: 3, mu_cz: 3 - 4, c1rel: 0, bott_dim: 0, morse_index: 0 }).unwrap(), 0);
        assert_eq!(rpn_orbit_degree(2, 1, 0).unwrap(), 4);
        assert_eq!(halfplane_index(&ChordIndexInput { cz: 1, maslov: 2, bott_dim: 0, morse_index: 0 }).unwrap(), 2);
        assert_eq!(halfplane_index(&ChordIndexInput { cz: 1, maslov: 0, bott_dim: 0, morse_index: 0 }).unwrap(), 0);
        assert_eq!(rpn_pure_chord_degree(3, 1, 0).unwrap(), 3);
        assert!(plane_index(&OrbitIndexInput { n: 1, mu_cz: 1, c1rel: 0, bott_dim: 1, morse_index: 2 }).is_err());
    }

    #[test]
    fn mixed_chord_examples() {
        let e1 = default_epsilon(1);
        assert_eq!(rpn_mixed_chord(1, 1, 0, &e1).unwrap().degree, 0);
        let e2 = default_epsilon(2);
        let c = rpn_mixed_chord(2, 3, -1, &e2).unwrap();
        assert_eq!((c.degree, c.direction), (-1, Direction::OneToZero));
        assert!(c.action.signum().is_lt());
        assert!(rpn_mixed_chord(1, 1, 0, &Action::pi_linear(q(1, 2), Q::zero())).is_err());
    }

    #[test]
    fn lexicographic_action_order() {
        let n = 2;
        let e = default_epsilon(n);
        let mut labels = Vec::new();
        for k in -3..3 {
            for j in 1..=n + 1 {
                labels.push((k, j));
            }
        }
        for &(k1, j1) in &labels {
            for &(k2, j2) in &labels {
                let a1 = rpn_mixed_chord(n, j1, k1, &e).unwrap().action;
                let a2 = rpn_mixed_chord(n, j2, k2, &e).unwrap().action;
                assert_eq!(a1 < a2, (k1, j1) < (k2, j2));
            }
        }
    }

    #[test]
    fn rfc_in_window() {
        let e = default_epsilon(1);
        // c^0_1 ≈ π/4, c^0_2 ≈ π/2, c^1_1 ≈ 3π/4, c^1_2 ≈ π
        let w = Window::finite(Action::ratio(1, 2), Action::ratio(5, 2));
        let rfc = rpn_generate_rfc(1, &w, &e).unwrap();
        let degs: Vec<i64> = rfc.cone.basis.iter().map(|b| b.degree).collect();
        assert_eq!(degs, vec![0, 1, 2]);
        assert!(rfc.cone.d.is_zero());
        let bc = compute_barcode(&rfc.cone);
        assert!(bc.bars().iter().all(|b| b.is_infinite()));
        assert_eq!(bc.infinite_counts().values().copied().collect::<Vec<_>>(), vec![1, 1, 1]);

        let empty = Window::finite(Action::ratio(1, 10), Action::ratio(1, 5));
        assert_eq!(rpn_generate_rfc(1, &empty, &e).unwrap().cone.dim(), 0);
    }

    #[test]
    fn negative_chords_in_cone() {
        let n = 2;
        let e = default_epsilon(n);
        let w = Window::finite(Action::int(-4), Action::int(4));
        let rfc = rpn_generate_rfc(n, &w, &e).unwrap();
        let mut degs: Vec<i64> = rfc.cone.basis.iter().map(|b| b.degree).collect();
        degs.sort();
        assert!(degs.windows(2).all(|p| p[1] == p[0] + 1));
        assert!(degs.contains(&-1) && degs.contains(&0));
        let order = rfc.cone.filtration_order();
        assert!(order.windows(2).all(|p| rfc.cone.basis[p[1]].degree == rfc.cone.basis[p[0]].degree + 1));
    }

    #[test]
    fn action_shift_script() {
        let e = default_epsilon(1);
        let w = Window::finite(Action::ratio(1, 2), Action::ratio(5, 2));
        let s = rpn_action_shift_script(1, &w, &e).unwrap();
        let c01 = rpn_mixed_chord(1, 1, 0, &e).unwrap();
        let c02 = rpn_mixed_chord(1, 2, 0, &e).unwrap();
        let c11 = rpn_mixed_chord(1, 1, 1, &e).unwrap();
        assert_eq!(s.trajectories["c0_1"].eval(&qi(1)), c02.action);
        assert_eq!(s.trajectories["c0_2"].eval(&qi(1)), c11.action);
        assert_eq!(s.trajectories["c0_1"].eval(&qi(0)), c01.action);
        let frames = evolve(&s, &[q(1, 2)]).unwrap();
        let step = Action::pi_linear(q(1, 4), Q::zero());
        let first = &frames[0].barcode;
        let last = &frames.last().unwrap().barcode;
        assert_eq!(first.len(), last.len());
        for (a, b) in first.bars().iter().zip(last.bars()) {
            assert_eq!(&a.start + &step, b.start);
            assert_eq!(a.degree, b.degree);
        }
    }

    #[test]
    fn pure_dga_degrees() {
        let d = rpn_pure_dga(3, 2).unwrap();
        assert!(d.validate().passed());
        assert_eq!(d.generators.iter().map(|g| g.degree).min(), Some(3));
    }
}
