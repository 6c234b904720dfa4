//! Seeded random instances: filtered complexes, equivalence certificates, DGAs, tame moves,
//! bifurcation events and Rabinowitz link data.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use std::collections::BTreeMap;

use crate::action::{qi, Action};
use crate::algebra::{Flavor, FreeElement, Generator};
use crate::barcode::Event;
use crate::complex::{BasisElem, DegreeEpsMap, FilteredComplex, Window};
use crate::dga::FilteredDGA;
use crate::field::Fp;
use crate::lemmas::{EquivalenceCertificate, HomotopyCertificate};
use crate::matrix::Matrix;
use crate::rabinowitz::{BananaCounts, LinkDGA};
use crate::transform::TameMove;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_unit<R: Rng>(rng: &mut R, f: Fp) -> u32 {
    rng.gen_range(1..f.p())
}

fn random_scalar<R: Rng>(rng: &mut R, f: Fp) -> u32 {
    rng.gen_range(0..f.p())
}

/// Random map shifting degree by `shift` with `ℓ(target) ≤ ℓ(source)` (strictly if `strict`).
pub fn random_filtered_map<R: Rng>(
    rng: &mut R,
    source: &FilteredComplex,
    target: &FilteredComplex,
    shift: i64,
    strict: bool,
    density: f64,
) -> Matrix {
    let f = source.field;
    let mut m = Matrix::zeros(f, target.dim(), source.dim());
    for (j, s) in source.basis.iter().enumerate() {
        for (i, t) in target.basis.iter().enumerate() {
            let ok_action = if strict { t.action < s.action } else { t.action <= s.action };
            if ok_action && target.degrees_agree(t.degree, s.degree + shift) && rng.gen_bool(density) {
                m.set(i, j, random_scalar(rng, f));
            }
        }
    }
    m
}

/// Invertible, degree-preserving, triangular in (action, index) order: a filtered automorphism
/// of the underlying filtered vector space.
pub fn random_basis_change<R: Rng>(rng: &mut R, c: &FilteredComplex, density: f64) -> Matrix {
    let f = c.field;
    let order = c.filtration_order();
    let mut t = Matrix::identity(f, c.dim());
    for (pj, &j) in order.iter().enumerate() {
        t.set(j, j, random_unit(rng, f));
        for &i in &order[..pj] {
            if c.degrees_agree(c.basis[i].degree, c.basis[j].degree) && rng.gen_bool(density) {
                t.set(i, j, random_scalar(rng, f));
            }
        }
    }
    t
}

/// Random valid filtered complex: a split normal form conjugated by a random filtered basis change.
/// Actions are drawn from `levels` (without repetition when `distinct`); degrees from `0..degrees`.
pub fn random_complex<R: Rng>(rng: &mut R, f: Fp, n: usize, levels: &[Action], distinct: bool, degrees: i64) -> FilteredComplex {
    let actions: Vec<Action> = if distinct {
        assert!(levels.len() >= n, "not enough distinct levels");
        levels.choose_multiple(rng, n).cloned().collect()
    } else {
        (0..n).map(|_| levels.choose(rng).expect("nonempty levels").clone()).collect()
    };
    let basis: Vec<BasisElem> =
        actions.into_iter().enumerate().map(|(i, a)| BasisElem::new(format!("e{i}"), rng.gen_range(0..degrees.max(1)), a)).collect();
    let mut d0 = Matrix::zeros(f, n, n);
    let mut used = vec![false; n];
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    for &x in &idx {
        if used[x] || !rng.gen_bool(0.6) {
            continue;
        }
        let cands: Vec<usize> =
            (0..n).filter(|&y| !used[y] && y != x && basis[y].degree + 1 == basis[x].degree && basis[y].action < basis[x].action).collect();
        if let Some(&y) = cands.choose(rng) {
            used[x] = true;
            used[y] = true;
            d0.set(y, x, random_unit(rng, f));
        }
    }
    let c0 = FilteredComplex::new(f, 0, basis, d0, Window::full()).expect("normal form is valid");
    let t = random_basis_change(rng, &c0, 0.5);
    let tinv = t.inverse().expect("triangular with unit diagonal");
    c0.change_basis(&tinv).expect("invertible")
}

/// Levels `0, δ, 2δ, …` (count `k`).
pub fn gapped_levels(delta: &Action, k: usize) -> Vec<Action> {
    (0..k as i64).map(|i| delta.scale(&qi(i))).collect()
}

/// Valid data for the simple-equivalence lemma on a δ-gapped complex with maps of degree `eps`:
/// φ = 1 + ∂G + G∂, ψ = (Φ + ∂K + K∂)φ⁻¹, and C′ a small order-preserving shift of C.
pub fn simple_equivalence_instance<R: Rng>(
    rng: &mut R,
    f: Fp,
    n: usize,
    delta: &Action,
    eps: &Action,
    distinct: bool,
) -> EquivalenceCertificate {
    let levels = gapped_levels(delta, if distinct { n + 2 } else { n.div_ceil(2) + 1 });
    let c = random_complex(rng, f, n, &levels, distinct, 3);
    simple_equivalence_on(rng, &c, eps)
}

/// As [`simple_equivalence_instance`] for a given δ-gapped complex.
pub fn simple_equivalence_on<R: Rng>(rng: &mut R, c: &FilteredComplex, eps: &Action) -> EquivalenceCertificate {
    let f = c.field;
    let n = c.dim();
    let id = Matrix::identity(f, n);
    // shift every action level by a rational in [−ε/2, ε/2]
    let mut cp = c.clone();
    let values = c.action_values();
    let offsets: Vec<Action> = values.iter().map(|_| eps.scale(&crate::action::q(rng.gen_range(-4..=4), 8))).collect();
    for b in &mut cp.basis {
        let k = values.iter().position(|v| v == &b.action).expect("value present");
        b.action = &b.action + &offsets[k];
    }
    let homotopy_like = |rng: &mut R| random_filtered_map(rng, c, c, 1, false, 0.4);
    let g = homotopy_like(rng);
    let phi_c = id.add(&c.d.mul(&g)).add(&g.mul(&c.d));
    let h = homotopy_like(rng);
    let unit = random_unit(rng, f);
    let auto = id.add(&c.d.mul(&h)).add(&h.mul(&c.d)).scale(unit);
    let k = homotopy_like(rng);
    let phi_inv = phi_c.inverse().expect("unipotent");
    let psi_c = auto.add(&c.d.mul(&k)).add(&k.mul(&c.d)).mul(&phi_inv);
    let auto_p = phi_c.mul(&auto).mul(&phi_inv);
    let k_p = phi_c.mul(&k).mul(&phi_inv);
    // hide the shared basis on the C′ side
    let t = random_basis_change(rng, &cp, 0.3);
    let tinv = t.inverse().expect("invertible");
    let cp2 = cp.change_basis(&t).expect("invertible");
    let phi = tinv.mul(&phi_c);
    let psi = psi_c.mul(&t);
    let auto_p2 = tinv.mul(&auto_p).mul(&t);
    let k_p2 = tinv.mul(&k_p).mul(&t);
    EquivalenceCertificate {
        phi: DegreeEpsMap { source: c.clone(), target: cp2.clone(), matrix: phi, eps: eps.clone(), chain: true },
        psi: DegreeEpsMap { source: cp2, target: c.clone(), matrix: psi, eps: eps.clone(), chain: true },
        left: HomotopyCertificate { automorphism: auto, homotopy: k },
        right: HomotopyCertificate { automorphism: auto_p2, homotopy: k_p2 },
    }
}

/// A birth/death instance: C = C′ ⊕ {x, y} with ∂x = k·y placed in `[a + δ, a + 3δ)` at
/// action distance ≤ ε, C′ avoiding `[a, a + 4δ)`, hidden by a filtered basis change.
pub struct BirthDeathInstance {
    pub c: FilteredComplex,
    pub c_prime: FilteredComplex,
    pub a: Action,
    pub delta: Action,
    pub eps: Action,
    pub cert: EquivalenceCertificate,
    pub k: u32,
}

pub fn birth_death_instance<R: Rng>(rng: &mut R, f: Fp, n_rest: usize, delta: &Action, eps: &Action) -> BirthDeathInstance {
    // rest occupies levels 0..4 and 9..13 in units of δ; the window is [5δ, 9δ)
    let mut levels = gapped_levels(delta, 4);
    levels.extend((9..13).map(|i| delta.scale(&qi(i))));
    let rest = random_complex(rng, f, n_rest, &levels, false, 3);
    let a = delta.scale(&qi(5));
    let deg = rng.gen_range(0..3);
    let ly = &a + &delta.scale(&crate::action::q(3, 2));
    let lx = &ly + &eps.half();
    let k = random_unit(rng, f);
    let n = n_rest + 2;
    let mut basis = rest.basis.clone();
    basis.push(BasisElem::new("py", deg, ly));
    basis.push(BasisElem::new("px", deg + 1, lx));
    let mut d = Matrix::zeros(f, n, n);
    for (i, j, v) in rest.d.entries() {
        d.set(i, j, v);
    }
    d.set(n - 2, n - 1, k);
    let c0 = FilteredComplex::new(f, 0, basis, d, Window::full()).expect("direct sum is valid");
    let mut proj = Matrix::zeros(f, n_rest, n);
    let mut incl = Matrix::zeros(f, n, n_rest);
    for i in 0..n_rest {
        proj.set(i, i, 1);
        incl.set(i, i, 1);
    }
    // −K with K(y) = k⁻¹x contracts the pair
    let mut kmat = Matrix::zeros(f, n, n);
    kmat.set(n - 1, n - 2, f.neg(f.inv(k).expect("unit")));
    let t = random_basis_change(rng, &c0, 0.3);
    let tinv = t.inverse().expect("invertible");
    let c = c0.change_basis(&tinv).expect("invertible");
    let phi = proj.mul(&tinv);
    let psi = t.mul(&incl);
    let kk = t.mul(&kmat).mul(&tinv);
    let cert = EquivalenceCertificate {
        phi: DegreeEpsMap { source: c.clone(), target: rest.clone(), matrix: phi, eps: eps.clone(), chain: true },
        psi: DegreeEpsMap { source: rest.clone(), target: c.clone(), matrix: psi, eps: eps.clone(), chain: true },
        left: HomotopyCertificate { automorphism: Matrix::identity(f, n), homotopy: kk },
        right: HomotopyCertificate::trivial(&rest),
    };
    BirthDeathInstance { c, c_prime: rest, a, delta: delta.clone(), eps: eps.clone(), cert, k }
}

/// Random DGA over `f` with generators in degrees `0..=2`, integer actions, and a differential
/// obtained by applying random elementary moves to a sum of stabilized pairs and closed generators.
pub fn random_dga<R: Rng>(rng: &mut R, f: Fp, n: usize) -> FilteredDGA {
    let mut gens = Vec::new();
    let mut diff = BTreeMap::new();
    let mut i = 0;
    while gens.len() < n {
        let deg = rng.gen_range(0..=1);
        let a = rng.gen_range(1..=20) * 2;
        if gens.len() + 2 <= n && rng.gen_bool(0.4) {
            let lo = Generator::new(format!("g{i}"), deg, Action::int(a));
            let hi = Generator::new(format!("g{}", i + 1), deg + 1, Action::int(a + 1 + rng.gen_range(0..4) * 2));
            diff.insert(hi.name.clone(), FreeElement::gen(f, &lo.name).scale(random_unit(rng, f)));
            gens.push(lo);
            gens.push(hi);
            i += 2;
        } else {
            gens.push(Generator::new(format!("g{i}"), deg, Action::int(a)));
            i += 1;
        }
    }
    let mut dga = FilteredDGA::new(f, 0, gens, diff, None).expect("valid normal form");
    for _ in 0..3 {
        if let Some(mv) = random_elementary(rng, &dga, 2) {
            if let Ok(next) = crate::transform::apply_tame(&dga, &mv) {
                dga = next;
            }
        }
    }
    dga
}

/// A random legal elementary move `x ↦ k·x + w` with `w` a sum of words of length ≤ `max_len`.
pub fn random_elementary<R: Rng>(rng: &mut R, dga: &FilteredDGA, max_len: usize) -> Option<TameMove> {
    let f = dga.field;
    let x = dga.generators.choose(rng)?;
    let others: Vec<&Generator> = dga.generators.iter().filter(|g| g.name != x.name).collect();
    let mut w = FreeElement::zero(f);
    for _ in 0..6 {
        let len = rng.gen_range(0..=max_len);
        let word: Vec<String> = (0..len).filter_map(|_| others.choose(rng).map(|g| g.name.clone())).collect();
        if word.len() != len {
            continue;
        }
        let (Ok(deg), Ok(act)) = (dga.word_degree(&word), dga.word_action(&word)) else { continue };
        if dga.degrees_agree(deg, x.degree) && act < x.action {
            w.add_term(word, random_scalar(rng, f));
        }
    }
    Some(TameMove::Elementary { generator: x.name.clone(), unit: random_unit(rng, f), word: w })
}

/// A random tame move legal on `dga`: elementary, stabilization with fresh names, or
/// destabilization of an existing split pair.
pub fn random_tame_move<R: Rng>(rng: &mut R, dga: &FilteredDGA, fresh: &mut usize) -> Option<TameMove> {
    match rng.gen_range(0..4) {
        0 | 1 => random_elementary(rng, dga, 2),
        2 => {
            let deg = rng.gen_range(0..=1);
            let a = rng.gen_range(1..=20) * 2 + 1;
            let lower = Generator::new(format!("s{fresh}"), deg, Action::int(a));
            let upper = Generator::new(format!("s{}", *fresh + 1), deg + 1, Action::int(a + 2));
            *fresh += 2;
            Some(TameMove::Stabilize { upper, lower })
        }
        _ => dga.generators.iter().find_map(|u| {
            let du = dga.d(&u.name);
            let (w, c) = du.terms().next()?;
            if du.len() != 1 || w.len() != 1 || c != 1 {
                return None;
            }
            let l = dga.generator(&w[0])?;
            let clean = dga.d(&l.name).is_zero()
                && dga.generators.iter().filter(|g| g.name != u.name).all(|g| {
                    let d = dga.d(&g.name);
                    !d.mentions(&u.name) && !d.mentions(&l.name)
                });
            clean.then(|| TameMove::Destabilize { upper: u.clone(), lower: l.clone() })
        }),
    }
}

fn fresh_name(c: &FilteredComplex, stem: &str) -> String {
    (0..).map(|i| format!("{stem}{i}")).find(|n| c.index_of(n).is_none()).expect("unbounded")
}

fn random_combination<R: Rng>(rng: &mut R, f: Fp, len: usize, basis: &[Vec<u32>]) -> Vec<u32> {
    let mut v = vec![0u32; len];
    for b in basis {
        let k = random_scalar(rng, f);
        for (x, y) in v.iter_mut().zip(b) {
            *x = f.add(*x, f.mul(k, *y));
        }
    }
    v
}

/// A random event legal on `c`, of a uniformly chosen kind. New actions are drawn from the
/// half-integers so they never collide with the integer levels used elsewhere. Returns `None`
/// when the chosen kind has no legal instance on `c`.
pub fn random_event<R: Rng>(rng: &mut R, c: &FilteredComplex) -> Option<Event> {
    let f = c.field;
    let n = c.dim();
    let half = |k: i64| Action::rational(crate::action::q(2 * k + 1, 2));
    let min = c.basis.iter().map(|b| b.action.clone()).min();
    let max = c.basis.iter().map(|b| b.action.clone()).max();
    let unique = |a: &Action| c.basis.iter().filter(|b| &b.action == a).count() == 1;
    match rng.gen_range(0..7) {
        0 => {
            let j = rng.gen_range(0..n.max(1));
            if n == 0 {
                return None;
            }
            let sources: Vec<usize> = (0..n)
                .filter(|&i| i != j && c.degrees_agree(c.basis[i].degree, c.basis[j].degree) && c.basis[i].action <= c.basis[j].action)
                .collect();
            let i = if sources.is_empty() || rng.gen_bool(0.2) { j } else { *sources.choose(rng)? };
            Some(Event::HandleSlide { target: c.basis[j].name.clone(), source: c.basis[i].name.clone(), coeff: random_unit(rng, f) })
        }
        1 => {
            let used: Vec<&Action> = c.basis.iter().map(|b| &b.action).collect();
            let free: Vec<i64> = (-20..20).filter(|k| !used.contains(&&half(*k))).collect();
            let a = *free.choose(rng)?;
            let b = *free.iter().filter(|&&k| k > a).collect::<Vec<_>>().choose(rng)?;
            let deg = rng.gen_range(0..3);
            let stem = (0..).map(|i| format!("b{i}")).find(|s| c.index_of(s).is_none() && c.index_of(&format!("{s}u")).is_none())?;
            let upper = BasisElem::new(format!("{stem}u"), deg + 1, half(*b));
            let lower = BasisElem::new(stem, deg, half(a));
            Some(Event::Birth { upper, lower, coeff: random_unit(rng, f) })
        }
        2 => {
            let pairs: Vec<(usize, usize)> = (0..n)
                .flat_map(|x| (0..n).map(move |y| (x, y)))
                .filter(|&(x, y)| {
                    c.d.get(y, x) != 0
                        && c.d.column(x).iter().enumerate().all(|(i, &v)| i == y || v == 0)
                        && c.d.row(y).iter().enumerate().all(|(j, &v)| j == x || v == 0)
                        && c.d.column(y).iter().all(|&v| v == 0)
                        && c.d.row(x).iter().all(|&v| v == 0)
                })
                .collect();
            let &(x, y) = pairs.choose(rng)?;
            Some(Event::Death { upper: c.basis[x].name.clone(), lower: c.basis[y].name.clone() })
        }
        3 => {
            let m = min?;
            unique(&m).then(|| Event::ExitBelow { name: c.basis.iter().find(|b| b.action == m).expect("present").name.clone() })
        }
        4 => {
            let m = max?;
            unique(&m).then(|| Event::ExitAbove { name: c.basis.iter().find(|b| b.action == m).expect("present").name.clone() })
        }
        5 => {
            let deg = rng.gen_range(-1..3);
            let below = min.map(|m| m.as_rational().map(|r| r.floor().to_integer()).unwrap_or_default()).unwrap_or_default();
            let k = num::ToPrimitive::to_i64(&below).unwrap_or(0) - 1 - rng.gen_range(0..3);
            let s: Vec<usize> = (0..n).filter(|&i| c.degrees_agree(c.basis[i].degree, deg + 1)).collect();
            let all: Vec<usize> = (0..n).collect();
            let ker = c.d.submatrix(&s, &all).transpose().kernel();
            let r = random_combination(rng, f, s.len(), &ker);
            let row = s.iter().zip(&r).filter(|(_, v)| **v != 0).map(|(&i, &v)| (c.basis[i].name.clone(), v)).collect();
            Some(Event::EntryBelow { elem: BasisElem::new(fresh_name(c, "n"), deg, half(k)), row })
        }
        _ => {
            let deg = rng.gen_range(0..4);
            let above = max.map(|m| m.as_rational().map(|r| r.ceil().to_integer()).unwrap_or_default()).unwrap_or_default();
            let k = num::ToPrimitive::to_i64(&above).unwrap_or(0) + rng.gen_range(0..3);
            let s: Vec<usize> = (0..n).filter(|&i| c.degrees_agree(c.basis[i].degree, deg - 1)).collect();
            let all: Vec<usize> = (0..n).collect();
            let ker = c.d.submatrix(&all, &s).kernel();
            let v = random_combination(rng, f, s.len(), &ker);
            let column = s.iter().zip(&v).filter(|(_, x)| **x != 0).map(|(&i, &x)| (c.basis[i].name.clone(), x)).collect();
            Some(Event::EntryAbove { elem: BasisElem::new(fresh_name(c, "m"), deg, half(k)), column })
        }
    }
}

/// A valid Rabinowitz instance: a link DGA whose mixed parts linearize (at the zero
/// augmentation) to random filtered complexes, with banana counts `B = ∂₁₀H + H∂₀₁` for a random
/// degree-preserving `H`, so that `B` is a chain map. Returns the link, the counts and `H`.
pub fn random_link_instance<R: Rng>(rng: &mut R, f: Fp, n01: usize, n10: usize, n: i64) -> (LinkDGA, BananaCounts, Matrix) {
    let pos: Vec<Action> = (1..=40).map(Action::int).collect();
    let neg: Vec<Action> = (1..=40).map(|k| Action::int(-k)).collect();
    let c01 = random_complex(rng, f, n01, &pos, true, 3);
    let k10 = random_complex(rng, f, n10, &neg, true, 3);
    let mut gens = Vec::new();
    let mut diff = BTreeMap::new();
    for (j, b) in c01.basis.iter().enumerate() {
        gens.push(Generator::new(format!("x{j}"), b.degree, b.action.clone()).with_flavor(Flavor::Mixed01));
        let terms: Vec<(i64, Vec<String>)> =
            (0..n01).filter(|&i| c01.d.get(i, j) != 0).map(|i| (c01.d.get(i, j) as i64, vec![format!("x{i}")])).collect();
        diff.insert(format!("x{j}"), FreeElement::from_terms(f, terms));
    }
    // ∂y = Σ_x K(y, x)·x makes the transposed linearization equal to K
    for (i, b) in k10.basis.iter().enumerate() {
        gens.push(Generator::new(format!("y{i}"), n - 2 - b.degree, -&b.action).with_flavor(Flavor::Mixed10));
        let terms: Vec<(i64, Vec<String>)> =
            (0..n10).filter(|&x| k10.d.get(i, x) != 0).map(|x| (k10.d.get(i, x) as i64, vec![format!("y{x}")])).collect();
        diff.insert(format!("y{i}"), FreeElement::from_terms(f, terms));
    }
    let dga = FilteredDGA::new(f, 0, gens, diff, None).expect("consistent names");
    let link = LinkDGA::new(dga).expect("valid link");
    let mut h = Matrix::zeros(f, n10, n01);
    for i in 0..n10 {
        for j in 0..n01 {
            if k10.basis[i].degree == c01.basis[j].degree && rng.gen_bool(0.5) {
                h.set(i, j, random_scalar(rng, f));
            }
        }
    }
    let b = k10.d.mul(&h).add(&h.mul(&c01.d));
    let counts = BananaCounts { entries: b.entries().map(|(i, j, v)| ((format!("x{j}"), format!("y{i}")), v)).collect() };
    (link, counts, h)
}
