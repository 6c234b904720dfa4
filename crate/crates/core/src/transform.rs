//! Tame moves, stable-tame isomorphisms, augmentations, linearization, and the two
//! constructive decompositions: destabilization of a cancelling pair and elementary
//! factorization in GL(2, ℤ).

use std::collections::{BTreeMap, BTreeSet};

use crate::algebra::{FreeElement, Generator, Word};
use crate::complex::{BasisElem, FilteredComplex, Window};
use crate::dga::{fmt_word, FilteredDGA};
use crate::error::{Error, Result};
use crate::field::Fp;
use crate::matrix::Matrix;

/// A unital algebra map to the ground field, stored by its nonzero generator values.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Augmentation {
    pub values: BTreeMap<String, u32>,
}

impl Augmentation {
    pub fn zero() -> Self {
        Augmentation { values: BTreeMap::new() }
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, u32)>) -> Self {
        Augmentation { values: pairs.into_iter().filter(|(_, v)| *v != 0).map(|(k, v)| (k.to_string(), v)).collect() }
    }

    pub fn value(&self, name: &str) -> u32 {
        self.values.get(name).copied().unwrap_or(0)
    }

    /// ε applied to a word: the product of letter values, with ε(1) = 1.
    pub fn eval_word(&self, f: Fp, w: &[String]) -> u32 {
        w.iter().fold(1 % f.p(), |acc, l| f.mul(acc, self.value(l)))
    }

    pub fn eval(&self, e: &FreeElement) -> u32 {
        let f = e.field();
        e.terms().fold(0, |acc, (w, c)| f.add(acc, f.mul(c, self.eval_word(f, w))))
    }

    /// Graded, supported on known generators, and ε∘∂ = 0.
    pub fn validate(&self, dga: &FilteredDGA) -> Result<()> {
        for (name, &v) in &self.values {
            let g = dga.generator(name).ok_or_else(|| Error::InvalidInput(format!("augmentation mentions unknown generator {name:?}")))?;
            if v % dga.field.p() != 0 && !dga.degrees_agree(g.degree, 0) {
                return Err(Error::InvalidInput(format!("augmentation is nonzero on {name:?} of degree {}", g.degree)));
            }
        }
        for g in &dga.generators {
            let v = self.eval(&dga.d(&g.name));
            if v != 0 {
                return Err(Error::InvalidInput(format!("ε(∂{}) = {v} ≠ 0", g.name)));
            }
        }
        Ok(())
    }

    /// Images of the generators under Ψ_ε(a) = a − ε(a) (sign = −1) or its inverse (sign = +1).
    fn psi_images(&self, dga: &FilteredDGA, sign: u32) -> BTreeMap<String, FreeElement> {
        let f = dga.field;
        dga.generators
            .iter()
            .filter(|g| self.value(&g.name) != 0)
            .map(|g| {
                let mut e = FreeElement::gen(f, &g.name);
                e.add_term(Vec::new(), f.mul(sign, self.value(&g.name)));
                (g.name.clone(), e)
            })
            .collect()
    }

    /// Ψ_ε(e), the algebra automorphism a ↦ a − ε(a) on generators.
    pub fn psi(&self, dga: &FilteredDGA, e: &FreeElement) -> Result<FreeElement> {
        e.substitute(&self.psi_images(dga, dga.field.neg(1)))
    }

    /// Ψ_ε⁻¹(e), the algebra automorphism a ↦ a + ε(a) on generators.
    pub fn psi_inv(&self, dga: &FilteredDGA, e: &FreeElement) -> Result<FreeElement> {
        e.substitute(&self.psi_images(dga, 1))
    }
}

/// One step of a stable-tame isomorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TameMove {
    /// Φ(x) = k·x + w on `generator`, identity elsewhere; ∂′ = Φ∂Φ⁻¹.
    Elementary { generator: String, unit: u32, word: FreeElement },
    /// Add `lower`, `upper` with ∂(upper) = lower.
    Stabilize { upper: Generator, lower: Generator },
    /// Remove a pair with ∂(upper) = lower that is disjoint from all other differentials.
    Destabilize { upper: Generator, lower: Generator },
    /// Rename generators, old ↦ new. Degrees must agree; actions may change.
    Identify { map: Vec<(Generator, Generator)> },
}

impl TameMove {
    pub fn inverse(&self, f: Fp) -> Result<TameMove> {
        Ok(match self {
            TameMove::Elementary { generator, unit, word } => {
                let kinv = f.inv(*unit).ok_or_else(|| Error::IllegalMove("elementary move with non-unit scalar".into()))?;
                TameMove::Elementary { generator: generator.clone(), unit: kinv, word: word.scale(f.neg(kinv)) }
            }
            TameMove::Stabilize { upper, lower } => TameMove::Destabilize { upper: upper.clone(), lower: lower.clone() },
            TameMove::Destabilize { upper, lower } => TameMove::Stabilize { upper: upper.clone(), lower: lower.clone() },
            TameMove::Identify { map } => TameMove::Identify { map: map.iter().map(|(a, b)| (b.clone(), a.clone())).collect() },
        })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            TameMove::Elementary { .. } => "elementary",
            TameMove::Stabilize { .. } => "stabilize",
            TameMove::Destabilize { .. } => "destabilize",
            TameMove::Identify { .. } => "identify",
        }
    }
}

/// An ordered list of tame moves.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Sti {
    pub moves: Vec<TameMove>,
}

impl Sti {
    /// Apply every move in order, validating each intermediate DGA.
    pub fn apply(&self, dga: &FilteredDGA) -> Result<FilteredDGA> {
        self.moves.iter().try_fold(dga.clone(), |acc, m| apply_tame(&acc, m))
    }

    pub fn inverse(&self, f: Fp) -> Result<Sti> {
        let moves = self.moves.iter().rev().map(|m| m.inverse(f)).collect::<Result<Vec<_>>>()?;
        Ok(Sti { moves })
    }

    /// Carry an augmentation of the source along every move.
    pub fn transport(&self, dga: &FilteredDGA, eps: &Augmentation) -> Result<(FilteredDGA, Augmentation)> {
        let mut cur = dga.clone();
        let mut e = eps.clone();
        for m in &self.moves {
            e = transport_augmentation(&cur, m, &e)?;
            cur = apply_tame(&cur, m)?;
        }
        Ok((cur, e))
    }
}

fn check_fresh(dga: &FilteredDGA, name: &str) -> Result<()> {
    if dga.generator(name).is_some() {
        return Err(Error::IllegalMove(format!("name collision: {name:?} already exists")));
    }
    Ok(())
}

/// Apply a tame move and validate the result.
pub fn apply_tame(dga: &FilteredDGA, mv: &TameMove) -> Result<FilteredDGA> {
    let f = dga.field;
    let out = match mv {
        TameMove::Elementary { generator, unit, word } => {
            let x = dga.generator(generator).ok_or_else(|| Error::IllegalMove(format!("unknown generator {generator:?}")))?;
            let kinv = f.inv(*unit).ok_or_else(|| Error::IllegalMove(format!("{unit} is not a unit in F_{}", f.p())))?;
            if word.field() != f {
                return Err(Error::ContextMismatch("elementary word over a different field".into()));
            }
            if word.mentions(generator) {
                return Err(Error::IllegalMove(format!("elementary word mentions {generator:?} itself")));
            }
            for (w, _) in word.terms() {
                let dw = dga.word_degree(w)?;
                if !dga.degrees_agree(dw, x.degree) {
                    return Err(Error::IllegalMove(format!(
                        "word {} has degree {dw}, generator {generator:?} has degree {}",
                        fmt_word(w),
                        x.degree
                    )));
                }
                let a = dga.word_action(w)?;
                if a >= x.action {
                    return Err(Error::IllegalMove(format!(
                        "illegal action bound: ℓ({}) = {a} is not below ℓ({generator}) = {}",
                        fmt_word(w),
                        x.action
                    )));
                }
            }
            let mut phi = FreeElement::gen(f, generator).scale(*unit);
            phi = phi.add(word)?;
            let phi_map: BTreeMap<String, FreeElement> = [(generator.clone(), phi)].into_iter().collect();
            let phi_inv = FreeElement::gen(f, generator).sub(word)?.scale(kinv);
            let phi_inv_map: BTreeMap<String, FreeElement> = [(generator.clone(), phi_inv)].into_iter().collect();
            let mut diff = BTreeMap::new();
            for g in &dga.generators {
                let pre = FreeElement::gen(f, &g.name).substitute(&phi_inv_map)?;
                let d = dga.apply_differential(&pre)?;
                diff.insert(g.name.clone(), d.substitute(&phi_map)?);
            }
            FilteredDGA::new(f, dga.grading_modulus, dga.generators.clone(), diff, dga.action_level.clone())?
        }
        TameMove::Stabilize { upper, lower } => {
            check_fresh(dga, &upper.name)?;
            check_fresh(dga, &lower.name)?;
            if upper.name == lower.name {
                return Err(Error::IllegalMove("stabilization needs two distinct names".into()));
            }
            if !dga.degrees_agree(upper.degree, lower.degree + 1) {
                return Err(Error::IllegalMove(format!(
                    "stabilization degrees {} and {} do not differ by one",
                    upper.degree, lower.degree
                )));
            }
            let mut gens = dga.generators.clone();
            gens.push(lower.clone());
            gens.push(upper.clone());
            let mut diff = dga.differential.clone();
            diff.insert(upper.name.clone(), FreeElement::gen(f, &lower.name));
            FilteredDGA::new(f, dga.grading_modulus, gens, diff, dga.action_level.clone())?
        }
        TameMove::Destabilize { upper, lower } => {
            let not_form = || Error::IllegalMove(format!("destabilize target not of form ∂{} = {} exactly", upper.name, lower.name));
            let (Some(u), Some(l)) = (dga.generator(&upper.name), dga.generator(&lower.name)) else {
                return Err(not_form());
            };
            if u != upper || l != lower {
                return Err(Error::IllegalMove("destabilize data does not match the DGA's generators".into()));
            }
            if dga.d(&upper.name) != FreeElement::gen(f, &lower.name) || !dga.d(&lower.name).is_zero() {
                return Err(not_form());
            }
            for g in &dga.generators {
                if g.name == upper.name {
                    continue;
                }
                let d = dga.d(&g.name);
                if d.mentions(&upper.name) || d.mentions(&lower.name) {
                    return Err(Error::IllegalMove(format!("∂{} still involves {} or {}", g.name, upper.name, lower.name)));
                }
            }
            let keep: BTreeSet<String> = dga.names().into_iter().filter(|n| *n != upper.name && *n != lower.name).collect();
            dga.restrict(&keep)?
        }
        TameMove::Identify { map } => {
            let mut rename = BTreeMap::new();
            let mut new_gen = BTreeMap::new();
            for (old, new) in map {
                let g =
                    dga.generator(&old.name).ok_or_else(|| Error::IllegalMove(format!("identify: unknown generator {:?}", old.name)))?;
                if g.degree != new.degree {
                    return Err(Error::IllegalMove(format!("identify changes the degree of {:?}", old.name)));
                }
                if rename.insert(old.name.clone(), new.name.clone()).is_some() {
                    return Err(Error::IllegalMove(format!("identify lists {:?} twice", old.name)));
                }
                new_gen.insert(old.name.clone(), Generator { flavor: g.flavor, ..new.clone() });
            }
            let gens: Vec<Generator> = dga.generators.iter().map(|g| new_gen.get(&g.name).cloned().unwrap_or_else(|| g.clone())).collect();
            let names: BTreeSet<&str> = gens.iter().map(|g| g.name.as_str()).collect();
            if names.len() != gens.len() {
                return Err(Error::IllegalMove("identify is not a bijection on names".into()));
            }
            let diff =
                dga.differential.iter().map(|(k, v)| (rename.get(k).cloned().unwrap_or_else(|| k.clone()), v.rename(&rename))).collect();
            FilteredDGA::new(f, dga.grading_modulus, gens, diff, dga.action_level.clone())?
        }
    };
    out.validate().into_result().map_err(|e| Error::IllegalMove(format!("{} move produces an invalid DGA: {e}", mv.kind())))?;
    Ok(out)
}

/// The augmentation of the target of `mv` corresponding to `eps` on the source (ε∘Φ⁻¹).
pub fn transport_augmentation(dga: &FilteredDGA, mv: &TameMove, eps: &Augmentation) -> Result<Augmentation> {
    let f = dga.field;
    Ok(match mv {
        TameMove::Elementary { generator, unit, word } => {
            // Φ⁻¹(x) = k⁻¹(x − w)
            let kinv = f.inv(*unit).ok_or_else(|| Error::IllegalMove("non-unit scalar".into()))?;
            let v = f.mul(kinv, f.sub(eps.value(generator), eps.eval(word)));
            let mut values = eps.values.clone();
            values.remove(generator);
            if v != 0 {
                values.insert(generator.clone(), v);
            }
            Augmentation { values }
        }
        TameMove::Stabilize { .. } => eps.clone(),
        TameMove::Destabilize { upper, lower } => {
            let mut values = eps.values.clone();
            values.remove(&upper.name);
            values.remove(&lower.name);
            Augmentation { values }
        }
        TameMove::Identify { map } => {
            let rename: BTreeMap<&str, &str> = map.iter().map(|(a, b)| (a.name.as_str(), b.name.as_str())).collect();
            Augmentation {
                values: eps.values.iter().map(|(k, v)| (rename.get(k.as_str()).map_or(k.clone(), |s| s.to_string()), *v)).collect(),
            }
        }
    })
}

/// Exhaustive search for augmentations over the degree-0 generators.
pub fn find_augmentations(dga: &FilteredDGA, max_candidates: u64) -> Result<Vec<Augmentation>> {
    let f = dga.field;
    let zero_deg: Vec<&str> = dga.generators.iter().filter(|g| dga.degrees_agree(g.degree, 0)).map(|g| g.name.as_str()).collect();
    let count = (f.p() as u64).checked_pow(zero_deg.len() as u32);
    match count {
        Some(c) if c <= max_candidates => {}
        _ => {
            return Err(Error::Overflow(format!(
                "{} degree-0 generators over F_{} exceed the cap of {max_candidates} candidates",
                zero_deg.len(),
                f.p()
            )))
        }
    }
    // only differentials of degree-1 generators can have degree-0 words
    let relevant: Vec<FreeElement> =
        dga.generators.iter().filter(|g| dga.degrees_agree(g.degree, 1)).map(|g| dga.d(&g.name)).filter(|d| !d.is_zero()).collect();
    let mut out = Vec::new();
    let mut vals = vec![0u32; zero_deg.len()];
    loop {
        let eps = Augmentation::from_pairs(zero_deg.iter().copied().zip(vals.iter().copied()));
        if relevant.iter().all(|d| eps.eval(d) == 0) {
            out.push(eps);
        }
        // odometer, last generator fastest
        let mut i = zero_deg.len();
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            vals[i] += 1;
            if vals[i] < f.p() {
                break;
            }
            vals[i] = 0;
        }
    }
}

/// The DGA with differential ∂^ε = Ψ_ε⁻¹ ∘ ∂ ∘ Ψ_ε, i.e. conjugation by a ↦ a + ε(a). This is
/// the twist that kills constant terms in every characteristic (over 𝔽₂ both orders agree).
pub fn conjugate_by_augmentation(dga: &FilteredDGA, eps: &Augmentation) -> Result<FilteredDGA> {
    eps.validate(dga)?;
    let f = dga.field;
    let mut diff = BTreeMap::new();
    for g in &dga.generators {
        let pre = eps.psi(dga, &FreeElement::gen(f, &g.name))?;
        let d = dga.apply_differential(&pre)?;
        diff.insert(g.name.clone(), eps.psi_inv(dga, &d)?);
    }
    FilteredDGA::new(f, dga.grading_modulus, dga.generators.clone(), diff, dga.action_level.clone())
}

/// Linearized complex: the word-length-one part of ∂^ε on the span of the generators.
pub fn linearize(dga: &FilteredDGA, eps: &Augmentation) -> Result<FilteredComplex> {
    let conj = conjugate_by_augmentation(dga, eps)?;
    let f = dga.field;
    let n = dga.generators.len();
    let mut d = Matrix::zeros(f, n, n);
    for (j, g) in dga.generators.iter().enumerate() {
        for (w, c) in conj.d(&g.name).word_length_part(1).terms() {
            let i = dga.index_of(&w[0]).expect("letters belong to the DGA");
            d.add_to(i, j, c);
        }
    }
    let basis = dga.generators.iter().map(|g| BasisElem::new(g.name.clone(), g.degree, g.action.clone())).collect();
    FilteredComplex::new(f, dga.grading_modulus, basis, d, Window::new(None, dga.action_level.clone()))
}

/// Homotopy H with ∂H + H∂ = id − π on the subalgebra where ∂x = y: on a word whose first
/// letter from {x, y} is y, replace that y by x with sign (−1)^{|prefix|}; zero otherwise.
fn cancel_homotopy(dga: &FilteredDGA, e: &FreeElement, x: &str, y: &str) -> Result<FreeElement> {
    let f = dga.field;
    let mut out = FreeElement::zero(f);
    for (w, c) in e.terms() {
        let Some(pos) = w.iter().position(|l| l == x || l == y) else { continue };
        if w[pos] != y {
            continue;
        }
        let prefix_deg = dga.word_degree(&w[..pos])?;
        let mut nw: Word = w.clone();
        nw[pos] = x.to_string();
        out.add_term(nw, f.mul(c, f.sign(prefix_deg)));
    }
    Ok(out)
}

/// Cancel a pair with ∂x = k·y + w (ℓ(w) < ℓ(y)): normalize ∂x = y, clear x and y from every
/// other differential, then destabilize. Returns the moves and the resulting DGA.
pub fn destabilize_pair(dga: &FilteredDGA, x: &str, y: &str) -> Result<(Sti, FilteredDGA)> {
    let f = dga.field;
    let gx = dga.generator(x).ok_or_else(|| Error::Precondition(format!("unknown generator {x:?}")))?.clone();
    let gy = dga.generator(y).ok_or_else(|| Error::Precondition(format!("unknown generator {y:?}")))?.clone();
    let dx = dga.d(x);
    let yword = vec![y.to_string()];
    let k = dx.coeff(&yword);
    if k == 0 {
        return Err(Error::Precondition(format!("{y} is not a term of ∂{x}")));
    }
    let rest = dx.sub(&FreeElement::monomial(f, yword.clone(), k))?;
    if rest.mentions(y) || rest.mentions(x) {
        return Err(Error::Precondition(format!("∂{x} − k·{y} still involves {x} or {y}")));
    }
    for (w, _) in rest.terms() {
        if dga.word_action(w)? >= gy.action {
            return Err(Error::Precondition(format!("{y} is not the leading term of ∂{x}: ℓ({}) ≥ ℓ({y})", fmt_word(w))));
        }
    }
    let mut sti = Sti::default();
    let mut cur = dga.clone();
    if k != 1 || !rest.is_zero() {
        // Φ(y) = k⁻¹(y − w) so that Φ(∂x) = y
        let kinv = f.inv(k).expect("nonzero in a field");
        let mv = TameMove::Elementary { generator: y.to_string(), unit: kinv, word: rest.scale(f.neg(kinv)) };
        cur = apply_tame(&cur, &mv)?;
        sti.moves.push(mv);
    }
    // clear x, y from the other differentials, lowest action first, ties in list order
    let mut order: Vec<usize> = (0..cur.generators.len()).collect();
    order.sort_by(|&a, &b| cur.generators[a].action.cmp(&cur.generators[b].action).then(a.cmp(&b)));
    for idx in order {
        let z = cur.generators[idx].name.clone();
        if z == x || z == y {
            continue;
        }
        let dz = cur.d(&z);
        if !dz.mentions(x) && !dz.mentions(y) {
            continue;
        }
        let hw = cancel_homotopy(&cur, &dz, x, y)?;
        if hw.is_zero() {
            return Err(Error::Precondition(format!("cannot clear {x} from ∂{z}")));
        }
        let mv = TameMove::Elementary { generator: z.clone(), unit: 1, word: hw };
        cur = apply_tame(&cur, &mv).map_err(|e| Error::Precondition(format!("clearing ∂{z}: {e}")))?;
        sti.moves.push(mv);
    }
    let mv = TameMove::Destabilize { upper: gx, lower: gy };
    cur = apply_tame(&cur, &mv)?;
    sti.moves.push(mv);
    Ok((sti, cur))
}

/// Same generators (as a set), same differential.
pub fn same_presentation(a: &FilteredDGA, b: &FilteredDGA) -> bool {
    let ga: BTreeSet<_> = a.generators.iter().map(|g| (g.name.clone(), g.degree, g.action.clone())).collect();
    let gb: BTreeSet<_> = b.generators.iter().map(|g| (g.name.clone(), g.degree, g.action.clone())).collect();
    a.field == b.field && ga == gb && a.differential == b.differential
}

pub type Mat2 = [[i64; 2]; 2];

pub const UPPER: Mat2 = [[1, 1], [0, 1]];
pub const UPPER_INV: Mat2 = [[1, -1], [0, 1]];
pub const LOWER: Mat2 = [[1, 0], [1, 1]];
pub const LOWER_INV: Mat2 = [[1, 0], [-1, 1]];
pub const FLIP: Mat2 = [[-1, 0], [0, 1]];

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

pub fn mat2_product(factors: &[Mat2]) -> Mat2 {
    factors.iter().fold([[1, 0], [0, 1]], |acc, m| mat2_mul(&acc, m))
}

fn mat2_inverse_generator(m: &Mat2) -> Mat2 {
    match *m {
        UPPER => UPPER_INV,
        UPPER_INV => UPPER,
        LOWER => LOWER_INV,
        LOWER_INV => LOWER,
        _ => unreachable!("only elementary generators are inverted"),
    }
}

/// Write `m` (det ±1) as a product of [[1,1],[0,1]], [[1,0],[1,1]] and their inverses,
/// followed by one [[−1,0],[0,1]] when det = −1.
pub fn decompose_gl2z(m: &Mat2) -> Result<Vec<Mat2>> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if det.abs() != 1 {
        return Err(Error::InvalidInput(format!("determinant {det} is not ±1")));
    }
    if det == -1 {
        let mut f = decompose_sl2z(&mat2_mul(m, &FLIP));
        f.push(FLIP);
        return Ok(f);
    }
    Ok(decompose_sl2z(m))
}

fn decompose_sl2z(m: &Mat2) -> Vec<Mat2> {
    let mut cur = *m;
    let mut ops: Vec<Mat2> = Vec::new();
    let left = |cur: &mut Mat2, e: Mat2, ops: &mut Vec<Mat2>| {
        *cur = mat2_mul(&e, cur);
        ops.push(e);
    };
    while cur[0][0] != 0 && cur[1][0] != 0 {
        let (a, c) = (cur[0][0], cur[1][0]);
        let same = (a > 0) == (c > 0);
        if a.abs() > c.abs() {
            left(&mut cur, if same { UPPER_INV } else { UPPER }, &mut ops);
        } else {
            left(&mut cur, if same { LOWER_INV } else { LOWER }, &mut ops);
        }
    }
    // first column is now a signed unit vector; a short search brings it to (1, 0)
    if !(cur[0][0] == 1 && cur[1][0] == 0) {
        let gens = [UPPER, UPPER_INV, LOWER, LOWER_INV];
        let mut frontier: Vec<(Mat2, Vec<Mat2>)> = vec![(cur, Vec::new())];
        let mut found = None;
        'search: for _ in 0..6 {
            let mut next = Vec::new();
            for (mm, path) in &frontier {
                for g in gens {
                    let nm = mat2_mul(&g, mm);
                    let mut np = path.clone();
                    np.push(g);
                    if nm[0][0] == 1 && nm[1][0] == 0 {
                        found = Some((nm, np));
                        break 'search;
                    }
                    next.push((nm, np));
                }
            }
            frontier = next;
        }
        let (nm, path) = found.expect("SL(2,Z) column reduction terminates");
        cur = nm;
        ops.extend(path);
    }
    let b = cur[0][1];
    let mut factors: Vec<Mat2> = ops.iter().map(mat2_inverse_generator).collect();
    let u = if b >= 0 { UPPER } else { UPPER_INV };
    factors.extend(std::iter::repeat_n(u, b.unsigned_abs() as usize));
    // cancel adjacent inverse pairs
    let mut out: Vec<Mat2> = Vec::new();
    for fct in factors {
        if out.last().is_some_and(|l| mat2_inverse_generator(l) == fct) {
            out.pop();
        } else {
            out.push(fct);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::Action;

    fn g(n: &str, d: i64, a: i64) -> Generator {
        Generator::new(n, d, Action::int(a))
    }

    fn build(f: Fp, gens: Vec<Generator>, diff: Vec<(&str, FreeElement)>) -> FilteredDGA {
        let d = diff.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
        let a = FilteredDGA::new(f, 0, gens, d, None).unwrap();
        assert!(a.validate().passed(), "{:?}", a.validate());
        a
    }

    #[test]
    fn stabilize_unit_algebra() {
        let f = Fp::two();
        let unit = FilteredDGA::unit(f);
        let s = apply_tame(&unit, &TameMove::Stabilize { upper: g("y", 1, 2), lower: g("x", 0, 1) }).unwrap();
        assert_eq!(s.d("y"), FreeElement::gen(f, "x"));
        assert!(s.d("x").is_zero());
    }

    #[test]
    fn elementary_then_inverse_is_identity() {
        let f = Fp::two();
        let a = build(
            f,
            vec![g("z", 0, 1), g("x", 0, 5), g("w", 1, 7)],
            vec![("w", FreeElement::from_terms(f, [(1, vec!["x"]), (1, vec!["z", "z", "z"])]))],
        );
        let mv = TameMove::Elementary { generator: "x".into(), unit: 1, word: FreeElement::from_terms(f, [(1, vec!["z", "z"])]) };
        let b = apply_tame(&a, &mv).unwrap();
        assert_ne!(a, b);
        let c = apply_tame(&b, &mv.inverse(f).unwrap()).unwrap();
        assert_eq!(a, c);
    }

    #[test]
    fn scaling_in_f3() {
        let f = Fp::new(3).unwrap();
        let a = build(f, vec![g("y", 0, 1), g("x", 1, 2)], vec![("x", FreeElement::gen(f, "y"))]);
        let mv = TameMove::Elementary { generator: "y".into(), unit: 2, word: FreeElement::zero(f) };
        let b = apply_tame(&a, &mv).unwrap();
        // ∂′x = Φ(y) = 2y, and 2 = 2⁻¹ in F_3
        assert_eq!(b.d("x"), FreeElement::gen(f, "y").scale(2));
        assert_eq!(f.inv(2), Some(2));
    }

    #[test]
    fn elementary_action_bound_is_enforced() {
        let f = Fp::two();
        let a = build(f, vec![g("z", 0, 3), g("x", 0, 5)], vec![]);
        let mv = TameMove::Elementary { generator: "x".into(), unit: 1, word: FreeElement::from_terms(f, [(1, vec!["z", "z"])]) };
        assert!(matches!(apply_tame(&a, &mv), Err(Error::IllegalMove(m)) if m.contains("illegal action bound")));
    }

    #[test]
    fn stabilize_name_collision() {
        let f = Fp::two();
        let a = build(f, vec![g("x", 0, 1)], vec![]);
        let r = apply_tame(&a, &TameMove::Stabilize { upper: g("y", 1, 3), lower: g("x", 0, 2) });
        assert!(matches!(r, Err(Error::IllegalMove(m)) if m.contains("name collision")));
    }

    #[test]
    fn augmentation_search_examples() {
        let f = Fp::two();
        let a = build(f, vec![g("a", 0, 1)], vec![]);
        assert_eq!(find_augmentations(&a, 16).unwrap().len(), 2);
        let b = build(f, vec![g("b", 1, 1)], vec![("b", FreeElement::one(f))]);
        assert!(find_augmentations(&b, 16).unwrap().is_empty());
        let many = build(f, (0..5).map(|i| g(&format!("a{i}"), 0, 1)).collect(), vec![]);
        assert!(matches!(find_augmentations(&many, 16), Err(Error::Overflow(_))));
    }

    fn abcd(f: Fp) -> FilteredDGA {
        build(
            f,
            vec![g("b", 0, 1), g("c", 0, 1), g("d", 0, 2), g("a", 1, 5)],
            vec![("a", FreeElement::from_terms(f, [(1, vec!["b", "c"]), (1, vec!["d"])]))],
        )
    }

    #[test]
    fn conjugation_example() {
        let f = Fp::two();
        let a = abcd(f);
        let zero = Augmentation::zero();
        assert_eq!(conjugate_by_augmentation(&a, &zero).unwrap(), a);
        let eps = Augmentation::from_pairs([("b", 1)]);
        let c = conjugate_by_augmentation(&a, &eps).unwrap();
        let expected = FreeElement::from_terms(f, [(1, vec!["b", "c"]), (1, vec!["c"]), (1, vec!["d"])]);
        assert_eq!(c.d("a"), expected);
    }

    #[test]
    fn linearization_examples() {
        let f = Fp::two();
        let a = abcd(f);
        let lin0 = linearize(&a, &Augmentation::zero()).unwrap();
        let (ia, id) = (lin0.index_of("a").unwrap(), lin0.index_of("d").unwrap());
        assert_eq!(lin0.d.column(ia).iter().filter(|&&x| x != 0).count(), 1);
        assert_eq!(lin0.d.get(id, ia), 1);
        let lin1 = linearize(&a, &Augmentation::from_pairs([("b", 1)])).unwrap();
        let ic = lin1.index_of("c").unwrap();
        assert_eq!(lin1.d.get(ic, ia), 1);
        assert_eq!(lin1.d.get(id, ia), 1);
        assert_eq!(lin1.d.column(ia).iter().filter(|&&x| x != 0).count(), 2);
    }

    #[test]
    fn destabilize_examples() {
        let f = Fp::two();
        let a = build(f, vec![g("y", 0, 1), g("x", 1, 2)], vec![("x", FreeElement::gen(f, "y"))]);
        let (sti, out) = destabilize_pair(&a, "x", "y").unwrap();
        assert_eq!(sti.moves.len(), 1);
        assert!(out.generators.is_empty());

        let b = build(
            f,
            vec![g("z", 0, 1), g("y", 0, 3), g("x", 1, 4)],
            vec![("x", FreeElement::from_terms(f, [(1, vec!["y"]), (1, vec!["z", "z"])]))],
        );
        let (sti, out) = destabilize_pair(&b, "x", "y").unwrap();
        assert_eq!(sti.moves.len(), 2);
        match &sti.moves[0] {
            TameMove::Elementary { generator, unit, word } => {
                assert_eq!(generator, "y");
                assert_eq!(*unit, 1);
                assert_eq!(*word, FreeElement::from_terms(f, [(1, vec!["z", "z"])]));
            }
            other => panic!("unexpected move {other:?}"),
        }
        assert_eq!(out.names(), vec!["z".to_string()]);
        assert!(out.d("z").is_zero());

        let f3 = Fp::new(3).unwrap();
        let c = build(f3, vec![g("y", 0, 1), g("x", 1, 2)], vec![("x", FreeElement::gen(f3, "y").scale(2))]);
        let (sti, out) = destabilize_pair(&c, "x", "y").unwrap();
        assert_eq!(sti.moves.len(), 2);
        assert!(out.generators.is_empty());
    }

    #[test]
    fn destabilize_clears_other_differentials_and_replays() {
        let f = Fp::new(3).unwrap();
        let a = build(
            f,
            vec![g("z", 0, 1), g("y", 0, 3), g("x", 1, 4), g("w", 1, 6)],
            vec![("x", FreeElement::gen(f, "y")), ("w", FreeElement::from_terms(f, [(1, vec!["z", "y"]), (2, vec!["y"])]))],
        );
        let (sti, out) = destabilize_pair(&a, "x", "y").unwrap();
        assert!(out.validate().passed());
        for gname in out.names() {
            assert!(!out.d(&gname).mentions("x") && !out.d(&gname).mentions("y"));
        }
        let back = sti.inverse(f).unwrap().apply(&out).unwrap();
        assert!(same_presentation(&back, &a));
    }

    #[test]
    fn destabilize_precondition() {
        let f = Fp::two();
        let a = build(f, vec![g("y", 0, 1), g("x", 1, 2)], vec![]);
        assert!(matches!(destabilize_pair(&a, "x", "y"), Err(Error::Precondition(_))));
    }

    #[test]
    fn gl2z_examples() {
        assert!(decompose_gl2z(&[[1, 0], [0, 1]]).unwrap().is_empty());
        assert_eq!(decompose_gl2z(&UPPER).unwrap(), vec![UPPER]);
        assert_eq!(decompose_gl2z(&[[2, 1], [1, 1]]).unwrap(), vec![UPPER, LOWER]);
        assert!(decompose_gl2z(&[[2, 0], [0, 1]]).is_err());
        let f = decompose_gl2z(&[[0, 1], [1, 0]]).unwrap();
        assert_eq!(mat2_product(&f), [[0, 1], [1, 0]]);
        assert_eq!(f.iter().filter(|m| **m == FLIP).count(), 1);
    }

    #[test]
    fn conjugation_has_no_constant_terms_in_odd_characteristic() {
        let f = Fp::new(3).unwrap();
        let mut dx = FreeElement::gen(f, "a");
        dx.add_term(Vec::new(), f.neg(1));
        let a = build(f, vec![g("a", 0, 1), g("x", 1, 2)], vec![("x", dx)]);
        let c = conjugate_by_augmentation(&a, &Augmentation::from_pairs([("a", 1)])).unwrap();
        assert_eq!(c.d("x"), FreeElement::gen(f, "a"));
    }
}
