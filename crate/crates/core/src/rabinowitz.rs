//! The Rabinowitz Floer complex of a two-component link: the mapping cone of the banana map
//! `B` from the linearized complex of mixed chords `0 → 1` to the dual co-complex of mixed
//! chords `1 → 0`.
//!
//! Generator actions in a [`LinkDGA`] are Reeb chord lengths (positive). The filtration
//! action is `𝔞 = ℓ` on mixed01 chords and `𝔞 = −ℓ` on mixed10 chords.

use std::collections::{BTreeMap, BTreeSet};

use crate::action::Action;
use crate::algebra::{Flavor, Generator};
use crate::complex::{build_cone, BasisElem, ConeData, ConeGrading, FilteredComplex, Window};
use crate::dga::FilteredDGA;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::transform::Augmentation;

/// A link DGA: pure chords on either component and mixed chords between them. Pure
/// differentials stay pure; every word of a differential has at most one mixed letter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkDGA {
    dga: FilteredDGA,
}

impl LinkDGA {
    pub fn new(dga: FilteredDGA) -> Result<Self> {
        for g in &dga.generators {
            if g.flavor == Flavor::Orbit {
                return Err(Error::InvalidInput(format!("{} is an orbit, not a chord", g.name)));
            }
            if g.action.signum().is_le() {
                return Err(Error::InvalidInput(format!("chord {} has nonpositive length {}", g.name, g.action)));
            }
        }
        dga.validate().into_result()?;
        let flavor = |name: &str| dga.generator(name).expect("letters are generators").flavor;
        for g in &dga.generators {
            for (w, _) in dga.d(&g.name).terms() {
                let mixed = w.iter().filter(|l| flavor(l).is_mixed()).count();
                if g.flavor.is_pure() && mixed > 0 {
                    return Err(Error::InvalidInput(format!("∂{} (pure) contains a mixed chord", g.name)));
                }
                if mixed > 1 {
                    return Err(Error::InvalidInput(format!("∂{} has a word with {mixed} mixed letters", g.name)));
                }
            }
        }
        Ok(LinkDGA { dga })
    }

    pub fn dga(&self) -> &FilteredDGA {
        &self.dga
    }

    pub fn into_dga(self) -> FilteredDGA {
        self.dga
    }

    pub fn chords(&self, flavor: Flavor) -> impl Iterator<Item = &Generator> {
        self.dga.generators.iter().filter(move |g| g.flavor == flavor)
    }
}

/// Banana counts `m(x₀₁⁺, y₁₀⁺)`, already weighted by the augmentation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BananaCounts {
    pub entries: BTreeMap<(String, String), u32>,
}

impl BananaCounts {
    pub fn zero() -> Self {
        BananaCounts::default()
    }

    pub fn from_triples<'a>(t: impl IntoIterator<Item = (&'a str, &'a str, u32)>) -> Self {
        BananaCounts { entries: t.into_iter().map(|(x, y, c)| ((x.to_string(), y.to_string()), c)).collect() }
    }

    pub fn get(&self, x01: &str, y10: &str) -> u32 {
        self.entries.get(&(x01.to_string(), y10.to_string())).copied().unwrap_or(0)
    }
}

/// `d01` on mixed01 chords and the co-differential `d10` on mixed10 chords. `c10` carries raw
/// (cohomological) degrees, so its differential raises degree by one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearizedBlocks {
    pub c01: FilteredComplex,
    pub c10: FilteredComplex,
}

/// Linearize the mixed part of `link` at `eps`. Words with exactly one mixed letter of the
/// right flavor contribute their coefficient times `ε` of the pure letters. Pure chords at or
/// above `ceiling` must have an explicit augmentation value.
pub fn derive_linearized_blocks(link: &LinkDGA, eps: &Augmentation, ceiling: Option<&Action>) -> Result<LinearizedBlocks> {
    let dga = &link.dga;
    let f = dga.field;
    eps.validate(dga)?;
    if let Some(g) = dga.generators.iter().find(|g| g.flavor.is_mixed() && eps.value(&g.name) != 0) {
        return Err(Error::InvalidInput(format!("augmentation is nonzero on the mixed chord {}", g.name)));
    }
    let side = |fl: Flavor| -> Vec<&Generator> { link.chords(fl).collect() };
    let (m01, m10) = (side(Flavor::Mixed01), side(Flavor::Mixed10));
    let pos = |v: &[&Generator]| -> BTreeMap<String, usize> { v.iter().enumerate().map(|(i, g)| (g.name.clone(), i)).collect() };
    let (p01, p10) = (pos(&m01), pos(&m10));

    let eps_of = |z: &str| -> Result<u32> {
        let g = dga.generator(z).expect("letters are generators");
        if ceiling.is_some_and(|c| g.action >= *c) && !eps.values.contains_key(z) {
            return Err(Error::InvalidInput(format!("augmentation undefined on {z} (length {} above the ceiling)", g.action)));
        }
        Ok(eps.value(z))
    };
    // entries (row, col, coeff) of the word-length-one part in letters of `flavor`
    let linear = |src: &[&Generator], targets: &BTreeMap<String, usize>, flavor: Flavor| -> Result<Vec<(usize, usize, u32)>> {
        let mut out = Vec::new();
        for (j, x) in src.iter().enumerate() {
            for (w, c) in dga.d(&x.name).terms() {
                let mixed: Vec<usize> = (0..w.len()).filter(|&i| dga.generator(&w[i]).expect("known").flavor.is_mixed()).collect();
                if mixed.len() > 1 {
                    return Err(Error::InvalidInput(format!("∂{} has a word with {} mixed letters", x.name, mixed.len())));
                }
                let Some(&m) = mixed.first() else { continue };
                if dga.generator(&w[m]).expect("known").flavor != flavor {
                    continue;
                }
                let mut k = c;
                for (i, z) in w.iter().enumerate() {
                    if i != m {
                        k = f.mul(k, eps_of(z)?);
                    }
                }
                if k != 0 {
                    out.push((targets[&w[m]], j, k));
                }
            }
        }
        Ok(out)
    };

    let mut d01 = Matrix::zeros(f, m01.len(), m01.len());
    for (i, j, k) in linear(&m01, &p01, Flavor::Mixed01)? {
        d01.add_to(i, j, k);
    }
    // d10(x) = Σ_y ⟨∂^ε y, x⟩ y: the transpose of the linearized differential on mixed10 chords
    let mut d10 = Matrix::zeros(f, m10.len(), m10.len());
    for (x, y, k) in linear(&m10, &p10, Flavor::Mixed10)? {
        d10.add_to(y, x, k);
    }
    let basis = |v: &[&Generator], sign: i64| -> Vec<BasisElem> {
        v.iter().map(|g| BasisElem::new(g.name.clone(), g.degree, g.action.scale(&crate::action::qi(sign)))).collect()
    };
    let c01 = FilteredComplex::new(f, dga.grading_modulus, basis(&m01, 1), d01, Window::full())
        .map_err(|e| Error::InvalidInput(format!("d01: {e}")))?;
    let c10 = FilteredComplex::new_unchecked(f, dga.grading_modulus, basis(&m10, -1), d10, Window::full())?;
    c10.map_degrees(|k| -k).validate().map_err(|e| Error::InvalidInput(format!("d10: {e}")))?;
    Ok(LinearizedBlocks { c01, c10 })
}

/// A Rabinowitz Floer complex with the data it was built from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RfcComplex {
    pub cone: FilteredComplex,
    pub data: ConeData,
    pub augmentation: Augmentation,
    pub window: Window,
    pub n: i64,
}

impl RfcComplex {
    /// The complex carries a ℤ/m grading rather than a ℤ grading.
    pub fn is_ungraded(&self) -> bool {
        self.cone.grading_modulus != 0
    }
}

fn select(c: &FilteredComplex, window: &Window, keep: impl Fn(&Action) -> bool) -> FilteredComplex {
    let idx: Vec<usize> = (0..c.dim()).filter(|&i| window.contains(&c.basis[i].action) && keep(&c.basis[i].action)).collect();
    c.restrict(&idx, c.window.intersect(window))
}

/// Assemble `RFC^{[a,b)} = C₀₁ ⊕ C^{n−*−2}₁₀` with cone differential over `B`. The C₁₀ degree of a
/// chord of cohomological degree `k` is `n − k − 2`.
pub fn build_rfc(link: &LinkDGA, eps: &Augmentation, counts: &BananaCounts, window: &Window, n: i64) -> Result<RfcComplex> {
    let width = match (&window.lo, &window.hi) {
        (Some(a), Some(b)) => Some(b - a),
        _ => None,
    };
    let blocks = derive_linearized_blocks(link, eps, width.as_ref())?;
    let f = link.dga.field;
    let names = |fl: Flavor| -> BTreeSet<&str> { link.chords(fl).map(|g| g.name.as_str()).collect() };
    let (n01, n10) = (names(Flavor::Mixed01), names(Flavor::Mixed10));
    for ((x, y), _) in counts.entries.iter().filter(|(_, c)| **c % f.p() != 0) {
        if !n01.contains(x.as_str()) || !n10.contains(y.as_str()) {
            return Err(Error::InvalidInput(format!("banana count ({x}, {y}) is not a (mixed01, mixed10) pair")));
        }
    }
    let c01 = select(&blocks.c01, window, |a| a.signum().is_gt());
    let c10 = select(&blocks.c10, window, |a| a.signum().is_lt());
    let mut b = Matrix::zeros(f, c10.dim(), c01.dim());
    for (j, x) in c01.basis.iter().enumerate() {
        for (i, y) in c10.basis.iter().enumerate() {
            b.set(i, j, f.reduce(counts.get(&x.name, &y.name) as i64));
        }
    }
    let data = ConeData { c01, c10, b };
    let mut cone = build_cone(&data, ConeGrading::Rabinowitz { n })?;
    cone.window = window.clone();
    cone.validate()?;
    Ok(RfcComplex { cone, data, augmentation: eps.clone(), window: window.clone(), n })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AcyclicityReport {
    pub acyclic: bool,
    pub homology: BTreeMap<i64, usize>,
    /// A partition of the positive-action chords into pairs `(c, d)` with `𝔞(d) > 𝔞(c)` and
    /// `|d| − |c| = 1`, when one exists. When none exists the positive part is not acyclic.
    pub pairing: Option<Vec<(String, String)>>,
}

/// Homology of the cone and the pairing test on the C₀₁ chords.
pub fn rfc_acyclicity(rfc: &RfcComplex) -> AcyclicityReport {
    let homology = rfc.cone.homology_dims();
    AcyclicityReport { acyclic: homology.values().all(|&d| d == 0), homology, pairing: chord_pairing(&rfc.data.c01.basis) }
}

/// Perfect matching of chords into pairs `(c, d)` with `𝔞(d) > 𝔞(c)` and `|d| = |c| + 1`. Edges join
/// chords of adjacent integer degree, so the graph is bipartite by degree parity.
pub fn chord_pairing(chords: &[BasisElem]) -> Option<Vec<(String, String)>> {
    if chords.len() % 2 == 1 {
        return None;
    }
    let (even, odd): (Vec<usize>, Vec<usize>) = (0..chords.len()).partition(|&i| chords[i].degree.rem_euclid(2) == 0);
    let edge = |c: &BasisElem, d: &BasisElem| d.action > c.action && d.degree == c.degree + 1;
    let adj: Vec<Vec<usize>> = even
        .iter()
        .map(|&e| (0..odd.len()).filter(|&k| edge(&chords[e], &chords[odd[k]]) || edge(&chords[odd[k]], &chords[e])).collect())
        .collect();
    let mut owner: Vec<Option<usize>> = vec![None; odd.len()];
    fn augment(u: usize, adj: &[Vec<usize>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                if owner[v].is_none_or(|w| augment(w, adj, seen, owner)) {
                    owner[v] = Some(u);
                    return true;
                }
            }
        }
        false
    }
    for u in 0..even.len() {
        let mut seen = vec![false; odd.len()];
        if !augment(u, &adj, &mut seen, &mut owner) {
            return None;
        }
    }
    if even.len() != odd.len() {
        return None;
    }
    let mut pairs: Vec<(String, String)> = owner
        .iter()
        .enumerate()
        .map(|(k, u)| {
            let (a, b) = (&chords[even[u.expect("perfect matching")]], &chords[odd[k]]);
            if a.action < b.action {
                (a.name.clone(), b.name.clone())
            } else {
                (b.name.clone(), a.name.clone())
            }
        })
        .collect();
    pairs.sort();
    Some(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FreeElement;
    use crate::field::Fp;

    fn gen(name: &str, deg: i64, len: i64, fl: Flavor) -> Generator {
        Generator::new(name, deg, Action::int(len)).with_flavor(fl)
    }

    fn link(f: Fp, gens: Vec<Generator>, d: Vec<(&str, FreeElement)>) -> LinkDGA {
        let diff = d.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
        LinkDGA::new(FilteredDGA::new(f, 0, gens, diff, None).unwrap()).unwrap()
    }

    fn words(f: Fp, t: &[(i64, &[&str])]) -> FreeElement {
        FreeElement::from_terms(f, t.iter().map(|(c, w)| (*c, w.to_vec())))
    }

    #[test]
    fn linearized_examples() {
        let f = Fp::two();
        let gens = || {
            vec![
                gen("z", 0, 1, Flavor::Pure0),
                gen("y", 0, 3, Flavor::Mixed01),
                gen("w", 0, 2, Flavor::Mixed01),
                gen("x", 1, 10, Flavor::Mixed01),
            ]
        };
        let l = link(f, gens(), vec![("x", words(f, &[(1, &["y"])]))]);
        let b = derive_linearized_blocks(&l, &Augmentation::zero(), None).unwrap();
        assert_eq!(b.c01.d.get(b.c01.index_of("y").unwrap(), b.c01.index_of("x").unwrap()), 1);

        let l = link(f, gens(), vec![("x", words(f, &[(1, &["z", "y"])]))]);
        let b = derive_linearized_blocks(&l, &Augmentation::zero(), None).unwrap();
        assert!(b.c01.d.is_zero());

        let l = link(f, gens(), vec![("x", words(f, &[(1, &["z", "y"]), (1, &["w"])]))]);
        let b = derive_linearized_blocks(&l, &Augmentation::from_pairs([("z", 1)]), None).unwrap();
        let x = b.c01.index_of("x").unwrap();
        assert_eq!(b.c01.d.get(b.c01.index_of("y").unwrap(), x), 1);
        assert_eq!(b.c01.d.get(b.c01.index_of("w").unwrap(), x), 1);
    }

    #[test]
    fn two_mixed_letters_rejected() {
        let f = Fp::two();
        let gens = vec![gen("a", 0, 1, Flavor::Mixed01), gen("b", 0, 1, Flavor::Mixed10), gen("x", 1, 5, Flavor::Mixed01)];
        let diff = [("x".to_string(), words(f, &[(1, &["a", "b", "a"])]))].into();
        let dga = FilteredDGA::new(f, 0, gens, diff, None).unwrap();
        assert!(LinkDGA::new(dga).is_err());
    }

    #[test]
    fn undefined_augmentation_above_ceiling() {
        let f = Fp::two();
        let gens = vec![gen("z", 0, 7, Flavor::Pure0), gen("y", 0, 1, Flavor::Mixed01), gen("x", 1, 10, Flavor::Mixed01)];
        let l = link(f, gens, vec![("x", words(f, &[(1, &["z", "y"])]))]);
        assert!(derive_linearized_blocks(&l, &Augmentation::zero(), Some(&Action::int(5))).is_err());
        assert!(derive_linearized_blocks(&l, &Augmentation { values: [("z".to_string(), 0)].into() }, Some(&Action::int(5))).is_ok());
    }

    #[test]
    fn zero_counts_give_direct_sum() {
        let f = Fp::two();
        let gens = vec![
            gen("y", 0, 1, Flavor::Mixed01),
            gen("x", 1, 3, Flavor::Mixed01),
            gen("p", 0, 1, Flavor::Mixed10),
            gen("q", 1, 2, Flavor::Mixed10),
        ];
        let l = link(f, gens, vec![("x", words(f, &[(1, &["y"])])), ("q", words(f, &[(1, &["p"])]))]);
        let w = Window::finite(Action::int(-10), Action::int(10));
        let rfc = build_rfc(&l, &Augmentation::zero(), &BananaCounts::zero(), &w, 3).unwrap();
        assert_eq!(rfc.cone.dim(), 4);
        // d10(p) = q with 𝔞(q) = −2 < 𝔞(p) = −1; cone degrees n − k − 2
        let (p, q) = (rfc.cone.index_of("p").unwrap(), rfc.cone.index_of("q").unwrap());
        assert_eq!(rfc.cone.d.get(q, p), 1);
        assert_eq!(rfc.cone.basis[p].degree, 1);
        assert_eq!(rfc.cone.basis[q].degree, 0);
        let r = rfc_acyclicity(&rfc);
        assert!(r.acyclic);
        assert_eq!(r.pairing, Some(vec![("y".into(), "x".into())]));
    }

    #[test]
    fn chain_map_failure_names_pair() {
        let f = Fp::two();
        let gens = vec![gen("y", 0, 1, Flavor::Mixed01), gen("x", 1, 3, Flavor::Mixed01), gen("p", 0, 5, Flavor::Mixed10)];
        let l = link(f, gens, vec![("x", words(f, &[(1, &["y"])]))]);
        // n = 1 puts p in degree −1, so B(y) = p is allowed, but then B∂x = p while ∂B(x) = 0
        let counts = BananaCounts::from_triples([("y", "p", 1)]);
        let w = Window::finite(Action::int(-10), Action::int(10));
        let e = build_rfc(&l, &Augmentation::zero(), &counts, &w, 1).unwrap_err();
        assert!(e.to_string().contains("(x, p)"), "{e}");
    }

    #[test]
    fn pairing_examples() {
        let b = |n: &str, d: i64, a: i64| BasisElem::new(n, d, Action::int(a));
        assert!(chord_pairing(&[b("c", 0, 1)]).is_none());
        assert!(chord_pairing(&[b("c", 0, 2), b("d", 1, 1)]).is_none());
        assert!(chord_pairing(&[b("c", 0, 1), b("d", 1, 2), b("e", 1, 3), b("g", 2, 4)]).is_some());
        assert!(chord_pairing(&[]).is_some());
    }
}
