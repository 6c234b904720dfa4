//! Semifree filtered DGAs with an action ceiling.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::action::Action;
use crate::algebra::{element_action, word_action, FreeElement, Generator, Word};
use crate::error::{Error, Result};
use crate::field::Fp;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilteredDGA {
    pub field: Fp,
    /// 0 means ℤ-graded; otherwise degrees are read mod this number.
    pub grading_modulus: u32,
    pub generators: Vec<Generator>,
    pub differential: BTreeMap<String, FreeElement>,
    /// `None` is +∞.
    pub action_level: Option<Action>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    Degree,
    Filtration,
    SquareNonzero,
    Ceiling,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub generator: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.generator, self.message)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    pub fn into_result(self) -> Result<()> {
        if self.passed() {
            Ok(())
        } else {
            let msgs: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
            Err(Error::InvalidInput(msgs.join("; ")))
        }
    }
}

impl FilteredDGA {
    /// Assemble a DGA, checking only structural consistency (names, fields, letters).
    /// Use [`FilteredDGA::validate`] for the DGA axioms.
    pub fn new(
        field: Fp,
        grading_modulus: u32,
        generators: Vec<Generator>,
        differential: BTreeMap<String, FreeElement>,
        action_level: Option<Action>,
    ) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for g in &generators {
            if !seen.insert(g.name.clone()) {
                return Err(Error::InvalidInput(format!("duplicate generator name {:?}", g.name)));
            }
        }
        for (x, dx) in &differential {
            if !seen.contains(x) {
                return Err(Error::ContextMismatch(format!("differential given for unknown generator {x:?}")));
            }
            if dx.field() != field {
                return Err(Error::ContextMismatch(format!("differential of {x:?} over a different field")));
            }
            if let Some(l) = dx.letters().find(|l| !seen.contains(*l)) {
                return Err(Error::ContextMismatch(format!("∂{x} mentions unknown generator {l:?}")));
            }
        }
        let differential = differential.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        Ok(FilteredDGA { field, grading_modulus, generators, differential, action_level })
    }

    /// The unit algebra: no generators.
    pub fn unit(field: Fp) -> Self {
        FilteredDGA { field, grading_modulus: 0, generators: Vec::new(), differential: BTreeMap::new(), action_level: None }
    }

    pub fn generator(&self, name: &str) -> Option<&Generator> {
        self.generators.iter().find(|g| g.name == name)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    pub fn names(&self) -> Vec<String> {
        self.generators.iter().map(|g| g.name.clone()).collect()
    }

    pub fn action_of(&self, name: &str) -> Option<Action> {
        self.generator(name).map(|g| g.action.clone())
    }

    pub fn degree_of(&self, name: &str) -> Option<i64> {
        self.generator(name).map(|g| g.degree)
    }

    pub fn word_degree(&self, word: &[String]) -> Result<i64> {
        word.iter().map(|l| self.degree_of(l).ok_or_else(|| Error::ContextMismatch(format!("unknown generator {l:?}")))).sum()
    }

    pub fn word_action(&self, word: &[String]) -> Result<Action> {
        word_action(word, |n| self.action_of(n))
    }

    pub fn element_action(&self, e: &FreeElement) -> Result<Option<Action>> {
        element_action(e, |n| self.action_of(n))
    }

    pub fn degrees_agree(&self, a: i64, b: i64) -> bool {
        match self.grading_modulus {
            0 => a == b,
            m => (a - b).rem_euclid(m as i64) == 0,
        }
    }

    pub fn d(&self, name: &str) -> FreeElement {
        self.differential.get(name).cloned().unwrap_or_else(|| FreeElement::zero(self.field))
    }

    fn check_element(&self, e: &FreeElement) -> Result<()> {
        if e.field() != self.field {
            return Err(Error::ContextMismatch(format!("element over F_{} used in a DGA over F_{}", e.field().p(), self.field.p())));
        }
        if let Some(l) = e.letters().find(|l| self.generator(l).is_none()) {
            return Err(Error::ContextMismatch(format!("generator name {l:?} not in this DGA")));
        }
        Ok(())
    }

    /// Product inside this DGA's algebra.
    pub fn multiply(&self, a: &FreeElement, b: &FreeElement) -> Result<FreeElement> {
        self.check_element(a)?;
        self.check_element(b)?;
        a.mul(b)
    }

    /// Leibniz extension: ∂(a₁⋯aₙ) = Σ (−1)^{|a₁|+⋯+|aᵢ₋₁|} a₁⋯∂(aᵢ)⋯aₙ.
    pub fn apply_differential(&self, e: &FreeElement) -> Result<FreeElement> {
        self.check_element(e)?;
        let f = self.field;
        let mut out = FreeElement::zero(f);
        for (w, c) in e.terms() {
            let mut prefix_deg = 0i64;
            for (i, letter) in w.iter().enumerate() {
                let dl = self.d(letter);
                if !dl.is_zero() {
                    let coeff = f.mul(c, f.sign(prefix_deg));
                    let left: Word = w[..i].to_vec();
                    let right: Word = w[i + 1..].to_vec();
                    for (mid, cm) in dl.terms() {
                        let mut nw = left.clone();
                        nw.extend(mid.iter().cloned());
                        nw.extend(right.iter().cloned());
                        out.add_term(nw, f.mul(coeff, cm));
                    }
                }
                prefix_deg += self.degree_of(letter).expect("checked above");
            }
        }
        Ok(out)
    }

    /// Check the DGA axioms and report every violation found.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        for g in &self.generators {
            if let Some(l) = &self.action_level {
                if g.action >= *l {
                    violations.push(Violation {
                        kind: ViolationKind::Ceiling,
                        generator: g.name.clone(),
                        message: format!("action {} not below the ceiling {}", g.action, l),
                    });
                }
            }
            let dx = self.d(&g.name);
            if dx.is_zero() {
                continue;
            }
            for (w, _) in dx.terms() {
                match self.word_degree(w) {
                    Ok(dw) if self.degrees_agree(dw, g.degree - 1) => {}
                    Ok(dw) => violations.push(Violation {
                        kind: ViolationKind::Degree,
                        generator: g.name.clone(),
                        message: format!("∂ does not have degree −1: word {} has degree {dw}, expected {}", fmt_word(w), g.degree - 1),
                    }),
                    Err(e) => violations.push(Violation { kind: ViolationKind::Degree, generator: g.name.clone(), message: e.to_string() }),
                }
                if let Ok(a) = self.word_action(w) {
                    if a >= g.action {
                        violations.push(Violation {
                            kind: ViolationKind::Filtration,
                            generator: g.name.clone(),
                            message: format!("filtration not strictly decreased: word {} has action {a} ≥ {}", fmt_word(w), g.action),
                        });
                    }
                }
            }
            match self.apply_differential(&dx) {
                Ok(ddx) if ddx.is_zero() => {}
                Ok(ddx) => violations.push(Violation {
                    kind: ViolationKind::SquareNonzero,
                    generator: g.name.clone(),
                    message: format!("∂² ≠ 0: ∂∂{} = {ddx}", g.name),
                }),
                Err(e) => {
                    violations.push(Violation { kind: ViolationKind::SquareNonzero, generator: g.name.clone(), message: e.to_string() })
                }
            }
        }
        ValidationReport { violations }
    }

    /// Sub-DGA data restricted to the named generators (differentials must stay inside).
    pub fn restrict(&self, keep: &BTreeSet<String>) -> Result<FilteredDGA> {
        let generators: Vec<Generator> = self.generators.iter().filter(|g| keep.contains(&g.name)).cloned().collect();
        let differential: BTreeMap<String, FreeElement> =
            self.differential.iter().filter(|(k, _)| keep.contains(*k)).map(|(k, v)| (k.clone(), v.clone())).collect();
        FilteredDGA::new(self.field, self.grading_modulus, generators, differential, self.action_level.clone())
    }
}

pub(crate) fn fmt_word(w: &[String]) -> String {
    if w.is_empty() {
        "1".into()
    } else {
        w.join("*")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gen(n: &str, d: i64, a: i64) -> Generator {
        Generator::new(n, d, Action::int(a))
    }

    fn dga(gens: Vec<Generator>, diff: Vec<(&str, FreeElement)>) -> FilteredDGA {
        let d = diff.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
        FilteredDGA::new(Fp::two(), 0, gens, d, None).unwrap()
    }

    #[test]
    fn unit_is_closed() {
        let a = FilteredDGA::unit(Fp::two());
        assert!(a.apply_differential(&FreeElement::one(Fp::two())).unwrap().is_zero());
        assert!(a.validate().passed());
    }

    #[test]
    fn leibniz_on_square() {
        let f = Fp::two();
        let a = dga(vec![gen("x", 1, 2), gen("y", 0, 1)], vec![("x", FreeElement::gen(f, "y"))]);
        let xx = FreeElement::from_terms(f, [(1, vec!["x", "x"])]);
        let d = a.apply_differential(&xx).unwrap();
        let expected = FreeElement::from_terms(f, [(1, vec!["y", "x"]), (1, vec!["x", "y"])]);
        assert_eq!(d, expected);
    }

    #[test]
    fn leibniz_sign_in_odd_characteristic() {
        let f = Fp::new(3).unwrap();
        let gens = vec![gen("x", 1, 2), gen("y", 0, 1)];
        let d = [("x".to_string(), FreeElement::gen(f, "y"))].into_iter().collect();
        let a = FilteredDGA::new(f, 0, gens, d, None).unwrap();
        let xx = FreeElement::from_terms(f, [(1, vec!["x", "x"])]);
        // ∂(xx) = yx − xy since |x| = 1
        let expected = FreeElement::from_terms(f, [(1, vec!["y", "x"]), (-1, vec!["x", "y"])]);
        assert_eq!(a.apply_differential(&xx).unwrap(), expected);
    }

    #[test]
    fn validation_passes_and_fails_as_expected() {
        let f = Fp::two();
        let ok = dga(vec![gen("x", 1, 2), gen("y", 0, 1)], vec![("x", FreeElement::gen(f, "y"))]);
        assert!(ok.validate().passed());

        let flat = dga(vec![gen("x", 1, 1), gen("y", 0, 1)], vec![("x", FreeElement::gen(f, "y"))]);
        let r = flat.validate();
        assert!(r.has(ViolationKind::Filtration));
        assert!(r.violations[0].message.contains("filtration not strictly decreased"));

        let sq = dga(
            vec![gen("x", 2, 3), gen("y", 1, 2), gen("z", 0, 1)],
            vec![("x", FreeElement::gen(f, "y")), ("y", FreeElement::gen(f, "z"))],
        );
        let r = sq.validate();
        assert!(r.has(ViolationKind::SquareNonzero));
        assert!(r.violations.iter().any(|v| v.message.contains("∂² ≠ 0")));

        let deg = dga(vec![gen("x", 3, 2), gen("y", 0, 1)], vec![("x", FreeElement::gen(f, "y"))]);
        assert!(deg.validate().has(ViolationKind::Degree));

        let mut ceil = ok.clone();
        ceil.action_level = Some(Action::int(2));
        assert!(ceil.validate().has(ViolationKind::Ceiling));
    }

    #[test]
    fn foreign_names_are_rejected() {
        let a = FilteredDGA::unit(Fp::two());
        let x = FreeElement::gen(Fp::two(), "x");
        assert!(matches!(a.multiply(&x, &x), Err(Error::ContextMismatch(_))));
    }

    #[test]
    fn modular_grading() {
        let f = Fp::two();
        let gens = vec![gen("x", 0, 2), gen("y", 1, 1)];
        let d = [("x".to_string(), FreeElement::gen(f, "y"))].into_iter().collect();
        let a = FilteredDGA::new(f, 2, gens, d, None).unwrap();
        assert!(a.validate().passed());
    }
}
