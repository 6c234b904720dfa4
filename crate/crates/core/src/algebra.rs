//! Free noncommutative unital algebras over 𝔽_p.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::action::Action;
use crate::error::{Error, Result};
use crate::field::Fp;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    /// Pure chord of a single Legendrian.
    Pure,
    /// Pure chord on the first component of a two-component link.
    Pure0,
    /// Pure chord on the second component.
    Pure1,
    /// Mixed chord from the first component to the second.
    Mixed01,
    /// Mixed chord from the second component to the first.
    Mixed10,
    Orbit,
}

impl Flavor {
    pub fn is_mixed(self) -> bool {
        matches!(self, Flavor::Mixed01 | Flavor::Mixed10)
    }

    pub fn is_pure(self) -> bool {
        matches!(self, Flavor::Pure | Flavor::Pure0 | Flavor::Pure1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Generator {
    pub name: String,
    pub degree: i64,
    pub action: Action,
    pub flavor: Flavor,
}

impl Generator {
    pub fn new(name: impl Into<String>, degree: i64, action: Action) -> Self {
        Generator { name: name.into(), degree, action, flavor: Flavor::Pure }
    }

    pub fn with_flavor(mut self, flavor: Flavor) -> Self {
        self.flavor = flavor;
        self
    }
}

/// A word in the generators; the empty word is the unit.
pub type Word = Vec<String>;

/// Finite 𝔽_p-linear combination of words. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FreeElement {
    field: Fp,
    terms: BTreeMap<Word, u32>,
}

impl fmt::Debug for FreeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FreeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(w, &c)| {
                let word = if w.is_empty() { "1".to_string() } else { w.join("*") };
                if c == 1 {
                    word
                } else {
                    format!("{c}*{word}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl FreeElement {
    pub fn zero(field: Fp) -> Self {
        FreeElement { field, terms: BTreeMap::new() }
    }

    pub fn one(field: Fp) -> Self {
        Self::monomial(field, Vec::new(), 1)
    }

    pub fn scalar(field: Fp, k: u32) -> Self {
        Self::monomial(field, Vec::new(), k)
    }

    pub fn gen(field: Fp, name: &str) -> Self {
        Self::monomial(field, vec![name.to_string()], 1)
    }

    pub fn monomial(field: Fp, word: Word, coeff: u32) -> Self {
        let mut e = FreeElement::zero(field);
        e.add_term(word, coeff);
        e
    }

    /// Build from `(coefficient, word)` pairs; coefficients are reduced mod p.
    pub fn from_terms<I, W>(field: Fp, terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, W)>,
        W: IntoIterator,
        W::Item: Into<String>,
    {
        let mut e = FreeElement::zero(field);
        for (c, w) in terms {
            e.add_term(w.into_iter().map(Into::into).collect(), field.reduce(c));
        }
        e
    }

    pub fn field(&self) -> Fp {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, u32)> {
        self.terms.iter().map(|(w, &c)| (w, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, word: &[String]) -> u32 {
        self.terms.get(word).copied().unwrap_or(0)
    }

    pub fn add_term(&mut self, word: Word, coeff: u32) {
        let f = self.field;
        let c = coeff % f.p();
        if c == 0 {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(word) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = f.add(*o.get(), c);
                if s == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn check_field(&self, other: &FreeElement) -> Result<()> {
        if self.field != other.field {
            return Err(Error::ContextMismatch(format!("elements over F_{} and F_{}", self.field.p(), other.field.p())));
        }
        Ok(())
    }

    pub fn add(&self, other: &FreeElement) -> Result<FreeElement> {
        self.check_field(other)?;
        let mut out = self.clone();
        for (w, c) in other.terms() {
            out.add_term(w.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &FreeElement) -> Result<FreeElement> {
        self.add(&other.scale(self.field.neg(1)))
    }

    pub fn scale(&self, k: u32) -> FreeElement {
        let f = self.field;
        let mut out = FreeElement::zero(f);
        for (w, c) in self.terms() {
            out.add_term(w.clone(), f.mul(c, k));
        }
        out
    }

    /// Concatenation product, extended bilinearly.
    pub fn mul(&self, other: &FreeElement) -> Result<FreeElement> {
        self.check_field(other)?;
        let f = self.field;
        let mut out = FreeElement::zero(f);
        for (a, ca) in self.terms() {
            for (b, cb) in other.terms() {
                let mut w = a.clone();
                w.extend(b.iter().cloned());
                out.add_term(w, f.mul(ca, cb));
            }
        }
        Ok(out)
    }

    /// Coefficient of the empty word.
    pub fn constant_term(&self) -> u32 {
        self.coeff(&[])
    }

    /// The part spanned by words of exactly `len` letters.
    pub fn word_length_part(&self, len: usize) -> FreeElement {
        let mut out = FreeElement::zero(self.field);
        for (w, c) in self.terms() {
            if w.len() == len {
                out.add_term(w.clone(), c);
            }
        }
        out
    }

    /// All letters occurring in any word.
    pub fn letters(&self) -> impl Iterator<Item = &String> {
        self.terms.keys().flat_map(|w| w.iter())
    }

    pub fn mentions(&self, name: &str) -> bool {
        self.letters().any(|l| l == name)
    }

    /// Apply an algebra map given on generators. Letters absent from `images` are fixed.
    pub fn substitute(&self, images: &BTreeMap<String, FreeElement>) -> Result<FreeElement> {
        let f = self.field;
        let mut out = FreeElement::zero(f);
        for (w, c) in self.terms() {
            let mut prod = FreeElement::scalar(f, c);
            for letter in w {
                let img = match images.get(letter) {
                    Some(e) => e.clone(),
                    None => FreeElement::gen(f, letter),
                };
                prod = prod.mul(&img)?;
                if prod.is_zero() {
                    break;
                }
            }
            out = out.add(&prod)?;
        }
        Ok(out)
    }

    /// Rename letters.
    pub fn rename(&self, map: &BTreeMap<String, String>) -> FreeElement {
        let mut out = FreeElement::zero(self.field);
        for (w, c) in self.terms() {
            let nw = w.iter().map(|l| map.get(l).cloned().unwrap_or_else(|| l.clone())).collect();
            out.add_term(nw, c);
        }
        out
    }
}

/// Action of a word: sum of letter actions, with ℓ(1) = 0.
pub fn word_action(word: &[String], action_of: impl Fn(&str) -> Option<Action>) -> Result<Action> {
    let mut total = Action::zero();
    for letter in word {
        let a = action_of(letter).ok_or_else(|| Error::ContextMismatch(format!("unknown generator {letter:?}")))?;
        total = &total + &a;
    }
    Ok(total)
}

/// Action of an element: maximum over its words, `None` standing for −∞ on the zero element.
pub fn element_action(e: &FreeElement, action_of: impl Fn(&str) -> Option<Action>) -> Result<Option<Action>> {
    let mut best: Option<Action> = None;
    for (w, _) in e.terms() {
        let a = word_action(w, &action_of)?;
        best = Some(match best {
            Some(b) if b >= a => b,
            _ => a,
        });
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_is_neutral() {
        let f = Fp::two();
        let x = FreeElement::gen(f, "x");
        assert_eq!(FreeElement::one(f).mul(&x).unwrap(), x);
        assert_eq!(x.mul(&FreeElement::one(f)).unwrap(), x);
    }

    #[test]
    fn square_of_x_plus_one_in_char_two() {
        let f = Fp::two();
        let e = FreeElement::gen(f, "x").add(&FreeElement::one(f)).unwrap();
        let sq = e.mul(&e).unwrap();
        let expected = FreeElement::from_terms(f, [(1, vec!["x", "x"]), (1, vec![])]);
        assert_eq!(sq, expected);
    }

    #[test]
    fn word_action_is_additive() {
        let acts = |n: &str| match n {
            "x" => Some(Action::ratio(3, 2)),
            "y" => Some(Action::ratio(1, 2)),
            _ => None,
        };
        let w = vec!["x".to_string(), "y".to_string()];
        assert_eq!(word_action(&w, acts).unwrap(), Action::int(2));
        assert_eq!(word_action(&[], acts).unwrap(), Action::zero());
        let zero = FreeElement::zero(Fp::two());
        assert_eq!(element_action(&zero, acts).unwrap(), None);
    }

    #[test]
    fn cancellation_drops_terms() {
        let f = Fp::new(3).unwrap();
        let x = FreeElement::gen(f, "x");
        let s = x.add(&x.scale(2)).unwrap();
        assert!(s.is_zero());
    }

    #[test]
    fn mismatched_fields_are_rejected() {
        let a = FreeElement::gen(Fp::two(), "x");
        let b = FreeElement::gen(Fp::new(3).unwrap(), "x");
        assert!(matches!(a.mul(&b), Err(Error::ContextMismatch(_))));
    }
}
