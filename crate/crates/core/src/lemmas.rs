//! Certificate checkers for small-degree homotopy equivalences: the simple-equivalence lemma
//! (a degree-ε equivalence of a δ-gapped complex is an isomorphism when δ > 4ε) and the
//! birth/death characterization.

use crate::action::Action;
use crate::complex::{check_map_shape, DegreeEpsMap, FilteredComplex};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// `composite = automorphism + ∂K + K∂` with `automorphism` a filtered chain automorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomotopyCertificate {
    pub automorphism: Matrix,
    pub homotopy: Matrix,
}

impl HomotopyCertificate {
    pub fn trivial(c: &FilteredComplex) -> Self {
        HomotopyCertificate { automorphism: Matrix::identity(c.field, c.dim()), homotopy: Matrix::zeros(c.field, c.dim(), c.dim()) }
    }
}

/// Chain maps `φ: C → C′`, `ψ: C′ → C` with certificates for `ψφ` (on C) and `φψ` (on C′).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceCertificate {
    pub phi: DegreeEpsMap,
    pub psi: DegreeEpsMap,
    pub left: HomotopyCertificate,
    pub right: HomotopyCertificate,
}

impl EquivalenceCertificate {
    pub fn identity(c: &FilteredComplex) -> Self {
        EquivalenceCertificate {
            phi: DegreeEpsMap::identity(c),
            psi: DegreeEpsMap::identity(c),
            left: HomotopyCertificate::trivial(c),
            right: HomotopyCertificate::trivial(c),
        }
    }

    pub fn eps(&self) -> Action {
        self.phi.eps.clone().max(self.psi.eps.clone())
    }

    pub fn source(&self) -> &FilteredComplex {
        &self.phi.source
    }

    pub fn target(&self) -> &FilteredComplex {
        &self.phi.target
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleVerdict {
    pub isomorphism: bool,
    /// ψφ is itself a filtered chain automorphism of C.
    pub filtered_automorphism: bool,
    /// ψ is a strict inverse, not only a homotopy inverse.
    pub psi_is_inverse: bool,
    /// With bases in decreasing action, φ(x) = unit·x′ + terms of strictly smaller action.
    /// `None` when some action values coincide.
    pub upper_triangular: Option<bool>,
}

impl SimpleVerdict {
    pub fn confirmed(&self) -> bool {
        self.isomorphism && self.filtered_automorphism && self.upper_triangular != Some(false)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SimpleOutcome {
    Verdict(SimpleVerdict),
    /// Hypotheses of the lemma fail; no verdict is given.
    HypothesisViolated(Vec<String>),
}

/// Whether action values either coincide or differ by at least `delta`.
pub fn is_delta_gapped(c: &FilteredComplex, delta: &Action) -> bool {
    c.action_values().windows(2).all(|w| &(&w[1] - &w[0]) >= delta)
}

fn is_filtered_automorphism(c: &FilteredComplex, m: &Matrix) -> bool {
    m.rows() == c.dim()
        && m.cols() == c.dim()
        && check_map_shape(m, c, c, 0, &Action::zero(), "automorphism").is_ok()
        && c.d.mul(m) == m.mul(&c.d)
        && m.inverse().is_some()
}

fn check_homotopy(c: &FilteredComplex, composite: &Matrix, cert: &HomotopyCertificate, eps: &Action, side: &str) -> Result<()> {
    if !is_filtered_automorphism(c, &cert.automorphism) {
        return Err(Error::Certificate(format!("{side}: supplied automorphism is not a filtered chain automorphism")));
    }
    check_map_shape(&cert.homotopy, c, c, 1, eps, &format!("{side} homotopy")).map_err(|e| Error::Certificate(e.to_string()))?;
    let k = &cert.homotopy;
    let rhs = cert.automorphism.add(&c.d.mul(k)).add(&k.mul(&c.d));
    if &rhs != composite {
        return Err(Error::Certificate(format!("{side}: composite ≠ Φ + ∂K + K∂")));
    }
    Ok(())
}

/// Shape, chain-map, and homotopy identities shared by both lemmas.
pub fn verify_certificate(cert: &EquivalenceCertificate, eps: &Action) -> Result<()> {
    let (c, cp) = (cert.source(), cert.target());
    if cert.psi.source != *cp || cert.psi.target != *c {
        return Err(Error::Certificate("ψ does not go from C′ back to C".into()));
    }
    for (m, name) in [(&cert.phi, "φ"), (&cert.psi, "ψ")] {
        if &m.eps > eps {
            return Err(Error::Certificate(format!("{name} has degree {} > {eps}", m.eps)));
        }
        check_map_shape(&m.matrix, &m.source, &m.target, 0, eps, name).map_err(|e| Error::Certificate(e.to_string()))?;
        if m.target.d.mul(&m.matrix) != m.matrix.mul(&m.source.d) {
            return Err(Error::Certificate(format!("{name} is not a chain map")));
        }
    }
    let psiphi = cert.psi.matrix.mul(&cert.phi.matrix);
    let phipsi = cert.phi.matrix.mul(&cert.psi.matrix);
    check_homotopy(c, &psiphi, &cert.left, eps, "ψφ")?;
    check_homotopy(cp, &phipsi, &cert.right, eps, "φψ")?;
    Ok(())
}

/// Check the hypotheses and certificates of the simple-equivalence lemma and report its conclusions.
pub fn check_simple_equivalence(cert: &EquivalenceCertificate, delta: &Action) -> Result<SimpleOutcome> {
    let (c, cp) = (cert.source(), cert.target());
    let eps = cert.eps();
    let mut problems = Vec::new();
    if delta <= &Action::zero() {
        problems.push(format!("δ = {delta} is not positive"));
    }
    let four_eps = eps.scale(&crate::action::qi(4));
    if delta <= &four_eps {
        problems.push(format!("gap condition fails: δ = {delta} ≤ 4ε = {four_eps}"));
    }
    if !is_delta_gapped(c, delta) {
        problems.push(format!("C is not {delta}-gapped"));
    }
    if c.dim() != cp.dim() {
        problems.push(format!("no basis bijection: dim C = {}, dim C′ = {}", c.dim(), cp.dim()));
    } else if let Some(i) = (0..c.dim()).find(|&i| &c.basis[i].action - &cp.basis[i].action > eps) {
        problems.push(format!("ℓ({}) − ℓ′({}) exceeds ε", c.basis[i].name, cp.basis[i].name));
    }
    if !problems.is_empty() {
        return Ok(SimpleOutcome::HypothesisViolated(problems));
    }
    verify_certificate(cert, &eps)?;

    let phi = &cert.phi.matrix;
    let psiphi = cert.psi.matrix.mul(phi);
    let isomorphism = phi.inverse().is_some();
    let filtered_automorphism = is_filtered_automorphism(c, &psiphi);
    let psi_is_inverse = psiphi == Matrix::identity(c.field, c.dim());
    let distinct = |x: &FilteredComplex| x.action_values().len() == x.dim();
    let upper_triangular = (distinct(c) && distinct(cp)).then(|| {
        // position of each index in decreasing-action order
        let mut order: Vec<usize> = (0..c.dim()).collect();
        order.sort_by(|&a, &b| c.basis[b].action.cmp(&c.basis[a].action));
        let mut pos = vec![0usize; c.dim()];
        for (p, &i) in order.iter().enumerate() {
            pos[i] = p;
        }
        (0..c.dim()).all(|j| phi.get(j, j) != 0) && phi.entries().all(|(i, j, _)| i == j || pos[i] > pos[j])
    });
    Ok(SimpleOutcome::Verdict(SimpleVerdict { isomorphism, filtered_automorphism, psi_is_inverse, upper_triangular }))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BirthDeathVerdict {
    pub upper: String,
    pub lower: String,
    /// `∂upper = coeff · lower` in the window complex.
    pub coeff: u32,
}

/// Check the birth/death characterization at window `[a, a + 4δ)`: C has exactly two basis elements
/// there, both in `[a + δ, a + 3δ)`, C′ has none, δ > ε, and the window complex is acyclic.
pub fn check_birth_death_shape(
    c: &FilteredComplex,
    c_prime: &FilteredComplex,
    a: &Action,
    delta: &Action,
    eps: &Action,
    cert: Option<&EquivalenceCertificate>,
) -> Result<BirthDeathVerdict> {
    let step = |k: i64| a + &delta.scale(&crate::action::qi(k));
    let (top, inner_lo, inner_hi) = (step(4), step(1), step(3));
    let outer = c.window_subquotient(Some(a), Some(&top));
    let inner = c.window_subquotient(Some(&inner_lo), Some(&inner_hi));
    if outer.dim() != 2 {
        return Err(Error::Hypothesis(format!("C^[{a},{top}) has dimension {}, expected 2", outer.dim())));
    }
    if inner.dim() != 2 {
        return Err(Error::Hypothesis(format!("C^[{inner_lo},{inner_hi}) ≠ C^[{a},{top})")));
    }
    let outer_prime = c_prime.window_subquotient(Some(a), Some(&top));
    if outer_prime.dim() != 0 {
        return Err(Error::Hypothesis(format!("C′^[{a},{top}) has dimension {}, expected 0", outer_prime.dim())));
    }
    if delta <= eps {
        return Err(Error::Hypothesis(format!("δ = {delta} ≤ ε = {eps}")));
    }
    let (x, y) = if inner.basis[0].action > inner.basis[1].action { (0, 1) } else { (1, 0) };
    let k = inner.d.get(y, x);
    if k == 0 {
        return Err(Error::Hypothesis("window complex not acyclic".into()));
    }
    if let Some(cert) = cert {
        if cert.source() != c || cert.target() != c_prime {
            return Err(Error::Certificate("certificate maps do not go between C and C′".into()));
        }
        verify_certificate(cert, eps)?;
    }
    Ok(BirthDeathVerdict { upper: inner.basis[x].name.clone(), lower: inner.basis[y].name.clone(), coeff: k })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::Action;
    use crate::complex::{BasisElem, Window};
    use crate::field::Fp;

    fn pair(f: Fp, k: u32, lo: i64, hi: i64) -> FilteredComplex {
        let b = vec![BasisElem::new("y", 0, Action::int(lo)), BasisElem::new("x", 1, Action::int(hi))];
        let mut d = Matrix::zeros(f, 2, 2);
        d.set(0, 1, k);
        FilteredComplex::new(f, 0, b, d, Window::full()).unwrap()
    }

    #[test]
    fn identity_is_simple() {
        let c = pair(Fp::two(), 1, 0, 10);
        let out = check_simple_equivalence(&EquivalenceCertificate::identity(&c), &Action::int(3)).unwrap();
        match out {
            SimpleOutcome::Verdict(v) => assert!(v.confirmed() && v.psi_is_inverse),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn gap_gate() {
        let c = pair(Fp::two(), 1, 0, 10);
        let mut cert = EquivalenceCertificate::identity(&c);
        cert.phi.eps = Action::int(3);
        let out = check_simple_equivalence(&cert, &Action::int(10)).unwrap();
        assert!(matches!(out, SimpleOutcome::HypothesisViolated(_)));
    }

    #[test]
    fn birth_death_examples() {
        let f = Fp::two();
        let empty = FilteredComplex::zero(f);
        let c = pair(f, 1, 1, 2);
        let v = check_birth_death_shape(&c, &empty, &Action::int(0), &Action::int(1), &Action::ratio(1, 2), None).unwrap();
        assert_eq!((v.upper.as_str(), v.lower.as_str(), v.coeff), ("x", "y", 1));
        let c0 = pair(f, 0, 1, 2);
        let e = check_birth_death_shape(&c0, &empty, &Action::int(0), &Action::int(1), &Action::ratio(1, 2), None);
        assert!(matches!(e, Err(Error::Hypothesis(m)) if m == "window complex not acyclic"));
        let f3 = Fp::new(3).unwrap();
        let c2 = pair(f3, 2, 1, 2);
        let v =
            check_birth_death_shape(&c2, &FilteredComplex::zero(f3), &Action::int(0), &Action::int(1), &Action::ratio(1, 2), None).unwrap();
        assert_eq!(v.coeff, 2);
    }
}
