//! Finite-dimensional action-filtered chain complexes, degree-ε maps, and mapping cones.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::action::Action;
use crate::error::{Error, Result};
use crate::field::Fp;
use crate::matrix::Matrix;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisElem {
    pub name: String,
    pub degree: i64,
    pub action: Action,
}

impl BasisElem {
    pub fn new(name: impl Into<String>, degree: i64, action: Action) -> Self {
        BasisElem { name: name.into(), degree, action }
    }
}

/// Half-open action window `[lo, hi)`; `None` is −∞ for `lo` and +∞ for `hi`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Window {
    pub lo: Option<Action>,
    pub hi: Option<Action>,
}

impl Window {
    pub fn full() -> Self {
        Window { lo: None, hi: None }
    }

    pub fn new(lo: Option<Action>, hi: Option<Action>) -> Self {
        Window { lo, hi }
    }

    pub fn finite(lo: Action, hi: Action) -> Self {
        Window { lo: Some(lo), hi: Some(hi) }
    }

    pub fn contains(&self, a: &Action) -> bool {
        self.lo.as_ref().is_none_or(|lo| a >= lo) && self.hi.as_ref().is_none_or(|hi| a < hi)
    }

    pub fn intersect(&self, other: &Window) -> Window {
        let lo = match (&self.lo, &other.lo) {
            (Some(a), Some(b)) => Some(a.max(b).clone()),
            (a, b) => a.clone().or_else(|| b.clone()),
        };
        let hi = match (&self.hi, &other.hi) {
            (Some(a), Some(b)) => Some(if a <= b { a.clone() } else { b.clone() }),
            (a, b) => a.clone().or_else(|| b.clone()),
        };
        Window { lo, hi }
    }

    pub fn hull(&self, other: &Window) -> Window {
        let lo = match (&self.lo, &other.lo) {
            (Some(a), Some(b)) => Some(if a <= b { a.clone() } else { b.clone() }),
            _ => None,
        };
        let hi = match (&self.hi, &other.hi) {
            (Some(a), Some(b)) => Some(a.max(b).clone()),
            _ => None,
        };
        Window { lo, hi }
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_some() && self.hi.is_some()
    }

    pub fn is_empty(&self) -> bool {
        matches!((&self.lo, &self.hi), (Some(a), Some(b)) if a >= b)
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lo = self.lo.as_ref().map_or("-inf".to_string(), |a| a.to_string());
        let hi = self.hi.as_ref().map_or("+inf".to_string(), |a| a.to_string());
        write!(f, "[{lo}, {hi})")
    }
}

/// A complex with a compatible basis. `d` column `j` holds `∂ e_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilteredComplex {
    pub field: Fp,
    pub grading_modulus: u32,
    pub basis: Vec<BasisElem>,
    pub d: Matrix,
    pub window: Window,
}

impl FilteredComplex {
    /// Assemble and validate.
    pub fn new(field: Fp, grading_modulus: u32, basis: Vec<BasisElem>, d: Matrix, window: Window) -> Result<Self> {
        let c = Self::new_unchecked(field, grading_modulus, basis, d, window)?;
        c.validate()?;
        Ok(c)
    }

    /// Assemble with shape and name checks only.
    pub fn new_unchecked(field: Fp, grading_modulus: u32, basis: Vec<BasisElem>, d: Matrix, window: Window) -> Result<Self> {
        let n = basis.len();
        if d.rows() != n || d.cols() != n {
            return Err(Error::InvalidInput(format!("differential is {}x{}, basis has {n} elements", d.rows(), d.cols())));
        }
        if d.field() != field {
            return Err(Error::ContextMismatch("differential over a different field".into()));
        }
        let mut seen = BTreeSet::new();
        for b in &basis {
            if !seen.insert(b.name.as_str()) {
                return Err(Error::InvalidInput(format!("duplicate basis name {:?}", b.name)));
            }
        }
        Ok(FilteredComplex { field, grading_modulus, basis, d, window })
    }

    pub fn zero(field: Fp) -> Self {
        FilteredComplex { field, grading_modulus: 0, basis: Vec::new(), d: Matrix::zeros(field, 0, 0), window: Window::full() }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.basis.iter().position(|b| b.name == name)
    }

    pub fn degrees_agree(&self, a: i64, b: i64) -> bool {
        match self.grading_modulus {
            0 => a == b,
            m => (a - b).rem_euclid(m as i64) == 0,
        }
    }

    /// Canonical degree label used for per-degree bookkeeping.
    pub fn degree_key(&self, d: i64) -> i64 {
        match self.grading_modulus {
            0 => d,
            m => d.rem_euclid(m as i64),
        }
    }

    /// Strict action decrease, degree −1, ∂² = 0, basis inside the window.
    pub fn validate(&self) -> Result<()> {
        for b in &self.basis {
            if !self.window.contains(&b.action) {
                return Err(Error::InvalidInput(format!("{} has action {} outside the window {}", b.name, b.action, self.window)));
            }
        }
        for (i, j, _) in self.d.entries() {
            let (t, s) = (&self.basis[i], &self.basis[j]);
            if t.action >= s.action {
                return Err(Error::InvalidInput(format!(
                    "filtration not strictly decreased: ∂{} contains {} ({} ≥ {})",
                    s.name, t.name, t.action, s.action
                )));
            }
            if !self.degrees_agree(t.degree, s.degree - 1) {
                return Err(Error::InvalidInput(format!(
                    "differential does not have degree −1: ∂{} (degree {}) contains {} (degree {})",
                    s.name, s.degree, t.name, t.degree
                )));
            }
        }
        if !self.d.mul(&self.d).is_zero() {
            return Err(Error::InvalidInput("∂² ≠ 0".into()));
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    /// Basis indices sorted by (action, index).
    pub fn filtration_order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.dim()).collect();
        idx.sort_by(|&a, &b| self.basis[a].action.cmp(&self.basis[b].action).then(a.cmp(&b)));
        idx
    }

    /// Distinct action values in increasing order.
    pub fn action_values(&self) -> Vec<Action> {
        let mut v: Vec<Action> = self.basis.iter().map(|b| b.action.clone()).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn degrees(&self) -> BTreeSet<i64> {
        self.basis.iter().map(|b| self.degree_key(b.degree)).collect()
    }

    /// Restrict to the basis elements at the given indices (rows and columns).
    pub fn restrict(&self, keep: &[usize], window: Window) -> FilteredComplex {
        FilteredComplex {
            field: self.field,
            grading_modulus: self.grading_modulus,
            basis: keep.iter().map(|&i| self.basis[i].clone()).collect(),
            d: self.d.submatrix(keep, keep),
            window,
        }
    }

    /// `C^{[a,b)} = C^{<b} / C^{<a}`: keep basis elements with action in `[a, b)`.
    pub fn window_subquotient(&self, a: Option<&Action>, b: Option<&Action>) -> FilteredComplex {
        let w = Window::new(a.cloned(), b.cloned());
        let keep: Vec<usize> = (0..self.dim()).filter(|&i| w.contains(&self.basis[i].action)).collect();
        self.restrict(&keep, self.window.intersect(&w))
    }

    /// Dimension of homology in each degree (keys as in [`FilteredComplex::degree_key`]).
    pub fn homology_dims(&self) -> BTreeMap<i64, usize> {
        let mut out = BTreeMap::new();
        for k in self.degrees() {
            let cols: Vec<usize> = (0..self.dim()).filter(|&i| self.degree_key(self.basis[i].degree) == k).collect();
            let above: Vec<usize> = (0..self.dim()).filter(|&i| self.degree_key(self.basis[i].degree - 1) == k).collect();
            let all: Vec<usize> = (0..self.dim()).collect();
            let rank_out = self.d.submatrix(&all, &cols).rank();
            let rank_in = self.d.submatrix(&all, &above).rank();
            let h = cols.len() - rank_out - rank_in;
            if h > 0 {
                out.insert(k, h);
            }
        }
        out
    }

    pub fn total_homology(&self) -> usize {
        self.homology_dims().values().sum()
    }

    pub fn is_acyclic(&self) -> bool {
        self.homology_dims().is_empty()
    }

    /// Replace every degree `k` by `f(k)`.
    pub fn map_degrees(&self, f: impl Fn(i64) -> i64) -> FilteredComplex {
        let mut c = self.clone();
        for b in &mut c.basis {
            b.degree = f(b.degree);
        }
        c
    }

    /// Basis sorted by name with the differential permuted to match; used to compare complexes
    /// built in different orders.
    pub fn canonical(&self) -> FilteredComplex {
        let mut idx: Vec<usize> = (0..self.dim()).collect();
        idx.sort_by(|&a, &b| self.basis[a].name.cmp(&self.basis[b].name));
        self.restrict(&idx, self.window.clone())
    }

    /// Change of basis `e'_j = Σ_i T_{ij} e_i`; the new differential is `T⁻¹ ∂ T`.
    pub fn change_basis(&self, t: &Matrix) -> Result<FilteredComplex> {
        let inv = t.inverse().ok_or_else(|| Error::InvalidInput("basis change is not invertible".into()))?;
        let mut c = self.clone();
        c.d = inv.mul(&self.d).mul(t);
        Ok(c)
    }
}

/// Check that `m` (rows: target basis, cols: source basis) shifts degree by `shift`
/// and raises action by at most `eps`.
pub fn check_map_shape(m: &Matrix, source: &FilteredComplex, target: &FilteredComplex, shift: i64, eps: &Action, what: &str) -> Result<()> {
    if m.rows() != target.dim() || m.cols() != source.dim() {
        return Err(Error::InvalidInput(format!("{what} is {}x{}, expected {}x{}", m.rows(), m.cols(), target.dim(), source.dim())));
    }
    for (i, j, _) in m.entries() {
        let (t, s) = (&target.basis[i], &source.basis[j]);
        if !target.degrees_agree(t.degree, s.degree + shift) {
            return Err(Error::InvalidInput(format!(
                "{what} sends {} (degree {}) to {} (degree {}), expected degree shift {shift}",
                s.name, s.degree, t.name, t.degree
            )));
        }
        if t.action > &s.action + eps {
            return Err(Error::InvalidInput(format!(
                "{what} raises action by more than {eps}: {} ({}) ↦ {} ({})",
                s.name, s.action, t.name, t.action
            )));
        }
    }
    Ok(())
}

/// A degree-0 linear map of action degree `eps` between filtered complexes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeEpsMap {
    pub source: FilteredComplex,
    pub target: FilteredComplex,
    pub matrix: Matrix,
    pub eps: Action,
    pub chain: bool,
}

impl DegreeEpsMap {
    pub fn new(source: FilteredComplex, target: FilteredComplex, matrix: Matrix, eps: Action, chain: bool) -> Result<Self> {
        check_map_shape(&matrix, &source, &target, 0, &eps, "map")?;
        if chain && target.d.mul(&matrix) != matrix.mul(&source.d) {
            return Err(Error::InvalidInput("map does not commute with the differentials".into()));
        }
        Ok(DegreeEpsMap { source, target, matrix, eps, chain })
    }

    pub fn identity(c: &FilteredComplex) -> Self {
        DegreeEpsMap { source: c.clone(), target: c.clone(), matrix: Matrix::identity(c.field, c.dim()), eps: Action::zero(), chain: true }
    }
}

/// Solve `d_t h + h d_s = g` for `h` of degree +1 and action degree at most `eps`.
/// Returns `None` when no such `h` exists.
pub fn solve_homotopy(source: &FilteredComplex, target: &FilteredComplex, g: &Matrix, eps: Option<&Action>) -> Option<Matrix> {
    let f = source.field;
    let (nt, ns) = (target.dim(), source.dim());
    let allowed: Vec<(usize, usize)> = (0..nt)
        .flat_map(|i| (0..ns).map(move |j| (i, j)))
        .filter(|&(i, j)| {
            let (t, s) = (&target.basis[i], &source.basis[j]);
            target.degrees_agree(t.degree, s.degree + 1) && eps.is_none_or(|e| t.action <= &s.action + e)
        })
        .collect();
    // unknown u = h[i][j]; (d_t h)[a][j] = Σ_i d_t[a][i] h[i][j]; (h d_s)[i][b] = Σ_j h[i][j] d_s[j][b]
    let mut sys = Matrix::zeros(f, nt * ns, allowed.len());
    for (u, &(i, j)) in allowed.iter().enumerate() {
        for a in 0..nt {
            let v = target.d.get(a, i);
            if v != 0 {
                sys.add_to(a * ns + j, u, v);
            }
        }
        for b in 0..ns {
            let v = source.d.get(j, b);
            if v != 0 {
                sys.add_to(i * ns + b, u, v);
            }
        }
    }
    let rhs: Vec<u32> = (0..nt).flat_map(|a| (0..ns).map(move |b| (a, b))).map(|(a, b)| g.get(a, b)).collect();
    let x = sys.solve(&rhs)?;
    let mut h = Matrix::zeros(f, nt, ns);
    for (u, &(i, j)) in allowed.iter().enumerate() {
        h.set(i, j, x[u]);
    }
    Some(h)
}

/// How the C₁₀ side of a cone is graded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConeGrading {
    /// Both sides already carry cone degrees.
    Plain,
    /// C₁₀ carries cohomological degrees `k`, placed in cone degree `n − k − 2`.
    Rabinowitz { n: i64 },
}

impl ConeGrading {
    pub fn c10_degree(self, raw: i64) -> i64 {
        match self {
            ConeGrading::Plain => raw,
            ConeGrading::Rabinowitz { n } => n - raw - 2,
        }
    }
}

/// Blocks of a filtered mapping cone: `B: C₀₁ → C₁₀` with rows indexed by C₁₀.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeData {
    pub c01: FilteredComplex,
    pub c10: FilteredComplex,
    pub b: Matrix,
}

/// `B ∂₀₁ − ∂₁₀ B`, whose vanishing is the chain-map condition.
pub fn chain_map_defect(data: &ConeData) -> Matrix {
    data.b.mul(&data.c01.d).sub(&data.c10.d.mul(&data.b))
}

impl ConeData {
    /// The C₁₀ side with cone degrees.
    pub fn c10_cone_graded(&self, grading: ConeGrading) -> FilteredComplex {
        self.c10.map_degrees(|k| grading.c10_degree(k))
    }
}

/// Assemble `Cone(B) = C₁₀ ⊕ C₀₁` with differential `(−∂₁₀ B; 0 ∂₀₁)`. The basis lists C₁₀ first.
pub fn build_cone(data: &ConeData, grading: ConeGrading) -> Result<FilteredComplex> {
    let f = data.c01.field;
    if data.c10.field != f || data.b.field() != f {
        return Err(Error::ContextMismatch("cone blocks over different fields".into()));
    }
    let c10 = data.c10_cone_graded(grading);
    c10.validate().map_err(|e| Error::InvalidInput(format!("C10: {e}")))?;
    data.c01.validate().map_err(|e| Error::InvalidInput(format!("C01: {e}")))?;
    if data.b.rows() != c10.dim() || data.b.cols() != data.c01.dim() {
        return Err(Error::InvalidInput(format!("B is {}x{}, expected {}x{}", data.b.rows(), data.b.cols(), c10.dim(), data.c01.dim())));
    }
    if let (Some(min01), Some(max10)) = (data.c01.basis.iter().map(|b| &b.action).min(), c10.basis.iter().map(|b| &b.action).max()) {
        if min01 <= max10 {
            return Err(Error::InvalidInput(format!("action separation violated: C01 reaches down to {min01}, C10 up to {max10}")));
        }
    }
    for (i, j, _) in data.b.entries() {
        let (z, x) = (&c10.basis[i], &data.c01.basis[j]);
        if !c10.degrees_agree(z.degree, x.degree - 1) {
            return Err(Error::InvalidInput(format!(
                "B does not have degree −1: B({}) (degree {}) contains {} (degree {})",
                x.name, x.degree, z.name, z.degree
            )));
        }
    }
    let defect = chain_map_defect(data);
    if let Some((i, j, _)) = defect.entries().next() {
        return Err(Error::InvalidInput(format!(
            "B is not a chain map: B∂₀₁ − ∂₁₀B is nonzero at ({}, {})",
            data.c01.basis[j].name, c10.basis[i].name
        )));
    }
    let names01: BTreeSet<&str> = data.c01.basis.iter().map(|b| b.name.as_str()).collect();
    if let Some(b) = c10.basis.iter().find(|b| names01.contains(b.name.as_str())) {
        return Err(Error::InvalidInput(format!("name {:?} used on both sides of the cone", b.name)));
    }
    let n10 = c10.dim();
    let n01 = data.c01.dim();
    let d = Matrix::block(&c10.d.neg(), &data.b, &Matrix::zeros(f, n01, n10), &data.c01.d);
    let mut basis = c10.basis.clone();
    basis.extend(data.c01.basis.iter().cloned());
    let window = c10.window.hull(&data.c01.window);
    let cone = FilteredComplex::new_unchecked(f, data.c01.grading_modulus, basis, d, window)?;
    cone.validate()?;
    Ok(cone)
}

/// Block map `f = (φ₁₀ h; 0 φ₀₁)` between two cones.
pub fn cone_map(
    src: &ConeData,
    tgt: &ConeData,
    f01: &DegreeEpsMap,
    f10: &DegreeEpsMap,
    h: &Matrix,
    grading: ConeGrading,
) -> Result<DegreeEpsMap> {
    let cs = build_cone(src, grading)?;
    let ct = build_cone(tgt, grading)?;
    let eps = f01.eps.clone().max(f10.eps.clone());
    let s10 = src.c10_cone_graded(grading);
    let t10 = tgt.c10_cone_graded(grading);
    check_map_shape(&f01.matrix, &src.c01, &tgt.c01, 0, &f01.eps, "φ01")?;
    check_map_shape(&f10.matrix, &s10, &t10, 0, &f10.eps, "φ10")?;
    check_map_shape(h, &src.c01, &t10, 0, &eps, "h")?;
    let f = src.c01.field;
    let m = Matrix::block(&f10.matrix, h, &Matrix::zeros(f, tgt.c01.dim(), s10.dim()), &f01.matrix);
    let lhs = ct.d.mul(&m);
    let rhs = m.mul(&cs.d);
    if lhs != rhs {
        let (i, j, _) = lhs.sub(&rhs).entries().next().expect("nonzero difference");
        return Err(Error::Certificate(format!(
            "homotopy identity fails: φ₁₀B − B′φ₀₁ ≠ −(∂′h + h∂) at ({}, {})",
            cs.basis[j].name, ct.basis[i].name
        )));
    }
    DegreeEpsMap::new(cs, ct, m, eps, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_gen() -> FilteredComplex {
        let f = Fp::two();
        let basis = vec![BasisElem::new("y", 0, Action::int(1)), BasisElem::new("x", 1, Action::int(3))];
        let d = Matrix::from_rows(f, &[vec![0, 1], vec![0, 0]]);
        FilteredComplex::new(f, 0, basis, d, Window::full()).unwrap()
    }

    #[test]
    fn windows() {
        let c = two_gen();
        assert_eq!(c.window_subquotient(None, None).basis, c.basis);
        let w = c.window_subquotient(Some(&Action::int(2)), Some(&Action::int(4)));
        assert_eq!(w.dim(), 1);
        assert_eq!(w.basis[0].name, "x");
        assert!(w.d.is_zero());
        let e = c.window_subquotient(Some(&Action::int(2)), Some(&Action::int(2)));
        assert_eq!(e.dim(), 0);
    }

    #[test]
    fn homology_of_pair_and_sum() {
        let c = two_gen();
        assert!(c.is_acyclic());
        let f = Fp::two();
        let z = FilteredComplex::new(
            f,
            0,
            vec![BasisElem::new("a", 0, Action::int(1)), BasisElem::new("b", 3, Action::int(2))],
            Matrix::zeros(f, 2, 2),
            Window::full(),
        )
        .unwrap();
        assert_eq!(z.homology_dims(), [(0, 1), (3, 1)].into_iter().collect());
    }

    #[test]
    fn strictness_is_enforced() {
        let f = Fp::two();
        let basis = vec![BasisElem::new("y", 0, Action::int(3)), BasisElem::new("x", 1, Action::int(3))];
        let d = Matrix::from_rows(f, &[vec![0, 1], vec![0, 0]]);
        assert!(FilteredComplex::new(f, 0, basis, d, Window::full()).is_err());
    }

    #[test]
    fn trivial_cone_is_direct_sum() {
        let f = Fp::two();
        let c01 = FilteredComplex::new(f, 0, vec![BasisElem::new("p", 0, Action::int(1))], Matrix::zeros(f, 1, 1), Window::full()).unwrap();
        let c10 =
            FilteredComplex::new(f, 0, vec![BasisElem::new("q", 0, Action::int(-1))], Matrix::zeros(f, 1, 1), Window::full()).unwrap();
        let data = ConeData { c01, c10, b: Matrix::zeros(f, 1, 1) };
        let cone = build_cone(&data, ConeGrading::Plain).unwrap();
        assert!(cone.d.is_zero());
        assert_eq!(cone.dim(), 2);
    }

    #[test]
    fn homotopy_solver_recovers_a_homotopy() {
        let c = two_gen();
        let f = c.field;
        // g = ∂h + h∂ for h(y) = x
        let mut h = Matrix::zeros(f, 2, 2);
        h.set(1, 0, 1);
        let g = c.d.mul(&h).add(&h.mul(&c.d));
        let h2 = solve_homotopy(&c, &c, &g, None).unwrap();
        assert_eq!(c.d.mul(&h2).add(&h2.mul(&c.d)), g);
        // the identity is not null-homotopic on a nonzero homology class
        let z = c.window_subquotient(Some(&Action::int(2)), None);
        let id = Matrix::identity(f, 1);
        assert!(solve_homotopy(&z, &z, &id, None).is_none());
    }
}
