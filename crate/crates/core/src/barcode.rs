//! Persistence barcodes of filtered complexes and the bar rules for simple bifurcations.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::action::Action;
use crate::complex::{BasisElem, FilteredComplex, Window};
use crate::error::{Error, Result};
use crate::matrix::{in_span, Matrix};

/// Half-open bar `[start, end)`; `end = None` is +∞. `degree` is that of the class born at `start`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bar {
    pub start: Action,
    pub end: Option<Action>,
    pub degree: i64,
}

impl Bar {
    pub fn finite(start: Action, end: Action, degree: i64) -> Self {
        Bar { start, end: Some(end), degree }
    }

    pub fn infinite(start: Action, degree: i64) -> Self {
        Bar { start, end: None, degree }
    }

    pub fn is_infinite(&self) -> bool {
        self.end.is_none()
    }
}

impl Ord for Bar {
    fn cmp(&self, other: &Self) -> Ordering {
        let end_cmp = match (&self.end, &other.end) {
            (None, None) => Ordering::Equal,
            (None, Some(_)) => Ordering::Greater,
            (Some(_), None) => Ordering::Less,
            (Some(a), Some(b)) => a.cmp(b),
        };
        self.degree.cmp(&other.degree).then_with(|| self.start.cmp(&other.start)).then(end_cmp)
    }
}

impl PartialOrd for Bar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Bar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.end {
            Some(e) => write!(f, "[{}, {}) deg {}", self.start, e, self.degree),
            None => write!(f, "[{}, ∞) deg {}", self.start, self.degree),
        }
    }
}

/// A multiset of bars, kept sorted so that equality is multiset equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Barcode {
    bars: Vec<Bar>,
    pub window: Window,
}

impl Barcode {
    pub fn new(mut bars: Vec<Bar>, window: Window) -> Self {
        bars.sort();
        Barcode { bars, window }
    }

    pub fn bars(&self) -> &[Bar] {
        &self.bars
    }

    pub fn len(&self) -> usize {
        self.bars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    /// Same bars, ignoring the window.
    pub fn same_bars(&self, other: &Barcode) -> bool {
        self.bars == other.bars
    }

    pub fn insert(&mut self, bar: Bar) {
        let pos = self.bars.binary_search(&bar).unwrap_or_else(|p| p);
        self.bars.insert(pos, bar);
    }

    /// Remove one copy of `bar`; false if absent.
    pub fn remove(&mut self, bar: &Bar) -> bool {
        match self.bars.binary_search(bar) {
            Ok(p) => {
                self.bars.remove(p);
                true
            }
            Err(_) => false,
        }
    }

    pub fn infinite_counts(&self) -> BTreeMap<i64, usize> {
        let mut out = BTreeMap::new();
        for b in self.bars.iter().filter(|b| b.is_infinite()) {
            *out.entry(b.degree).or_insert(0) += 1;
        }
        out
    }

    pub fn finite_bars(&self) -> impl Iterator<Item = &Bar> {
        self.bars.iter().filter(|b| !b.is_infinite())
    }
}

impl fmt::Display for Barcode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bars {
            writeln!(f, "{b}")?;
        }
        Ok(())
    }
}

/// Result of the column reduction: bars plus the pairing that produced them.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub barcode: Barcode,
    /// `(lower, upper)` basis indices of each finite bar.
    pub pairs: Vec<(usize, usize)>,
    /// Basis indices that start infinite bars.
    pub essential: Vec<usize>,
}

/// Column reduction in (action, index) order.
pub fn reduce(c: &FilteredComplex) -> Reduction {
    let f = c.field;
    let order = c.filtration_order();
    let n = order.len();
    let mut pos = vec![0usize; n];
    for (p, &i) in order.iter().enumerate() {
        pos[i] = p;
    }
    // columns in filtration coordinates
    let mut cols: Vec<Vec<u32>> = order
        .iter()
        .map(|&j| {
            let mut v = vec![0u32; n];
            for (i, &x) in c.d.column(j).iter().enumerate() {
                v[pos[i]] = x;
            }
            v
        })
        .collect();
    let low = |v: &[u32]| v.iter().rposition(|&x| x != 0);
    let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
    for j in 0..n {
        while let Some(l) = low(&cols[j]) {
            let Some(&k) = owner.get(&l) else {
                owner.insert(l, j);
                break;
            };
            let factor = f.mul(cols[j][l], f.inv(cols[k][l]).expect("pivot is nonzero"));
            let other = cols[k].clone();
            for (a, b) in cols[j].iter_mut().zip(other) {
                *a = f.sub(*a, f.mul(factor, b));
            }
        }
    }
    let mut bars = Vec::new();
    let mut pairs = Vec::new();
    let mut essential = Vec::new();
    let lows: std::collections::BTreeSet<usize> = owner.keys().copied().collect();
    for (p, &i) in order.iter().enumerate() {
        if let Some(l) = low(&cols[p]) {
            let lo = order[l];
            let (s, e) = (&c.basis[lo].action, &c.basis[i].action);
            if s < e {
                bars.push(Bar::finite(s.clone(), e.clone(), c.degree_key(c.basis[lo].degree)));
            }
            pairs.push((lo, i));
        } else if !lows.contains(&p) {
            bars.push(Bar::infinite(c.basis[i].action.clone(), c.degree_key(c.basis[i].degree)));
            essential.push(i);
        }
    }
    Reduction { barcode: Barcode::new(bars, c.window.clone()), pairs, essential }
}

pub fn compute_barcode(c: &FilteredComplex) -> Barcode {
    reduce(c).barcode
}

/// A simple bifurcation. Elements are addressed by basis name.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Event {
    /// Basis change `target ↦ target + coeff·source`; when `target == source`, `target ↦ coeff·target`.
    HandleSlide {
        target: String,
        source: String,
        coeff: u32,
    },
    /// A split-off pair with `∂upper = coeff·lower` appears.
    Birth {
        upper: BasisElem,
        lower: BasisElem,
        coeff: u32,
    },
    /// A split-off pair disappears.
    Death {
        upper: String,
        lower: String,
    },
    ExitBelow {
        name: String,
    },
    ExitAbove {
        name: String,
    },
    /// A new bottom element; `row` lists the coefficient of it in `∂z` for each listed `z`.
    EntryBelow {
        elem: BasisElem,
        row: Vec<(String, u32)>,
    },
    /// A new top element with the given boundary.
    EntryAbove {
        elem: BasisElem,
        column: Vec<(String, u32)>,
    },
}

impl Event {
    pub fn kind(&self) -> &'static str {
        match self {
            Event::HandleSlide { .. } => "handle-slide",
            Event::Birth { .. } => "birth",
            Event::Death { .. } => "death",
            Event::ExitBelow { .. } => "exit-below",
            Event::ExitAbove { .. } => "exit-above",
            Event::EntryBelow { .. } => "entry-below",
            Event::EntryAbove { .. } => "entry-above",
        }
    }
}

fn illegal<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::IllegalEvent(msg.into()))
}

fn lookup(c: &FilteredComplex, name: &str) -> Result<usize> {
    c.index_of(name).ok_or_else(|| Error::IllegalEvent(format!("no basis element named {name:?}")))
}

fn without(c: &FilteredComplex, drop: &[usize]) -> FilteredComplex {
    let keep: Vec<usize> = (0..c.dim()).filter(|i| !drop.contains(i)).collect();
    c.restrict(&keep, c.window.clone())
}

/// Append `elem` with the given column (its boundary) and row (its coefficient in other boundaries).
fn append(c: &FilteredComplex, elem: &BasisElem, column: &[u32], row: &[u32]) -> Result<FilteredComplex> {
    if c.index_of(&elem.name).is_some() {
        return illegal(format!("name {:?} already present", elem.name));
    }
    let n = c.dim();
    let f = c.field;
    let mut d = Matrix::zeros(f, n + 1, n + 1);
    for (i, j, v) in c.d.entries() {
        d.set(i, j, v);
    }
    for i in 0..n {
        d.set(i, n, column[i]);
        d.set(n, i, row[i]);
    }
    let mut basis = c.basis.clone();
    basis.push(elem.clone());
    FilteredComplex::new(f, c.grading_modulus, basis, d, c.window.clone()).map_err(|e| Error::IllegalEvent(e.to_string()))
}

fn coeff_vector(c: &FilteredComplex, entries: &[(String, u32)]) -> Result<Vec<u32>> {
    let mut v = vec![0u32; c.dim()];
    for (name, x) in entries {
        let i = lookup(c, name)?;
        v[i] = c.field.add(v[i], *x);
    }
    Ok(v)
}

fn unique_extreme(c: &FilteredComplex, i: usize, below: bool) -> Result<()> {
    let a = &c.basis[i].action;
    let ok = c.basis.iter().enumerate().all(|(k, b)| k == i || if below { &b.action > a } else { &b.action < a });
    if !ok {
        let side = if below { "minimum" } else { "maximum" };
        return illegal(format!("{} is not the unique {side} of the action spectrum", c.basis[i].name));
    }
    Ok(())
}

fn columns_where(c: &FilteredComplex, pred: impl Fn(&Action) -> bool) -> Vec<Vec<u32>> {
    (0..c.dim()).filter(|&j| pred(&c.basis[j].action)).map(|j| c.d.column(j)).collect()
}

/// Cycles supported on basis elements satisfying `pred`, as full-length vectors.
fn cycles_where(c: &FilteredComplex, pred: impl Fn(&Action) -> bool) -> Vec<Vec<u32>> {
    let idx: Vec<usize> = (0..c.dim()).filter(|&j| pred(&c.basis[j].action)).collect();
    let all: Vec<usize> = (0..c.dim()).collect();
    c.d.submatrix(&all, &idx)
        .kernel()
        .into_iter()
        .map(|k| {
            let mut v = vec![0u32; c.dim()];
            for (a, &j) in idx.iter().enumerate() {
                v[j] = k[a];
            }
            v
        })
        .collect()
}

/// Apply `event` to `c`, transform `bc` by the bar rule for that event, and check the result
/// against a fresh reduction of the new complex.
pub fn apply_event(bc: &Barcode, c: &FilteredComplex, event: &Event) -> Result<(Barcode, FilteredComplex)> {
    if !bc.same_bars(&compute_barcode(c)) {
        return illegal("barcode does not belong to the complex");
    }
    let f = c.field;
    let mut out = bc.clone();
    let new_c = match event {
        Event::HandleSlide { target, source, coeff } => {
            let (j, i) = (lookup(c, target)?, lookup(c, source)?);
            let mut t = Matrix::identity(f, c.dim());
            if i == j {
                if coeff % f.p() == 0 {
                    return illegal("rescaling by zero");
                }
                t.set(j, j, *coeff);
            } else {
                if !c.degrees_agree(c.basis[i].degree, c.basis[j].degree) {
                    return illegal(format!("handle-slide between degrees {} and {}", c.basis[i].degree, c.basis[j].degree));
                }
                if c.basis[i].action > c.basis[j].action {
                    return illegal(format!("handle-slide raises action: {source} lies above {target}"));
                }
                t.set(i, j, *coeff);
            }
            c.change_basis(&t).and_then(|n| {
                n.validate()?;
                Ok(n)
            })?
        }
        Event::Birth { upper, lower, coeff } => {
            if coeff % f.p() == 0 {
                return illegal("birth with zero coefficient");
            }
            if lower.action >= upper.action {
                return illegal("birth pair must have ℓ(lower) < ℓ(upper)");
            }
            if !c.degrees_agree(upper.degree, lower.degree + 1) {
                return illegal("birth pair degrees do not differ by one");
            }
            for b in &c.basis {
                if b.action == upper.action || b.action == lower.action {
                    return illegal(format!("birth collides with the action value {} of {}", b.action, b.name));
                }
            }
            let zero = vec![0u32; c.dim()];
            let with_lower = append(c, lower, &zero, &zero)?;
            let mut col = vec![0u32; with_lower.dim()];
            col[with_lower.dim() - 1] = *coeff;
            let row = vec![0u32; with_lower.dim()];
            out.insert(Bar::finite(lower.action.clone(), upper.action.clone(), c.degree_key(lower.degree)));
            append(&with_lower, upper, &col, &row)?
        }
        Event::Death { upper, lower } => {
            let (x, y) = (lookup(c, upper)?, lookup(c, lower)?);
            let k = c.d.get(y, x);
            let split = k != 0
                && c.d.column(x).iter().enumerate().all(|(i, &v)| i == y || v == 0)
                && c.d.row(y).iter().enumerate().all(|(j, &v)| j == x || v == 0)
                && c.d.column(y).iter().all(|&v| v == 0)
                && c.d.row(x).iter().all(|&v| v == 0);
            if !split {
                return illegal(format!("({upper}, {lower}) is not a split-off pair ∂{upper} = k·{lower}"));
            }
            let bar = Bar::finite(c.basis[y].action.clone(), c.basis[x].action.clone(), c.degree_key(c.basis[y].degree));
            if !out.remove(&bar) {
                return illegal(format!("no bar {bar} to remove"));
            }
            without(c, &[x, y])
        }
        Event::ExitBelow { name } => {
            let x = lookup(c, name)?;
            unique_extreme(c, x, true)?;
            let s = &c.basis[x].action;
            let deg = c.degree_key(c.basis[x].degree);
            let bar = out.bars().iter().find(|b| &b.start == s && b.degree == deg).cloned();
            match bar {
                Some(b) => {
                    out.remove(&b);
                    if let Some(e) = b.end {
                        out.insert(Bar::infinite(e, c.degree_key(c.basis[x].degree + 1)));
                    }
                }
                None => return illegal(format!("no bar starts at {s}")),
            }
            without(c, &[x])
        }
        Event::ExitAbove { name } => {
            let x = lookup(c, name)?;
            unique_extreme(c, x, false)?;
            let a = &c.basis[x].action;
            if let Some(b) = out.bars().iter().find(|b| b.end.as_ref() == Some(a)).cloned() {
                out.remove(&b);
                out.insert(Bar::infinite(b.start, b.degree));
            } else if let Some(b) = out.bars().iter().find(|b| &b.start == a && b.is_infinite()).cloned() {
                out.remove(&b);
            } else {
                return illegal(format!("no bar starts or ends at {a}"));
            }
            without(c, &[x])
        }
        Event::EntryBelow { elem, row } => {
            if c.basis.iter().any(|b| b.action <= elem.action) {
                return illegal(format!("{} does not enter strictly below every action", elem.name));
            }
            let r = coeff_vector(c, row)?;
            // rD = 0 keeps ∂² = 0
            if c.d.transpose().mul_vec(&r).iter().any(|&v| v != 0) {
                return illegal("entering row r does not satisfy r∂ = 0");
            }
            let zero = vec![0u32; c.dim()];
            let n = append(c, elem, &zero, &r)?;
            let xi = n.dim() - 1;
            let mut unit = vec![0u32; n.dim()];
            unit[xi] = 1;
            let deg = c.degree_key(elem.degree);
            let end = n.action_values().into_iter().find(|v| in_span(f, n.dim(), &columns_where(&n, |a| a <= v), &unit));
            match end {
                Some(e) => {
                    let old = Bar::infinite(e.clone(), c.degree_key(elem.degree + 1));
                    if !out.remove(&old) {
                        return illegal(format!("no infinite bar at {e} for the entering element to attach to"));
                    }
                    out.insert(Bar::finite(elem.action.clone(), e, deg));
                }
                None => out.insert(Bar::infinite(elem.action.clone(), deg)),
            }
            n
        }
        Event::EntryAbove { elem, column } => {
            if c.basis.iter().any(|b| b.action >= elem.action) {
                return illegal(format!("{} does not enter strictly above every action", elem.name));
            }
            let col = coeff_vector(c, column)?;
            if c.d.mul_vec(&col).iter().any(|&v| v != 0) {
                return illegal("boundary of the entering element is not a cycle");
            }
            let boundaries = columns_where(c, |_| true);
            if in_span(f, c.dim(), &boundaries, &col) {
                out.insert(Bar::infinite(elem.action.clone(), c.degree_key(elem.degree)));
            } else {
                let start = c.action_values().into_iter().find(|v| {
                    let mut gens = cycles_where(c, |a| a <= v);
                    gens.extend(boundaries.iter().cloned());
                    in_span(f, c.dim(), &gens, &col)
                });
                let Some(s) = start else { return illegal("boundary of the entering element is not a cycle") };
                let old = Bar::infinite(s.clone(), c.degree_key(elem.degree - 1));
                if !out.remove(&old) {
                    return illegal(format!("no infinite bar at {s} to close"));
                }
                out.insert(Bar::finite(s, elem.action.clone(), c.degree_key(elem.degree - 1)));
            }
            let zero = vec![0u32; c.dim()];
            append(c, elem, &col, &zero)?
        }
    };
    let recomputed = compute_barcode(&new_c);
    if !recomputed.same_bars(&out) {
        return illegal(format!("{} rule disagrees with recomputation:\nrule:\n{out}recomputed:\n{recomputed}", event.kind()));
    }
    out.window = new_c.window.clone();
    Ok((out, new_c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Fp;

    fn cx(f: Fp, basis: &[(&str, i64, i64)], entries: &[(usize, usize, u32)]) -> FilteredComplex {
        let b: Vec<BasisElem> = basis.iter().map(|&(n, d, a)| BasisElem::new(n, d, Action::int(a))).collect();
        let mut d = Matrix::zeros(f, b.len(), b.len());
        for &(i, j, v) in entries {
            d.set(i, j, v);
        }
        FilteredComplex::new(f, 0, b, d, Window::full()).unwrap()
    }

    #[test]
    fn spec_examples() {
        let f = Fp::two();
        let z = cx(f, &[("a", 0, 1), ("b", 0, 2)], &[]);
        let bc = compute_barcode(&z);
        assert_eq!(bc.bars(), &[Bar::infinite(Action::int(1), 0), Bar::infinite(Action::int(2), 0)]);
        let p = cx(f, &[("y", 0, 1), ("x", 1, 3)], &[(0, 1, 1)]);
        assert_eq!(compute_barcode(&p).bars(), &[Bar::finite(Action::int(1), Action::int(3), 0)]);
    }

    #[test]
    fn events_follow_their_rules() {
        let f = Fp::two();
        let c = cx(f, &[("y", 0, 1), ("x", 1, 3), ("z", 0, 5)], &[(0, 1, 1)]);
        let bc = compute_barcode(&c);
        let (b1, c1) = apply_event(&bc, &c, &Event::ExitBelow { name: "y".into() }).unwrap();
        assert!(b1.bars().contains(&Bar::infinite(Action::int(3), 1)));
        let (b2, _) = apply_event(&bc, &c, &Event::Death { upper: "x".into(), lower: "y".into() }).unwrap();
        assert_eq!(b2.len(), 1);
        let ev = Event::Birth { upper: BasisElem::new("u", 1, Action::int(8)), lower: BasisElem::new("v", 0, Action::int(7)), coeff: 1 };
        let (b3, _) = apply_event(&bc, &c, &ev).unwrap();
        assert!(b3.bars().contains(&Bar::finite(Action::int(7), Action::int(8), 0)));
        let ev = Event::EntryBelow { elem: BasisElem::new("w", 0, Action::int(0)), row: vec![("x".into(), 1)] };
        let (b4, c4) = apply_event(&b1, &c1, &ev).unwrap();
        assert_eq!(
            b4.bars(),
            bc.bars()
                .iter()
                .cloned()
                .map(|mut b| {
                    if b.start == Action::int(1) {
                        b.start = Action::int(0);
                    }
                    b
                })
                .collect::<Vec<_>>()
                .as_slice()
        );
        assert_eq!(c4.dim(), 3);
        let hs = Event::HandleSlide { target: "z".into(), source: "y".into(), coeff: 1 };
        assert_eq!(apply_event(&bc, &c, &hs).unwrap().0, bc);
        let bad = Event::HandleSlide { target: "y".into(), source: "z".into(), coeff: 1 };
        assert!(apply_event(&bc, &c, &bad).is_err());
    }

    #[test]
    fn birth_collision_is_illegal() {
        let f = Fp::two();
        let c = cx(f, &[("a", 0, 1)], &[]);
        let ev = Event::Birth { upper: BasisElem::new("u", 1, Action::int(2)), lower: BasisElem::new("v", 0, Action::int(1)), coeff: 1 };
        assert!(matches!(apply_event(&compute_barcode(&c), &c, &ev), Err(Error::IllegalEvent(m)) if m.contains("collides")));
    }
}
