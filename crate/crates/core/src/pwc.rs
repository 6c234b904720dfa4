//! Piecewise-continuous families of filtered complexes.
//!
//! A script fixes a generator set between isolated event times. Each generator has a
//! piecewise-linear action trajectory, and the window endpoints move piecewise-linearly too.
//! Events are the simple bifurcations of [`crate::barcode::Event`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::{One, Signed, Zero};

use crate::action::{Action, Q};
use crate::barcode::{apply_event, compute_barcode, Barcode, Event};
use crate::complex::{BasisElem, FilteredComplex, Window};
use crate::error::{Error, Result};
use crate::lemmas::{check_birth_death_shape, check_simple_equivalence, EquivalenceCertificate, SimpleOutcome};

/// Piecewise-linear function of time through `(t, value)` breakpoints, constant outside them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piecewise {
    points: Vec<(Q, Action)>,
}

impl Piecewise {
    pub fn new(points: Vec<(Q, Action)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInput("piecewise function needs at least one breakpoint".into()));
        }
        if points.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::InvalidInput("breakpoint times must be strictly increasing".into()));
        }
        Ok(Piecewise { points })
    }

    pub fn constant(v: Action) -> Self {
        Piecewise { points: vec![(Q::zero(), v)] }
    }

    pub fn linear(t0: Q, v0: Action, t1: Q, v1: Action) -> Result<Self> {
        Piecewise::new(vec![(t0, v0), (t1, v1)])
    }

    pub fn points(&self) -> &[(Q, Action)] {
        &self.points
    }

    pub fn breakpoints(&self) -> impl Iterator<Item = &Q> {
        self.points.iter().map(|p| &p.0)
    }

    pub fn is_rational(&self) -> bool {
        self.points.iter().all(|p| p.1.is_rational())
    }

    pub fn eval(&self, t: &Q) -> Action {
        let pts = &self.points;
        if t <= &pts[0].0 {
            return pts[0].1.clone();
        }
        for w in pts.windows(2) {
            let ((t0, v0), (t1, v1)) = (&w[0], &w[1]);
            if t <= t1 {
                let s = (t - t0) / (t1 - t0);
                return v0 + &(v1 - v0).scale(&s);
            }
        }
        pts[pts.len() - 1].1.clone()
    }

    /// Rational value at `t`; errors on `π`-linear values.
    pub fn eval_rational(&self, t: &Q) -> Result<Q> {
        self.eval(t).as_rational().cloned().ok_or_else(|| Error::InvalidInput("expected a rational piecewise function".into()))
    }

    /// `(f(b) − f(a)) / (b − a)`, the slope on an interval containing no breakpoint in its interior.
    pub fn slope(&self, a: &Q, b: &Q) -> Action {
        (self.eval(b) - self.eval(a)).scale(&(Q::one() / (b - a)))
    }

    /// Time reversal `t ↦ s − t`.
    pub fn reflect(&self, s: &Q) -> Piecewise {
        Piecewise { points: self.points.iter().rev().map(|(t, v)| (s - t, v.clone())).collect() }
    }

    /// `∫_a^b f` for a rational function, exact by the trapezoid rule on each linear piece.
    pub fn integral(&self, a: &Q, b: &Q) -> Result<Q> {
        if a > b {
            return Ok(-self.integral(b, a)?);
        }
        let mut cuts = vec![a.clone()];
        cuts.extend(self.breakpoints().filter(|t| *t > a && *t < b).cloned());
        cuts.push(b.clone());
        let mut total = Q::zero();
        for w in cuts.windows(2) {
            let (fa, fb) = (self.eval_rational(&w[0])?, self.eval_rational(&w[1])?);
            total += (fa + fb) * (&w[1] - &w[0]) / Q::from_integer(2.into());
        }
        Ok(total)
    }
}

/// Window endpoints over time; `None` is an infinite endpoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowTraj {
    pub lo: Option<Piecewise>,
    pub hi: Option<Piecewise>,
}

impl WindowTraj {
    pub fn full() -> Self {
        WindowTraj { lo: None, hi: None }
    }

    pub fn constant(w: &Window) -> Self {
        WindowTraj { lo: w.lo.clone().map(Piecewise::constant), hi: w.hi.clone().map(Piecewise::constant) }
    }

    pub fn at(&self, t: &Q) -> Window {
        Window::new(self.lo.as_ref().map(|p| p.eval(t)), self.hi.as_ref().map(|p| p.eval(t)))
    }

    fn breakpoints(&self) -> impl Iterator<Item = &Q> {
        self.lo.iter().chain(self.hi.iter()).flat_map(|p| p.breakpoints())
    }

    fn reflect(&self, s: &Q) -> WindowTraj {
        WindowTraj { lo: self.lo.as_ref().map(|p| p.reflect(s)), hi: self.hi.as_ref().map(|p| p.reflect(s)) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimedEvent {
    pub time: Q,
    pub event: Event,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PwcScript {
    pub t_start: Q,
    pub t_end: Q,
    /// Generators, degrees and differential at `t_start`; actions and window are read from the
    /// trajectories.
    pub initial: FilteredComplex,
    pub trajectories: BTreeMap<String, Piecewise>,
    pub window: WindowTraj,
    pub events: Vec<TimedEvent>,
    /// Generators subject to the single-chord speed bound.
    pub pure: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FrameKind {
    Start,
    Event(&'static str),
    Sample,
    End,
}

impl fmt::Display for FrameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrameKind::Start => write!(f, "start"),
            FrameKind::Event(k) => write!(f, "{k}"),
            FrameKind::Sample => write!(f, "sample"),
            FrameKind::End => write!(f, "end"),
        }
    }
}

/// The complex at time `t`. For event frames the complex is read just after the event (just
/// before, for deaths, where the pair has already merged at `t`), at time `probe`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub t: Q,
    pub probe: Q,
    pub kind: FrameKind,
    pub complex: FilteredComplex,
    pub barcode: Barcode,
}

struct EventRecord {
    time: Q,
    event: Event,
    /// Complex the event was applied to, at the probe time.
    before: FilteredComplex,
}

struct Run {
    frames: Vec<Frame>,
    records: Vec<EventRecord>,
    last: FilteredComplex,
}

fn traj<'a>(s: &'a PwcScript, name: &str) -> Result<&'a Piecewise> {
    s.trajectories.get(name).ok_or_else(|| Error::InvalidInput(format!("no trajectory for {name:?}")))
}

/// `c` with actions read at `t` and the given window.
fn snapshot(s: &PwcScript, c: &FilteredComplex, t: &Q, window: Window) -> Result<FilteredComplex> {
    let mut out = c.clone();
    for b in &mut out.basis {
        b.action = traj(s, &b.name)?.eval(t);
    }
    out.window = window;
    Ok(out)
}

/// Filtration and window conditions with equality allowed (the closure of the valid set).
fn check_weak(c: &FilteredComplex, t: &Q) -> Result<()> {
    for b in &c.basis {
        let below = c.window.lo.as_ref().is_some_and(|lo| &b.action < lo);
        let above = c.window.hi.as_ref().is_some_and(|hi| &b.action > hi);
        if below || above {
            return Err(Error::InvalidInput(format!("at t = {t}: {} (action {}) is outside {}", b.name, b.action, c.window)));
        }
    }
    for (i, j, _) in c.d.entries() {
        if c.basis[i].action > c.basis[j].action {
            return Err(Error::InvalidInput(format!("at t = {t}: ∂{} contains {} with larger action", c.basis[j].name, c.basis[i].name)));
        }
    }
    Ok(())
}

fn check_strict(c: &FilteredComplex, t: &Q) -> Result<()> {
    c.validate().map_err(|e| Error::InvalidInput(format!("at t = {t}: {e}")))
}

fn event_names(e: &Event) -> Vec<&str> {
    match e {
        Event::HandleSlide { target, source, .. } => vec![target, source],
        Event::Birth { upper, lower, .. } => vec![&upper.name, &lower.name],
        Event::Death { upper, lower } => vec![upper, lower],
        Event::ExitBelow { name } | Event::ExitAbove { name } => vec![name],
        Event::EntryBelow { elem, .. } | Event::EntryAbove { elem, .. } => vec![&elem.name],
    }
}

/// Coincidence the event requires at its exact time.
fn check_event_timing(s: &PwcScript, te: &TimedEvent) -> Result<()> {
    let t = &te.time;
    let w = s.window.at(t);
    let at = |name: &str| traj(s, name).map(|p| p.eval(t));
    let fail = |msg: String| Err(Error::IllegalEvent(format!("at t = {t}: {msg}")));
    let edge = |end: &Option<Action>, name: &str, side: &str| -> Result<()> {
        match end {
            Some(e) if at(name)? == *e => Ok(()),
            Some(e) => fail(format!("{name} has action {} but the {side} window end is {e}", at(name)?)),
            None => fail(format!("the {side} window end is infinite")),
        }
    };
    match &te.event {
        Event::Birth { upper, lower, .. } => {
            if at(&upper.name)? != at(&lower.name)? {
                return fail(format!("birth pair {}, {} not at a common action", upper.name, lower.name));
            }
        }
        Event::Death { upper, lower } => {
            if at(upper)? != at(lower)? {
                return fail(format!("death pair {upper}, {lower} not at a common action"));
            }
        }
        Event::ExitBelow { name } => edge(&w.lo, name, "lower")?,
        Event::ExitAbove { name } => edge(&w.hi, name, "upper")?,
        Event::EntryBelow { elem, .. } => edge(&w.lo, &elem.name, "lower")?,
        Event::EntryAbove { elem, .. } => edge(&w.hi, &elem.name, "upper")?,
        Event::HandleSlide { .. } => {}
    }
    for name in event_names(&te.event) {
        traj(s, name)?;
    }
    Ok(())
}

/// Event payload with actions read at time `t`.
fn event_at(s: &PwcScript, e: &Event, t: &Q) -> Result<Event> {
    let fix = |b: &BasisElem| -> Result<BasisElem> { Ok(BasisElem::new(b.name.clone(), b.degree, traj(s, &b.name)?.eval(t))) };
    Ok(match e {
        Event::Birth { upper, lower, coeff } => Event::Birth { upper: fix(upper)?, lower: fix(lower)?, coeff: *coeff },
        Event::EntryBelow { elem, row } => Event::EntryBelow { elem: fix(elem)?, row: row.clone() },
        Event::EntryAbove { elem, column } => Event::EntryAbove { elem: fix(elem)?, column: column.clone() },
        other => other.clone(),
    })
}

/// Structural checks: time range, event ordering, trajectories for every generator.
pub fn validate_script(s: &PwcScript) -> Result<()> {
    if s.t_start >= s.t_end {
        return Err(Error::InvalidInput(format!("empty time range [{}, {}]", s.t_start, s.t_end)));
    }
    if s.events.windows(2).any(|w| w[0].time >= w[1].time) {
        return Err(Error::InvalidInput("event times must be distinct and sorted".into()));
    }
    if let Some(e) = s.events.iter().find(|e| e.time <= s.t_start || e.time >= s.t_end) {
        return Err(Error::InvalidInput(format!("event at t = {} outside the open time range", e.time)));
    }
    for b in &s.initial.basis {
        traj(s, &b.name)?;
    }
    for name in &s.pure {
        traj(s, name)?;
    }
    Ok(())
}

fn critical_times(s: &PwcScript, extra: impl IntoIterator<Item = Q>) -> Vec<Q> {
    let mut set: BTreeSet<Q> = BTreeSet::new();
    set.insert(s.t_start.clone());
    set.insert(s.t_end.clone());
    set.extend(s.events.iter().map(|e| e.time.clone()));
    set.extend(s.trajectories.values().flat_map(|p| p.breakpoints().cloned()));
    set.extend(s.window.breakpoints().cloned());
    set.extend(extra);
    set.into_iter().filter(|t| t >= &s.t_start && t <= &s.t_end).collect()
}

fn run(s: &PwcScript, samples: &[Q]) -> Result<Run> {
    validate_script(s)?;
    if let Some(t) = samples.iter().find(|t| **t < s.t_start || **t > s.t_end) {
        return Err(Error::InvalidInput(format!("sample time {t} outside [{}, {}]", s.t_start, s.t_end)));
    }
    let crit = critical_times(s, samples.iter().cloned());
    let events: BTreeMap<&Q, &TimedEvent> = s.events.iter().map(|e| (&e.time, e)).collect();
    let wanted: BTreeSet<&Q> = samples.iter().collect();
    let two = Q::from_integer(2.into());
    let four = Q::from_integer(4.into());

    let mut cur = s.initial.clone();
    let mut frames = Vec::new();
    let mut records = Vec::new();
    let frame = |c: FilteredComplex, t: &Q, probe: &Q, kind: FrameKind| {
        let barcode = compute_barcode(&c);
        Frame { t: t.clone(), probe: probe.clone(), kind, complex: c, barcode }
    };

    for (k, t) in crit.iter().enumerate() {
        let w = s.window.at(t);
        if let Some(te) = events.get(t) {
            check_weak(&snapshot(s, &cur, t, w.clone())?, t)?;
            check_event_timing(s, te)?;
            let h = {
                let prev = (&crit[k] - &crit[k - 1]).abs();
                let next = (&crit[k + 1] - &crit[k]).abs();
                prev.min(next) / &four
            };
            let probe = match te.event {
                Event::Death { .. } => t - &h,
                Event::HandleSlide { .. } => t.clone(),
                _ => t + &h,
            };
            let before = snapshot(s, &cur, &probe, Window::full())?;
            let ev = event_at(s, &te.event, &probe)?;
            let (_, after) =
                apply_event(&compute_barcode(&before), &before, &ev).map_err(|e| Error::IllegalEvent(format!("at t = {t}: {e}")))?;
            records.push(EventRecord { time: t.clone(), event: te.event.clone(), before });
            cur = after;
            check_weak(&snapshot(s, &cur, t, w.clone())?, t)?;
            frames.push(frame(snapshot(s, &cur, &probe, s.window.at(&probe))?, t, &probe, FrameKind::Event(te.event.kind())));
        } else {
            let c = snapshot(s, &cur, t, w)?;
            check_strict(&c, t)?;
            let kind = if *t == s.t_start {
                Some(FrameKind::Start)
            } else if *t == s.t_end {
                Some(FrameKind::End)
            } else {
                wanted.contains(t).then_some(FrameKind::Sample)
            };
            if let Some(kind) = kind {
                frames.push(frame(c, t, t, kind));
            }
        }
        if wanted.contains(t) && (events.contains_key(t) || *t == s.t_start || *t == s.t_end) {
            let last = frames.last().expect("frame just pushed").clone();
            frames.push(Frame { kind: FrameKind::Sample, ..last });
        }
        if let Some(next) = crit.get(k + 1) {
            let mid = (t + next) / &two;
            check_strict(&snapshot(s, &cur, &mid, s.window.at(&mid))?, &mid)?;
        }
    }
    let last = snapshot(s, &cur, &s.t_end, s.window.at(&s.t_end))?;
    Ok(Run { frames, records, last })
}

/// Evolve the script, checking strictness and window membership along every linear piece and
/// the legality of every event. Frames are returned for the start, each event, each requested
/// sample and the end, in time order. A sample at an event time shows the post-event state.
pub fn evolve(s: &PwcScript, samples: &[Q]) -> Result<Vec<Frame>> {
    Ok(run(s, samples)?.frames)
}

fn inverse_event(f: crate::field::Fp, rec: &EventRecord, s: &PwcScript) -> Result<Event> {
    let c = &rec.before;
    let elem = |name: &str| -> Result<BasisElem> {
        let i = c.index_of(name).ok_or_else(|| Error::IllegalEvent(format!("no element {name:?}")))?;
        let b = &c.basis[i];
        Ok(BasisElem::new(b.name.clone(), b.degree, traj(s, name)?.eval(&rec.time)))
    };
    let named = |v: Vec<u32>| -> Vec<(String, u32)> {
        v.into_iter().enumerate().filter(|(_, x)| *x != 0).map(|(i, x)| (c.basis[i].name.clone(), x)).collect()
    };
    Ok(match &rec.event {
        Event::HandleSlide { target, source, coeff } if target == source => Event::HandleSlide {
            target: target.clone(),
            source: source.clone(),
            coeff: f.inv(*coeff).ok_or_else(|| Error::IllegalEvent("rescaling by zero".into()))?,
        },
        Event::HandleSlide { target, source, coeff } => {
            Event::HandleSlide { target: target.clone(), source: source.clone(), coeff: f.neg(*coeff) }
        }
        Event::Birth { upper, lower, .. } => Event::Death { upper: upper.name.clone(), lower: lower.name.clone() },
        Event::Death { upper, lower } => {
            let (x, y) = (c.index_of(upper).unwrap_or(0), c.index_of(lower).unwrap_or(0));
            Event::Birth { upper: elem(upper)?, lower: elem(lower)?, coeff: c.d.get(y, x) }
        }
        Event::ExitBelow { name } => {
            let i = c.index_of(name).ok_or_else(|| Error::IllegalEvent(format!("no element {name:?}")))?;
            Event::EntryBelow { elem: elem(name)?, row: named(c.d.row(i)) }
        }
        Event::ExitAbove { name } => {
            let i = c.index_of(name).ok_or_else(|| Error::IllegalEvent(format!("no element {name:?}")))?;
            Event::EntryAbove { elem: elem(name)?, column: named(c.d.column(i)) }
        }
        Event::EntryBelow { elem, .. } => Event::ExitBelow { name: elem.name.clone() },
        Event::EntryAbove { elem, .. } => Event::ExitAbove { name: elem.name.clone() },
    })
}

/// The script run backwards in time: `t ↦ t_start + t_end − t`, events inverted in reverse
/// order, starting from the final complex of `s`.
pub fn reverse_script(s: &PwcScript) -> Result<PwcScript> {
    let r = run(s, &[])?;
    let total = &s.t_start + &s.t_end;
    let mut events = Vec::new();
    for rec in r.records.iter().rev() {
        events.push(TimedEvent { time: &total - &rec.time, event: inverse_event(s.initial.field, rec, s)? });
    }
    Ok(PwcScript {
        t_start: s.t_start.clone(),
        t_end: s.t_end.clone(),
        initial: r.last,
        trajectories: s.trajectories.iter().map(|(k, p)| (k.clone(), p.reflect(&total))).collect(),
        window: s.window.reflect(&total),
        events,
        pure: s.pure.clone(),
    })
}

/// The complex at `t_end`.
pub fn final_complex(s: &PwcScript) -> Result<FilteredComplex> {
    Ok(run(s, &[])?.last)
}

/// `max H_t − min H_t` as a piecewise-linear function, with optional data for the alternative
/// norms: `max H_t` itself and a bound on `|g|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OscProfile {
    pub osc: Piecewise,
    pub max_h: Option<Piecewise>,
    pub g_bound: Option<Q>,
}

/// Which accumulated Hofer-type length bounds the window width.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Norm {
    /// `∫ (max H − min H)`
    Osc,
    /// `∫ max H`
    MaxH,
    /// `∫ (max H − min H) + max |g|`
    OscPlusG,
}

impl OscProfile {
    pub fn new(osc: Piecewise) -> Result<Self> {
        let p = OscProfile { osc, max_h: None, g_bound: None };
        p.validate()?;
        Ok(p)
    }

    pub fn constant(v: Q) -> Result<Self> {
        OscProfile::new(Piecewise::constant(Action::rational(v)))
    }

    pub fn validate(&self) -> Result<()> {
        if !self.osc.is_rational() || self.max_h.as_ref().is_some_and(|p| !p.is_rational()) {
            return Err(Error::InvalidInput("oscillation profile must be rational".into()));
        }
        if self.osc.points().iter().any(|p| p.1.signum().is_lt()) {
            return Err(Error::InvalidInput("oscillation must be nonnegative".into()));
        }
        if self.g_bound.as_ref().is_some_and(|g| g.is_negative()) {
            return Err(Error::InvalidInput("bound on |g| must be nonnegative".into()));
        }
        Ok(())
    }

    /// `l(t) = ∫_{t0}^t (max H − min H)`.
    pub fn length(&self, t0: &Q, t: &Q) -> Result<Q> {
        self.osc.integral(t0, t)
    }

    fn integrand(&self, norm: Norm) -> Result<(&Piecewise, Q)> {
        match norm {
            Norm::Osc => Ok((&self.osc, Q::zero())),
            Norm::MaxH => {
                self.max_h.as_ref().map(|p| (p, Q::zero())).ok_or_else(|| Error::InvalidInput("profile has no max H data".into()))
            }
            Norm::OscPlusG => {
                self.g_bound.clone().map(|g| (&self.osc, g)).ok_or_else(|| Error::InvalidInput("profile has no bound on |g|".into()))
            }
        }
    }

    /// Accumulated length for the chosen norm.
    pub fn norm_length(&self, norm: Norm, t0: &Q, t: &Q) -> Result<Q> {
        let (p, offset) = self.integrand(norm)?;
        Ok(p.integral(t0, t)? + offset)
    }
}

/// `l(t)` against the alternative lengths at time `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormComparison {
    pub l: Q,
    pub l1: Option<Q>,
    pub l2: Option<Q>,
}

impl NormComparison {
    pub fn l_le_l1(&self) -> Option<bool> {
        self.l1.as_ref().map(|l1| &self.l <= l1)
    }

    pub fn l_le_l2(&self) -> Option<bool> {
        self.l2.as_ref().map(|l2| &self.l <= l2)
    }
}

pub fn compare_norms(p: &OscProfile, t0: &Q, t: &Q) -> Result<NormComparison> {
    Ok(NormComparison {
        l: p.length(t0, t)?,
        l1: p.max_h.is_some().then(|| p.norm_length(Norm::MaxH, t0, t)).transpose()?,
        l2: p.g_bound.is_some().then(|| p.norm_length(Norm::OscPlusG, t0, t)).transpose()?,
    })
}

/// A time, either exact or enclosed in a rational interval (for irrational roots).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TimeLocation {
    Exact(Q),
    Between(Q, Q),
}

impl TimeLocation {
    fn shift(self, by: &Q) -> TimeLocation {
        match self {
            TimeLocation::Exact(t) => TimeLocation::Exact(t + by),
            TimeLocation::Between(a, b) => TimeLocation::Between(a + by, b + by),
        }
    }

    fn lower(&self) -> &Q {
        match self {
            TimeLocation::Exact(t) | TimeLocation::Between(t, _) => t,
        }
    }
}

impl fmt::Display for TimeLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeLocation::Exact(t) => write!(f, "{t}"),
            TimeLocation::Between(a, b) => write!(f, "[{a}, {b}]"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub at: TimeLocation,
    /// `"width"` for `b − a ≤ 0`, `"budget"` for `b − a ≥ l − l(t)`.
    pub condition: &'static str,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Admissibility {
    pub first_violation: Option<Violation>,
}

impl Admissibility {
    pub fn admissible(&self) -> bool {
        self.first_violation.is_none()
    }
}

fn is_square(r: &Q) -> Option<Q> {
    if r.is_negative() {
        return None;
    }
    let (n, d) = (r.numer().sqrt(), r.denom().sqrt());
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| Q::new(n, d))
}

/// `[lo, hi] ∋ √r` with `hi − lo ≤ max(1, r) / 2^steps`.
fn sqrt_enclosure(r: &Q, steps: u32) -> (Q, Q) {
    let (mut lo, mut hi) = (Q::zero(), r.clone().max(Q::one()));
    let two = Q::from_integer(2.into());
    for _ in 0..steps {
        let mid = (&lo + &hi) / &two;
        if &mid * &mid <= *r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// First `s ∈ [0, len]` with `α + βs + γs² ≤ 0`.
fn first_nonpositive(alpha: &Q, beta: &Q, gamma: &Q, len: &Q) -> Option<TimeLocation> {
    if !alpha.is_positive() {
        return Some(TimeLocation::Exact(Q::zero()));
    }
    if gamma.is_zero() {
        if beta.is_negative() {
            let r = -alpha / beta;
            return (&r <= len).then_some(TimeLocation::Exact(r));
        }
        return None;
    }
    let disc = beta * beta - Q::from_integer(4.into()) * alpha * gamma;
    if disc.is_negative() {
        return None;
    }
    let two_gamma = gamma * Q::from_integer(2.into());
    // root(σ) = (−β + σ√disc) / 2γ; order the two signs so the smaller root comes first
    let signs: [i32; 2] = if gamma.is_positive() { [-1, 1] } else { [1, -1] };
    if let Some(sq) = is_square(&disc) {
        return signs
            .iter()
            .map(|&s| (-beta + Q::from_integer(s.into()) * &sq) / &two_gamma)
            .find(|r| r.is_positive() && r <= len)
            .map(TimeLocation::Exact);
    }
    let mut steps = 64;
    loop {
        let (slo, shi) = sqrt_enclosure(&disc, steps);
        let mut decided = true;
        let mut found = None;
        for &s in &signs {
            let sq = Q::from_integer(s.into());
            let a = (-beta + &sq * &slo) / &two_gamma;
            let b = (-beta + &sq * &shi) / &two_gamma;
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let positive = if lo.is_positive() {
                Some(true)
            } else if !hi.is_positive() {
                Some(false)
            } else {
                None
            };
            let inside = if &hi <= len {
                Some(true)
            } else if &lo > len {
                Some(false)
            } else {
                None
            };
            match (positive, inside) {
                (Some(true), Some(true)) => {
                    found = Some(TimeLocation::Between(lo, hi));
                    break;
                }
                (Some(false), _) | (_, Some(false)) => {}
                _ => {
                    decided = false;
                    break;
                }
            }
        }
        if decided {
            return found;
        }
        steps *= 2;
    }
}

/// Check `0 < b_t − a_t < l − l(t)` on `[t_start, t_end]` for a script with a finite rational
/// window. The constraint is piecewise quadratic in `t`; the first violation is exact when
/// the crossing is rational and a rational enclosure otherwise.
pub fn check_window_admissibility(s: &PwcScript, osc: &OscProfile, l: &Q) -> Result<Admissibility> {
    check_window_admissibility_with(s, osc, l, Norm::Osc)
}

pub fn check_window_admissibility_with(s: &PwcScript, osc: &OscProfile, l: &Q, norm: Norm) -> Result<Admissibility> {
    osc.validate()?;
    let (lo, hi) = match (&s.window.lo, &s.window.hi) {
        (Some(a), Some(b)) if a.is_rational() && b.is_rational() => (a, b),
        _ => return Err(Error::InvalidInput("admissibility needs a finite rational window".into())),
    };
    let (rate, offset) = osc.integrand(norm)?;
    let mut cuts: BTreeSet<Q> = [s.t_start.clone(), s.t_end.clone()].into();
    cuts.extend(lo.breakpoints().chain(hi.breakpoints()).chain(rate.breakpoints()).cloned());
    let cuts: Vec<Q> = cuts.into_iter().filter(|t| t >= &s.t_start && t <= &s.t_end).collect();
    let two = Q::from_integer(2.into());
    let width = |t: &Q| -> Result<Q> { Ok(hi.eval_rational(t)? - lo.eval_rational(t)?) };
    let mut acc = offset;
    for w in cuts.windows(2) {
        let (ta, tb) = (&w[0], &w[1]);
        let len = tb - ta;
        let (wa, wb) = (width(ta)?, width(tb)?);
        let (oa, ob) = (rate.eval_rational(ta)?, rate.eval_rational(tb)?);
        let wslope = (&wb - &wa) / &len;
        let mut hits = Vec::new();
        if let Some(v) = first_nonpositive(&wa, &wslope, &Q::zero(), &len) {
            hits.push(Violation { at: v.shift(ta), condition: "width" });
        }
        let alpha = l - &acc - &wa;
        let beta = -&oa - &wslope;
        let gamma = -(&ob - &oa) / (&two * &len);
        if let Some(v) = first_nonpositive(&alpha, &beta, &gamma, &len) {
            hits.push(Violation { at: v.shift(ta), condition: "budget" });
        }
        if let Some(v) = hits.into_iter().min_by(|a, b| a.at.lower().cmp(b.at.lower())) {
            return Ok(Admissibility { first_violation: Some(v) });
        }
        acc += (oa + ob) * &len / &two;
    }
    if cuts.len() == 1 {
        let t = &cuts[0];
        let wa = width(t)?;
        let cond = if !wa.is_positive() {
            Some("width")
        } else if wa >= l - &acc {
            Some("budget")
        } else {
            None
        };
        if let Some(condition) = cond {
            return Ok(Admissibility { first_violation: Some(Violation { at: TimeLocation::Exact(t.clone()), condition }) });
        }
    }
    Ok(Admissibility { first_violation: None })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpeedReport {
    pub violations: Vec<String>,
}

impl SpeedReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Generators alive on each open piece between consecutive cut times.
fn alive_sets(s: &PwcScript, cuts: &[Q]) -> Vec<BTreeSet<String>> {
    let mut alive: BTreeSet<String> = s.initial.basis.iter().map(|b| b.name.clone()).collect();
    let mut ev = s.events.iter().peekable();
    let mut out = Vec::new();
    for w in cuts.windows(2) {
        while let Some(e) = ev.next_if(|e| e.time <= w[0]) {
            match &e.event {
                Event::Birth { upper, lower, .. } => {
                    alive.insert(upper.name.clone());
                    alive.insert(lower.name.clone());
                }
                Event::Death { upper, lower } => {
                    alive.remove(upper);
                    alive.remove(lower);
                }
                Event::ExitBelow { name } | Event::ExitAbove { name } => {
                    alive.remove(name);
                }
                Event::EntryBelow { elem, .. } | Event::EntryAbove { elem, .. } => {
                    alive.insert(elem.name.clone());
                }
                Event::HandleSlide { .. } => {}
            }
        }
        out.push(alive.clone());
    }
    out
}

/// Chord-speed law: on every linear piece the rate of change of each action difference is at
/// most the oscillation (and each listed pure chord moves no faster than it); over every
/// common lifetime the total drift of each action difference is at most `∫ osc`.
pub fn check_speed_law(s: &PwcScript, osc: &OscProfile) -> Result<SpeedReport> {
    validate_script(s)?;
    osc.validate()?;
    let mut cuts: BTreeSet<Q> = critical_times(s, []).into_iter().collect();
    cuts.extend(osc.osc.breakpoints().filter(|t| *t > &s.t_start && *t < &s.t_end).cloned());
    let cuts: Vec<Q> = cuts.into_iter().collect();
    let alive = alive_sets(s, &cuts);
    let mut violations = Vec::new();
    let slope = |name: &str, a: &Q, b: &Q| traj(s, name).map(|p| p.slope(a, b));
    for (w, names) in cuts.windows(2).zip(&alive) {
        let (ta, tb) = (&w[0], &w[1]);
        let bound = Action::rational(osc.osc.eval_rational(ta)?.min(osc.osc.eval_rational(tb)?));
        let mut rates = Vec::new();
        for n in names {
            rates.push((slope(n, ta, tb)?, n));
        }
        if let (Some(mx), Some(mn)) = (rates.iter().max(), rates.iter().min()) {
            let rel = &mx.0 - &mn.0;
            if rel > bound {
                violations.push(format!("on [{ta}, {tb}]: {} and {} separate at rate {rel} > osc {bound}", mx.1, mn.1));
            }
        }
        for (r, n) in &rates {
            if s.pure.contains(n) && (r.signum().is_gt() && *r > bound || r.signum().is_lt() && -r > bound) {
                violations.push(format!("on [{ta}, {tb}]: pure chord {n} moves at rate {r}, osc {bound}"));
            }
        }
    }
    // integrated drift over maximal common lifetimes
    let all: BTreeSet<&String> = alive.iter().flatten().collect();
    let all: Vec<&String> = all.into_iter().collect();
    for (i, c) in all.iter().enumerate() {
        for d in &all[i + 1..] {
            let mut start: Option<&Q> = None;
            for (k, names) in alive.iter().enumerate() {
                let both = names.contains(*c) && names.contains(*d);
                if both && start.is_none() {
                    start = Some(&cuts[k]);
                }
                let closes = both && alive.get(k + 1).is_none_or(|n| !(n.contains(*c) && n.contains(*d)));
                if closes {
                    let (a, b) = (start.take().expect("run open"), &cuts[k + 1]);
                    let diff = |t: &Q| -> Result<Action> { Ok(traj(s, c)?.eval(t) - traj(s, d)?.eval(t)) };
                    let drift = diff(b)? - diff(a)?;
                    let budget = Action::rational(osc.length(a, b)?);
                    let mag = if drift.signum().is_lt() { -&drift } else { drift };
                    if mag > budget {
                        violations.push(format!("on [{a}, {b}]: ℓ({c}) − ℓ({d}) drifts by {mag} > ∫osc = {budget}"));
                    }
                }
            }
        }
    }
    Ok(SpeedReport { violations })
}

/// One step between consecutive grid complexes.
#[derive(Clone, Debug)]
#[allow(clippy::large_enum_variant)]
pub enum GridStep {
    /// A degree-ε equivalence `D_i → D_{i+1}` of δ-gapped complexes.
    Simple(EquivalenceCertificate),
    /// A pair appears or disappears in `[a + δ, a + 3δ)`. The certificate maps the complex that
    /// contains the pair to the one that does not; the direction decides birth or death.
    BirthDeath { cert: EquivalenceCertificate, a: Action, eps: Action },
}

fn same_names(a: &FilteredComplex, b: &FilteredComplex, skip: &[&str]) -> bool {
    let names = |c: &FilteredComplex| -> BTreeSet<String> {
        c.basis.iter().map(|x| x.name.clone()).filter(|n| !skip.contains(&n.as_str())).collect()
    };
    names(a) == names(b)
}

fn action_of(c: &FilteredComplex, name: &str) -> Action {
    c.basis[c.index_of(name).expect("name checked")].action.clone()
}

struct Builder {
    traj: BTreeMap<String, Vec<(Q, Action)>>,
    events: Vec<TimedEvent>,
}

impl Builder {
    fn point(&mut self, name: &str, t: &Q, v: Action) {
        let pts = self.traj.entry(name.to_string()).or_default();
        if pts.last().is_some_and(|p| &p.0 == t) {
            pts.pop();
        }
        pts.push((t.clone(), v));
    }
}

/// Split the pair `(x, y)` in `s` by handle-slides: first `y ↦ y + (w/k)e` for each lower term
/// `w·e` of `∂x = k·y + …`, then `z ↦ z − (c/k)x` for each `z` with `∂z ∋ c·y`.
fn splitting_slides(s: &FilteredComplex, x: &str, y: &str) -> Result<(Vec<Event>, FilteredComplex)> {
    let f = s.field;
    let mut cur = s.clone();
    let mut slides = Vec::new();
    let step = |cur: &mut FilteredComplex, ev: Event, slides: &mut Vec<Event>| -> Result<()> {
        let (_, next) = apply_event(&compute_barcode(cur), cur, &ev)?;
        *cur = next;
        slides.push(ev);
        Ok(())
    };
    loop {
        let (xi, yi) = (cur.index_of(x).expect("pair present"), cur.index_of(y).expect("pair present"));
        let k = cur.d.get(yi, xi);
        let kinv = f.inv(k).ok_or_else(|| Error::Hypothesis(format!("∂{x} has no {y} term")))?;
        let Some(e) = (0..cur.dim()).find(|&i| i != yi && cur.d.get(i, xi) != 0) else { break };
        let coeff = f.mul(cur.d.get(e, xi), kinv);
        let ev = Event::HandleSlide { target: y.into(), source: cur.basis[e].name.clone(), coeff };
        step(&mut cur, ev, &mut slides)?;
    }
    loop {
        let (xi, yi) = (cur.index_of(x).expect("pair present"), cur.index_of(y).expect("pair present"));
        let kinv = f.inv(cur.d.get(yi, xi)).expect("checked above");
        let Some(z) = (0..cur.dim()).find(|&j| j != xi && cur.d.get(yi, j) != 0) else { break };
        let coeff = f.neg(f.mul(cur.d.get(yi, z), kinv));
        let ev = Event::HandleSlide { target: cur.basis[z].name.clone(), source: x.into(), coeff };
        step(&mut cur, ev, &mut slides)?;
    }
    Ok((slides, cur))
}

/// Build a PWC script through the grid complexes `D_0, …, D_N` at times `i/N`, verifying each
/// step with the matching lemma checker. Basis elements of consecutive grid complexes are
/// matched by name. Simple steps move actions linearly; birth/death steps split the pair by
/// handle-slides (deaths) and place the event at the midpoint of the step. The result is
/// evolved and its barcodes compared with the grid barcodes.
pub fn assemble_pwc_from_equivalences(grid: &[FilteredComplex], steps: &[GridStep], delta: &Action) -> Result<PwcScript> {
    if grid.is_empty() || steps.len() + 1 != grid.len() {
        return Err(Error::InvalidInput(format!(
            "{} grid complexes need {} steps, got {}",
            grid.len(),
            grid.len().saturating_sub(1),
            steps.len()
        )));
    }
    let n = Q::from_integer(steps.len().max(1).into());
    let times: Vec<Q> = (0..grid.len()).map(|i| Q::from_integer(i.into()) / &n).collect();
    let two = Q::from_integer(2.into());
    let mut b = Builder { traj: BTreeMap::new(), events: Vec::new() };
    for e in &grid[0].basis {
        b.point(&e.name, &times[0], e.action.clone());
    }
    let mut state = grid[0].clone();

    for (i, step) in steps.iter().enumerate() {
        let (di, dn) = (&grid[i], &grid[i + 1]);
        let (t0, t1) = (&times[i], &times[i + 1]);
        let mid = (t0 + t1) / &two;
        match step {
            GridStep::Simple(cert) => {
                if cert.source() != di || cert.target() != dn {
                    return Err(Error::Certificate(format!("step {i}: certificate does not map D_{i} to D_{}", i + 1)));
                }
                match check_simple_equivalence(cert, delta)? {
                    SimpleOutcome::HypothesisViolated(v) => {
                        return Err(Error::Hypothesis(format!("step {i}: {}", v.join("; "))));
                    }
                    SimpleOutcome::Verdict(v) if !v.confirmed() => {
                        return Err(Error::Certificate(format!("step {i}: equivalence is not a filtered isomorphism: {v:?}")));
                    }
                    SimpleOutcome::Verdict(_) => {}
                }
                if !same_names(di, dn, &[]) {
                    return Err(Error::InvalidInput(format!("step {i}: D_{i} and D_{} have different basis names", i + 1)));
                }
                for e in &dn.basis {
                    b.point(&e.name, t1, e.action.clone());
                }
            }
            GridStep::BirthDeath { cert, a, eps } => {
                let death = cert.source() == di && cert.target() == dn;
                let birth = cert.source() == dn && cert.target() == di;
                if !death && !birth {
                    return Err(Error::Certificate(format!("step {i}: certificate does not connect D_{i} and D_{}", i + 1)));
                }
                let (with, without) = if death { (di, dn) } else { (dn, di) };
                let v = check_birth_death_shape(with, without, a, delta, eps, Some(cert))
                    .map_err(|e| Error::Hypothesis(format!("step {i}: {e}")))?;
                if !same_names(with, without, &[&v.upper, &v.lower]) {
                    return Err(Error::InvalidInput(format!("step {i}: complexes differ outside the pair")));
                }
                let meet = (action_of(with, &v.upper) + action_of(with, &v.lower)).half();
                for e in &without.basis {
                    b.point(&e.name, t0, action_of(di, &e.name));
                    b.point(&e.name, t1, action_of(dn, &e.name));
                }
                if death {
                    let at_t0 = {
                        let mut c = state.clone();
                        for e in &mut c.basis {
                            e.action = action_of(di, &e.name);
                        }
                        c
                    };
                    let (slides, split) = splitting_slides(&at_t0, &v.upper, &v.lower)?;
                    let m = Q::from_integer((slides.len() + 1).into());
                    for (j, ev) in slides.into_iter().enumerate() {
                        let t = t0 + (&mid - t0) * Q::from_integer((j + 1).into()) / &m;
                        b.events.push(TimedEvent { time: t, event: ev });
                    }
                    b.point(&v.upper, &mid, meet.clone());
                    b.point(&v.lower, &mid, meet);
                    b.events.push(TimedEvent { time: mid.clone(), event: Event::Death { upper: v.upper.clone(), lower: v.lower.clone() } });
                    let keep: Vec<usize> =
                        (0..split.dim()).filter(|&j| split.basis[j].name != v.upper && split.basis[j].name != v.lower).collect();
                    state = split.restrict(&keep, dn.window.clone());
                } else {
                    b.point(&v.upper, &mid, meet.clone());
                    b.point(&v.lower, &mid, meet.clone());
                    b.point(&v.upper, t1, action_of(dn, &v.upper));
                    b.point(&v.lower, t1, action_of(dn, &v.lower));
                    let elem = |name: &str| {
                        let e = &dn.basis[dn.index_of(name).expect("pair present")];
                        BasisElem::new(e.name.clone(), e.degree, meet.clone())
                    };
                    let event = Event::Birth { upper: elem(&v.upper), lower: elem(&v.lower), coeff: v.coeff };
                    let (_, next) = apply_event(
                        &compute_barcode(&state),
                        &state,
                        &Event::Birth {
                            upper: BasisElem::new(v.upper.clone(), elem(&v.upper).degree, action_of(dn, &v.upper)),
                            lower: BasisElem::new(v.lower.clone(), elem(&v.lower).degree, action_of(dn, &v.lower)),
                            coeff: v.coeff,
                        },
                    )
                    .map_err(|e| Error::Hypothesis(format!("step {i}: {e}")))?;
                    state = next;
                    b.events.push(TimedEvent { time: mid.clone(), event });
                }
            }
        }
        for e in &mut state.basis {
            e.action = action_of(dn, &e.name);
        }
        state.window = dn.window.clone();
    }

    let window = grid_window(grid, &times)?;
    let trajectories = b.traj.into_iter().map(|(k, pts)| Ok((k, Piecewise::new(pts)?))).collect::<Result<_>>()?;
    let script = PwcScript {
        t_start: times[0].clone(),
        t_end: times.last().expect("nonempty").clone().max(Q::one()),
        initial: grid[0].clone(),
        trajectories,
        window,
        events: b.events,
        pure: Vec::new(),
    };
    let frames = evolve(&script, &times)?;
    for (i, t) in times.iter().enumerate() {
        let fr = frames
            .iter()
            .find(|f| &f.t == t && f.kind == FrameKind::Sample)
            .ok_or_else(|| Error::Certificate(format!("no frame at grid time {t}")))?;
        if !fr.barcode.same_bars(&compute_barcode(&grid[i])) {
            return Err(Error::Certificate(format!("assembled family disagrees with D_{i} at t = {t}")));
        }
    }
    Ok(script)
}

fn grid_window(grid: &[FilteredComplex], times: &[Q]) -> Result<WindowTraj> {
    let side = |pick: fn(&Window) -> &Option<Action>| -> Result<Option<Piecewise>> {
        let vals: Vec<&Option<Action>> = grid.iter().map(|c| pick(&c.window)).collect();
        if vals.iter().all(|v| v.is_none()) {
            return Ok(None);
        }
        if vals.iter().any(|v| v.is_none()) {
            return Err(Error::InvalidInput("grid windows mix finite and infinite endpoints".into()));
        }
        let pts = times.iter().zip(vals).map(|(t, v)| (t.clone(), v.clone().expect("checked"))).collect();
        Ok(Some(Piecewise::new(pts)?))
    };
    Ok(WindowTraj { lo: side(|w| &w.lo)?, hi: side(|w| &w.hi)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::{q, qi};
    use crate::barcode::Bar;
    use crate::field::Fp;
    use crate::matrix::Matrix;

    fn lin(pairs: &[(i64, i64, i64, i64)]) -> Piecewise {
        Piecewise::new(pairs.iter().map(|&(tn, td, vn, vd)| (q(tn, td), Action::ratio(vn, vd))).collect()).unwrap()
    }

    fn c0(names: &[(&str, i64, i64)], d: &[(usize, usize)]) -> FilteredComplex {
        let f = Fp::two();
        let basis = names.iter().map(|&(n, deg, a)| BasisElem::new(n, deg, Action::int(a))).collect::<Vec<_>>();
        let mut m = Matrix::zeros(f, basis.len(), basis.len());
        for &(i, j) in d {
            m.set(i, j, 1);
        }
        FilteredComplex::new(f, 0, basis, m, Window::full()).unwrap()
    }

    fn script(initial: FilteredComplex, traj: Vec<(&str, Piecewise)>, events: Vec<TimedEvent>) -> PwcScript {
        PwcScript {
            t_start: qi(0),
            t_end: qi(1),
            initial,
            trajectories: traj.into_iter().map(|(k, p)| (k.to_string(), p)).collect(),
            window: WindowTraj::full(),
            events,
            pure: vec![],
        }
    }

    #[test]
    fn constant_script_constant_barcode() {
        let c = c0(&[("a", 0, 0), ("b", 1, 2)], &[(0, 1)]);
        let s = script(c, vec![("a", Piecewise::constant(Action::int(0))), ("b", Piecewise::constant(Action::int(2)))], vec![]);
        let frames = evolve(&s, &[q(1, 3), q(2, 3)]).unwrap();
        assert_eq!(frames.len(), 4);
        assert!(frames.windows(2).all(|w| w[0].barcode.same_bars(&w[1].barcode)));
    }

    #[test]
    fn birth_gives_short_bar() {
        let c = c0(&[("a", 0, 0)], &[]);
        let birth = Event::Birth { upper: BasisElem::new("x", 1, Action::int(5)), lower: BasisElem::new("y", 0, Action::int(5)), coeff: 1 };
        let s = script(
            c,
            vec![
                ("a", Piecewise::constant(Action::int(0))),
                ("x", lin(&[(1, 2, 5, 1), (1, 1, 6, 1)])),
                ("y", lin(&[(1, 2, 5, 1), (1, 1, 4, 1)])),
            ],
            vec![TimedEvent { time: q(1, 2), event: birth }],
        );
        let frames = evolve(&s, &[]).unwrap();
        let ev = frames.iter().find(|f| f.kind == FrameKind::Event("birth")).unwrap();
        let short: Vec<&Bar> = ev.barcode.finite_bars().collect();
        assert_eq!(short.len(), 1);
        // probe at t = 5/8: the pair has separated to [19/4, 21/4)
        assert_eq!(short[0].start, Action::ratio(19, 4));
        assert_eq!(short[0].end, Some(Action::ratio(21, 4)));
        let end = frames.last().unwrap();
        assert_eq!(end.barcode.finite_bars().next().unwrap().end, Some(Action::int(6)));
    }

    #[test]
    fn exit_below_makes_bar_infinite() {
        let mut c = c0(&[("y", 0, 1), ("x", 1, 3)], &[(0, 1)]);
        c.window = Window::finite(Action::int(0), Action::int(10));
        let mut s = script(
            c,
            vec![("y", lin(&[(0, 1, 1, 1), (1, 1, -1, 1)])), ("x", Piecewise::constant(Action::int(3)))],
            vec![TimedEvent { time: q(1, 2), event: Event::ExitBelow { name: "y".into() } }],
        );
        s.window = WindowTraj::constant(&Window::finite(Action::int(0), Action::int(10)));
        let frames = evolve(&s, &[]).unwrap();
        assert_eq!(frames[0].barcode.bars(), &[Bar::finite(Action::int(1), Action::int(3), 0)]);
        let end = frames.last().unwrap();
        assert_eq!(end.barcode.bars(), &[Bar::infinite(Action::int(3), 1)]);

        let r = reverse_script(&s).unwrap();
        assert!(matches!(r.events[0].event, Event::EntryBelow { .. }));
        let back = final_complex(&r).unwrap();
        let mut start = s.initial.clone();
        start.window = s.window.at(&qi(0));
        assert_eq!(back.canonical(), start.canonical());
    }

    #[test]
    fn strictness_violation_detected() {
        let c = c0(&[("y", 0, 1), ("x", 1, 3)], &[(0, 1)]);
        let s = script(c, vec![("y", lin(&[(0, 1, 1, 1), (1, 1, 4, 1)])), ("x", Piecewise::constant(Action::int(3)))], vec![]);
        assert!(evolve(&s, &[]).is_err());
    }

    #[test]
    fn ill_timed_death_rejected() {
        let c = c0(&[("y", 0, 1), ("x", 1, 3)], &[(0, 1)]);
        let s = script(
            c,
            vec![("y", Piecewise::constant(Action::int(1))), ("x", Piecewise::constant(Action::int(3)))],
            vec![TimedEvent { time: q(1, 2), event: Event::Death { upper: "x".into(), lower: "y".into() } }],
        );
        assert!(matches!(evolve(&s, &[]), Err(Error::IllegalEvent(_))));
    }

    fn window_script(width: Q) -> PwcScript {
        let mut s = script(FilteredComplex::zero(Fp::two()), vec![], vec![]);
        s.window = WindowTraj {
            lo: Some(Piecewise::constant(Action::rational(-&width / qi(2)))),
            hi: Some(Piecewise::constant(Action::rational(&width / qi(2)))),
        };
        s
    }

    #[test]
    fn admissibility_examples() {
        let eps = q(1, 10);
        let s = window_script(&eps * qi(4));
        let l = &eps * qi(6);
        let ok = check_window_admissibility(&s, &OscProfile::constant(qi(0)).unwrap(), &l).unwrap();
        assert!(ok.admissible());
        let bad = check_window_admissibility(&s, &OscProfile::constant(&eps * qi(2)).unwrap(), &l).unwrap();
        assert_eq!(bad.first_violation, Some(Violation { at: TimeLocation::Exact(qi(1)), condition: "budget" }));
        let p = OscProfile::constant(q(3, 10)).unwrap();
        assert_eq!(p.length(&qi(0), &q(1, 2)).unwrap(), q(3, 20));
        assert_eq!(p.length(&qi(0), &qi(1)).unwrap(), q(3, 10));
    }

    #[test]
    fn irrational_crossing_is_enclosed() {
        // osc(t) = 2t, so l(t) = t²; width 1, l = 3/2: crossing at t = 1/√2
        let s = window_script(qi(1));
        let p = OscProfile::new(lin(&[(0, 1, 0, 1), (1, 1, 2, 1)])).unwrap();
        let v = check_window_admissibility(&s, &p, &q(3, 2)).unwrap().first_violation.unwrap();
        let TimeLocation::Between(a, b) = v.at else { panic!("expected an enclosure") };
        assert!(&a * &a < q(1, 2) && &b * &b > q(1, 2));
        assert!(&b - &a < q(1, 1_000_000));
    }

    #[test]
    fn zero_width_window_fails() {
        let s = window_script(qi(0));
        let v = check_window_admissibility(&s, &OscProfile::constant(qi(0)).unwrap(), &qi(1)).unwrap();
        assert_eq!(v.first_violation.unwrap().condition, "width");
    }

    #[test]
    fn speed_law_examples() {
        let c = c0(&[("a", 0, 0), ("b", 0, 0)], &[]);
        let drift = |r: (i64, i64)| {
            script(c.clone(), vec![("a", Piecewise::constant(Action::int(0))), ("b", lin(&[(0, 1, 0, 1), (1, 1, r.0, r.1)]))], vec![])
        };
        assert!(check_speed_law(&drift((0, 1)), &OscProfile::constant(qi(0)).unwrap()).unwrap().passed());
        assert!(check_speed_law(&drift((1, 1)), &OscProfile::constant(qi(1)).unwrap()).unwrap().passed());
        let r = check_speed_law(&drift((3, 5)), &OscProfile::constant(q(1, 2)).unwrap()).unwrap();
        assert!(!r.passed());
        assert_eq!(r.violations.len(), 2);
    }

    #[test]
    fn pure_chord_speed() {
        let c = c0(&[("a", 0, 0)], &[]);
        let mut s = script(c, vec![("a", lin(&[(0, 1, 0, 1), (1, 1, 1, 1)]))], vec![]);
        assert!(check_speed_law(&s, &OscProfile::constant(q(1, 2)).unwrap()).unwrap().passed());
        s.pure = vec!["a".into()];
        assert!(!check_speed_law(&s, &OscProfile::constant(q(1, 2)).unwrap()).unwrap().passed());
    }

    #[test]
    fn norm_comparison() {
        let p = OscProfile {
            osc: Piecewise::constant(Action::int(1)),
            max_h: Some(Piecewise::constant(Action::int(1))),
            g_bound: Some(q(1, 3)),
        };
        let n = compare_norms(&p, &qi(0), &qi(1)).unwrap();
        assert_eq!(n.l_le_l1(), Some(true));
        assert_eq!(n.l2, Some(q(4, 3)));
    }

    #[test]
    fn constant_grid_assembles_to_constant_script() {
        let c = c0(&[("y", 0, 0), ("x", 1, 10)], &[(0, 1)]);
        let grid = vec![c.clone(), c.clone(), c.clone()];
        let steps = vec![GridStep::Simple(EquivalenceCertificate::identity(&c)), GridStep::Simple(EquivalenceCertificate::identity(&c))];
        let s = assemble_pwc_from_equivalences(&grid, &steps, &Action::int(2)).unwrap();
        assert!(s.events.is_empty());
        assert!(s.trajectories.values().all(|p| p.points().iter().all(|pt| pt.1 == p.points()[0].1)));
    }

    #[test]
    fn gap_violation_reported() {
        let c = c0(&[("y", 0, 0), ("x", 1, 1)], &[(0, 1)]);
        let steps = vec![GridStep::Simple(EquivalenceCertificate::identity(&c))];
        let e = assemble_pwc_from_equivalences(&[c.clone(), c], &steps, &Action::int(2)).unwrap_err();
        assert!(matches!(e, Error::Hypothesis(_)));
    }

    #[test]
    fn single_birth_and_death_from_grid() {
        for seed in 0..12 {
            let mut r = crate::gen::rng(seed);
            let f = if seed % 2 == 0 { Fp::two() } else { Fp::new(5).unwrap() };
            let inst = crate::gen::birth_death_instance(&mut r, f, 4, &Action::int(4), &Action::int(1));
            let step = GridStep::BirthDeath { cert: inst.cert.clone(), a: inst.a.clone(), eps: inst.eps.clone() };
            let births =
                assemble_pwc_from_equivalences(&[inst.c_prime.clone(), inst.c.clone()], std::slice::from_ref(&step), &inst.delta).unwrap();
            let kinds: Vec<&str> = births.events.iter().map(|e| e.event.kind()).collect();
            assert_eq!(kinds, ["birth"], "seed {seed}");
            let deaths = assemble_pwc_from_equivalences(&[inst.c.clone(), inst.c_prime.clone()], &[step], &inst.delta).unwrap();
            assert_eq!(deaths.events.last().unwrap().event.kind(), "death");
            assert!(deaths.events.iter().rev().skip(1).all(|e| e.event.kind() == "handle-slide"));
            let back = reverse_script(&deaths).unwrap();
            assert_eq!(final_complex(&back).unwrap().canonical(), inst.c.canonical());
        }
    }

    #[test]
    fn birth_shape_failure_reported() {
        let mut r = crate::gen::rng(7);
        let inst = crate::gen::birth_death_instance(&mut r, Fp::two(), 3, &Action::int(4), &Action::int(1));
        let step = GridStep::BirthDeath { cert: inst.cert.clone(), a: inst.a.clone(), eps: Action::int(5) };
        let e = assemble_pwc_from_equivalences(&[inst.c_prime.clone(), inst.c.clone()], &[step], &inst.delta).unwrap_err();
        assert!(matches!(e, Error::Hypothesis(_)));
    }
}
