//! Versioned JSON documents. Rationals are `"n/d"` strings, actions are rationals or
//! `{"pi": q, "const": r}`. Serialization is canonical: sorted keys, reduced rationals, sorted
//! generator names, so `serialize(parse(text)) == text` for canonical text.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::de::{self, MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};

use crate::action::{format_rational, parse_rational, Action, Q};
use crate::algebra::{Flavor, FreeElement, Generator};
use crate::barcode::{Bar, Barcode, Event};
use crate::complex::{BasisElem, FilteredComplex, Window};
use crate::dga::FilteredDGA;
use crate::error::{Error, Result};
use crate::field::Fp;
use crate::matrix::Matrix;
use crate::pwc::{OscProfile, Piecewise, PwcScript, TimedEvent, WindowTraj};
use crate::rabinowitz::{BananaCounts, LinkDGA};
use crate::transform::Augmentation;

pub const VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct R(pub Q);

impl Serialize for R {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

struct RVisitor;

impl Visitor<'_> for RVisitor {
    type Value = R;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a rational \"n/d\" or an integer")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<R, E> {
        parse_rational(v).map(R).map_err(|e| E::custom(e.to_string()))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<R, E> {
        Ok(R(Q::from_integer(v.into())))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<R, E> {
        Ok(R(Q::from_integer(v.into())))
    }
}

impl<'de> Deserialize<'de> for R {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<R, D::Error> {
        d.deserialize_any(RVisitor)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct A(pub Action);

impl Serialize for A {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0.as_rational() {
            Some(r) => s.serialize_str(&format_rational(r)),
            None => {
                let mut m = BTreeMap::new();
                m.insert("const", R(self.0.c.clone()));
                m.insert("pi", R(self.0.pi.clone()));
                m.serialize(s)
            }
        }
    }
}

struct AVisitor;

impl<'de> Visitor<'de> for AVisitor {
    type Value = A;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a rational or {\"pi\": q, \"const\": r}")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<A, E> {
        RVisitor.visit_str(v).map(|r| A(Action::rational(r.0)))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<A, E> {
        Ok(A(Action::int(v)))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<A, E> {
        RVisitor.visit_u64(v).map(|r| A(Action::rational(r.0)))
    }

    fn visit_map<M: MapAccess<'de>>(self, mut map: M) -> std::result::Result<A, M::Error> {
        let (mut pi, mut c) = (None, None);
        while let Some(k) = map.next_key::<String>()? {
            match k.as_str() {
                "pi" => pi = Some(map.next_value::<R>()?.0),
                "const" => c = Some(map.next_value::<R>()?.0),
                other => return Err(de::Error::unknown_field(other, &["pi", "const"])),
            }
        }
        let pi = pi.ok_or_else(|| de::Error::missing_field("pi"))?;
        Ok(A(Action::pi_linear(pi, c.unwrap_or_default())))
    }
}

impl<'de> Deserialize<'de> for A {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<A, D::Error> {
        d.deserialize_any(AVisitor)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratorDoc {
    name: String,
    degree: i64,
    action: A,
    #[serde(default = "pure")]
    flavor: Flavor,
}

fn pure() -> Flavor {
    Flavor::Pure
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermDoc {
    coeff: i64,
    word: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CountDoc {
    mixed01: String,
    mixed10: String,
    count: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DgaDoc {
    version: u32,
    field: u32,
    #[serde(default)]
    grading_modulus: u32,
    #[serde(default)]
    action_level: Option<A>,
    generators: Vec<GeneratorDoc>,
    #[serde(default)]
    differential: BTreeMap<String, Vec<TermDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    augmentation: Option<BTreeMap<String, i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    counts: Option<Vec<CountDoc>>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WindowDoc {
    #[serde(default)]
    lo: Option<A>,
    #[serde(default)]
    hi: Option<A>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BasisDoc {
    name: String,
    degree: i64,
    action: A,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComplexBody {
    field: u32,
    #[serde(default)]
    grading_modulus: u32,
    basis: Vec<BasisDoc>,
    /// `∂x = Σ coeff·y` as `{x: {y: coeff}}`.
    #[serde(default)]
    differential: BTreeMap<String, BTreeMap<String, i64>>,
    #[serde(default)]
    window: WindowDoc,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComplexDoc {
    version: u32,
    #[serde(flatten)]
    body: ComplexBody,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CountsDoc {
    version: u32,
    field: u32,
    entries: Vec<CountDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum EventDoc {
    HandleSlide { time: R, target: String, source: String, coeff: i64 },
    Birth { time: R, upper: BasisDoc, lower: BasisDoc, coeff: i64 },
    Death { time: R, upper: String, lower: String },
    ExitBelow { time: R, name: String },
    ExitAbove { time: R, name: String },
    EntryBelow { time: R, elem: BasisDoc, row: BTreeMap<String, i64> },
    EntryAbove { time: R, elem: BasisDoc, column: BTreeMap<String, i64> },
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WindowTrajDoc {
    #[serde(default)]
    lo: Option<Vec<(R, A)>>,
    #[serde(default)]
    hi: Option<Vec<(R, A)>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PwcDoc {
    version: u32,
    t_start: R,
    t_end: R,
    initial: ComplexBody,
    trajectories: BTreeMap<String, Vec<(R, A)>>,
    #[serde(default)]
    window: WindowTrajDoc,
    #[serde(default)]
    events: Vec<EventDoc>,
    #[serde(default)]
    pure: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OscDoc {
    version: u32,
    osc: Vec<(R, R)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    max_h: Option<Vec<(R, R)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    g_bound: Option<R>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConformalDoc {
    pub f_min: R,
    pub f_max: R,
    pub eps: R,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyDoc {
    pub critical_values: Vec<R>,
    pub eps: R,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthDoc {
    pub delta: R,
    pub pairs: Vec<(R, R)>,
}

/// Inputs for the quantitative formulas; every section is optional.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsInput {
    #[serde(default)]
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub betti: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub osc: Option<R>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lengths: Option<Vec<R>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hbar: Option<R>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<R>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy: Option<EnergyDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conformal: Option<ConformalDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub growth: Option<GrowthDoc>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Document {
    Dga { dga: FilteredDGA, augmentation: Option<Augmentation> },
    LinkDga { link: LinkDGA, augmentation: Option<Augmentation>, counts: Option<BananaCounts> },
    Complex(FilteredComplex),
    Counts { field: Fp, counts: BananaCounts },
    PwcScript(PwcScript),
    OscProfile(OscProfile),
    BoundsInput(BoundsInput),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Dga { .. } => "dga",
            Document::LinkDga { .. } => "link_dga",
            Document::Complex(_) => "complex",
            Document::Counts { .. } => "counts",
            Document::PwcScript(_) => "pwc_script",
            Document::OscProfile(_) => "osc_profile",
            Document::BoundsInput(_) => "bounds_input",
        }
    }
}

fn perr(path: impl Into<String>, reason: impl fmt::Display) -> Error {
    Error::Parse { path: path.into(), reason: reason.to_string() }
}

fn typed<T: de::DeserializeOwned>(v: Value) -> Result<T> {
    serde_path_to_error::deserialize(v).map_err(|e| {
        let path = e.path().to_string();
        perr(if path == "." { "$".to_string() } else { path }, e.into_inner())
    })
}

/// Parse a document, validating structure. Errors carry the JSON path of the offending field.
pub fn parse(text: &str) -> Result<Document> {
    let mut v: Value = serde_json::from_str(text).map_err(|e| perr(format!("line {} column {}", e.line(), e.column()), e))?;
    let obj = v.as_object_mut().ok_or_else(|| perr("$", "a document is a JSON object"))?;
    let kind = match obj.remove("kind") {
        Some(Value::String(s)) => s,
        Some(_) => return Err(perr("kind", "expected a string")),
        None => return Err(perr("kind", "missing field")),
    };
    match obj.get("version") {
        Some(Value::Number(n)) if n.as_u64() == Some(VERSION as u64) => {}
        Some(other) => return Err(perr("version", format!("unsupported version {other}"))),
        None => return Err(perr("version", "missing field")),
    }
    match kind.as_str() {
        "dga" => {
            let d: DgaDoc = typed(v)?;
            if d.counts.is_some() {
                return Err(perr("counts", "banana counts belong to a link_dga"));
            }
            let (dga, augmentation, _) = dga_from_doc(d)?;
            Ok(Document::Dga { dga, augmentation })
        }
        "link_dga" => {
            let (dga, augmentation, counts) = dga_from_doc(typed(v)?)?;
            Ok(Document::LinkDga { link: LinkDGA::new(dga)?, augmentation, counts })
        }
        "complex" => {
            let d: ComplexDoc = typed(v)?;
            Ok(Document::Complex(complex_from_body(d.body, "")?))
        }
        "counts" => {
            let d: CountsDoc = typed(v)?;
            let field = field_at(d.field, "field")?;
            Ok(Document::Counts { field, counts: counts_from_doc(field, &d.entries, "entries")? })
        }
        "pwc_script" => Ok(Document::PwcScript(pwc_from_doc(typed(v)?)?)),
        "osc_profile" => {
            let d: OscDoc = typed(v)?;
            let rat = |pts: Vec<(R, R)>, path: &str| {
                Piecewise::new(pts.into_iter().map(|(t, x)| (t.0, Action::rational(x.0))).collect()).map_err(|e| perr(path, e))
            };
            let mut p = OscProfile::new(rat(d.osc, "osc")?).map_err(|e| perr("osc", e))?;
            p.max_h = d.max_h.map(|m| rat(m, "max_h")).transpose()?;
            p.g_bound = d.g_bound.map(|g| g.0);
            p.validate().map_err(|e| perr("$", e))?;
            Ok(Document::OscProfile(p))
        }
        "bounds_input" => Ok(Document::BoundsInput(typed(v)?)),
        other => Err(perr("kind", format!("unknown kind {other:?}"))),
    }
}

fn field_at(p: u32, path: &str) -> Result<Fp> {
    Fp::new(p).map_err(|e| perr(path, e))
}

fn dga_from_doc(d: DgaDoc) -> Result<(FilteredDGA, Option<Augmentation>, Option<BananaCounts>)> {
    let f = field_at(d.field, "field")?;
    let mut names = BTreeSet::new();
    let mut gens = Vec::new();
    for (i, g) in d.generators.into_iter().enumerate() {
        if !names.insert(g.name.clone()) {
            return Err(perr(format!("generators[{i}].name"), format!("duplicate generator name {:?}", g.name)));
        }
        gens.push(Generator::new(g.name, g.degree, g.action.0).with_flavor(g.flavor));
    }
    let mut diff = BTreeMap::new();
    for (x, terms) in d.differential {
        if !names.contains(&x) {
            return Err(perr(format!("differential.{x}"), "unknown generator"));
        }
        for (i, t) in terms.iter().enumerate() {
            if let Some(l) = t.word.iter().find(|l| !names.contains(*l)) {
                return Err(perr(format!("differential.{x}[{i}].word"), format!("unknown generator {l:?}")));
            }
        }
        let e = FreeElement::from_terms(f, terms.into_iter().map(|t| (t.coeff, t.word)));
        diff.insert(x, e);
    }
    let aug = match d.augmentation {
        None => None,
        Some(m) => {
            let mut values = BTreeMap::new();
            for (x, v) in m {
                if !names.contains(&x) {
                    return Err(perr(format!("augmentation.{x}"), "unknown generator"));
                }
                values.insert(x, f.reduce(v));
            }
            Some(Augmentation { values })
        }
    };
    let counts = d.counts.map(|c| counts_from_doc(f, &c, "counts")).transpose()?;
    let dga = FilteredDGA::new(f, d.grading_modulus, gens, diff, d.action_level.map(|a| a.0))?;
    Ok((dga, aug, counts))
}

fn counts_from_doc(f: Fp, entries: &[CountDoc], path: &str) -> Result<BananaCounts> {
    let mut out = BananaCounts::zero();
    for (i, c) in entries.iter().enumerate() {
        let key = (c.mixed01.clone(), c.mixed10.clone());
        if out.entries.insert(key, f.reduce(c.count)).is_some() {
            return Err(perr(format!("{path}[{i}]"), "duplicate count entry"));
        }
    }
    out.entries.retain(|_, v| *v != 0);
    Ok(out)
}

fn basis_from(b: BasisDoc) -> BasisElem {
    BasisElem::new(b.name, b.degree, b.action.0)
}

fn complex_from_body(b: ComplexBody, prefix: &str) -> Result<FilteredComplex> {
    let f = field_at(b.field, &format!("{prefix}field"))?;
    let mut idx = BTreeMap::new();
    for (i, e) in b.basis.iter().enumerate() {
        if idx.insert(e.name.clone(), i).is_some() {
            return Err(perr(format!("{prefix}basis[{i}].name"), format!("duplicate basis name {:?}", e.name)));
        }
    }
    let n = b.basis.len();
    let mut d = Matrix::zeros(f, n, n);
    for (x, col) in &b.differential {
        let j = *idx.get(x).ok_or_else(|| perr(format!("{prefix}differential.{x}"), "unknown basis element"))?;
        for (y, c) in col {
            let i = *idx.get(y).ok_or_else(|| perr(format!("{prefix}differential.{x}.{y}"), "unknown basis element"))?;
            d.set(i, j, f.reduce(*c));
        }
    }
    let window = Window::new(b.window.lo.map(|a| a.0), b.window.hi.map(|a| a.0));
    let basis = b.basis.into_iter().map(basis_from).collect();
    FilteredComplex::new(f, b.grading_modulus, basis, d, window).map_err(|e| perr(format!("{prefix}$"), e))
}

fn pw(points: Vec<(R, A)>, path: &str) -> Result<Piecewise> {
    Piecewise::new(points.into_iter().map(|(t, a)| (t.0, a.0)).collect()).map_err(|e| perr(path, e))
}

fn pwc_from_doc(d: PwcDoc) -> Result<PwcScript> {
    let initial = complex_from_body(d.initial, "initial.")?;
    let f = initial.field;
    let mut trajectories = BTreeMap::new();
    for (x, pts) in d.trajectories {
        let p = pw(pts, &format!("trajectories.{x}"))?;
        trajectories.insert(x, p);
    }
    let window =
        WindowTraj { lo: d.window.lo.map(|p| pw(p, "window.lo")).transpose()?, hi: d.window.hi.map(|p| pw(p, "window.hi")).transpose()? };
    let unit = |c: i64| f.reduce(c);
    let list = |m: BTreeMap<String, i64>| m.into_iter().map(|(k, v)| (k, unit(v))).collect();
    let events = d
        .events
        .into_iter()
        .map(|e| match e {
            EventDoc::HandleSlide { time, target, source, coeff } => {
                TimedEvent { time: time.0, event: Event::HandleSlide { target, source, coeff: unit(coeff) } }
            }
            EventDoc::Birth { time, upper, lower, coeff } => {
                TimedEvent { time: time.0, event: Event::Birth { upper: basis_from(upper), lower: basis_from(lower), coeff: unit(coeff) } }
            }
            EventDoc::Death { time, upper, lower } => TimedEvent { time: time.0, event: Event::Death { upper, lower } },
            EventDoc::ExitBelow { time, name } => TimedEvent { time: time.0, event: Event::ExitBelow { name } },
            EventDoc::ExitAbove { time, name } => TimedEvent { time: time.0, event: Event::ExitAbove { name } },
            EventDoc::EntryBelow { time, elem, row } => {
                TimedEvent { time: time.0, event: Event::EntryBelow { elem: basis_from(elem), row: list(row) } }
            }
            EventDoc::EntryAbove { time, elem, column } => {
                TimedEvent { time: time.0, event: Event::EntryAbove { elem: basis_from(elem), column: list(column) } }
            }
        })
        .collect();
    Ok(PwcScript { t_start: d.t_start.0, t_end: d.t_end.0, initial, trajectories, window, events, pure: d.pure })
}

fn gen_doc(g: &Generator) -> GeneratorDoc {
    GeneratorDoc { name: g.name.clone(), degree: g.degree, action: A(g.action.clone()), flavor: g.flavor }
}

fn dga_doc(dga: &FilteredDGA, aug: Option<&Augmentation>, counts: Option<&BananaCounts>) -> DgaDoc {
    let mut generators: Vec<GeneratorDoc> = dga.generators.iter().map(gen_doc).collect();
    generators.sort_by(|a, b| a.name.cmp(&b.name));
    let differential = dga
        .differential
        .iter()
        .filter(|(_, e)| !e.is_zero())
        .map(|(x, e)| (x.clone(), e.terms().map(|(w, c)| TermDoc { coeff: c as i64, word: w.clone() }).collect()))
        .collect();
    DgaDoc {
        version: VERSION,
        field: dga.field.p(),
        grading_modulus: dga.grading_modulus,
        action_level: dga.action_level.clone().map(A),
        generators,
        differential,
        augmentation: aug.map(|a| a.values.iter().filter(|(_, v)| **v != 0).map(|(k, v)| (k.clone(), *v as i64)).collect()),
        counts: counts.map(count_docs),
    }
}

fn count_docs(c: &BananaCounts) -> Vec<CountDoc> {
    c.entries
        .iter()
        .filter(|(_, v)| **v != 0)
        .map(|((x, y), v)| CountDoc { mixed01: x.clone(), mixed10: y.clone(), count: *v as i64 })
        .collect()
}

fn basis_doc(b: &BasisElem) -> BasisDoc {
    BasisDoc { name: b.name.clone(), degree: b.degree, action: A(b.action.clone()) }
}

fn complex_body(c: &FilteredComplex) -> ComplexBody {
    let mut basis: Vec<BasisDoc> = c.basis.iter().map(basis_doc).collect();
    basis.sort_by(|a, b| a.name.cmp(&b.name));
    let mut differential: BTreeMap<String, BTreeMap<String, i64>> = BTreeMap::new();
    for (i, j, v) in c.d.entries() {
        differential.entry(c.basis[j].name.clone()).or_default().insert(c.basis[i].name.clone(), v as i64);
    }
    ComplexBody {
        field: c.field.p(),
        grading_modulus: c.grading_modulus,
        basis,
        differential,
        window: WindowDoc { lo: c.window.lo.clone().map(A), hi: c.window.hi.clone().map(A) },
    }
}

fn pw_doc(p: &Piecewise) -> Vec<(R, A)> {
    p.points().iter().map(|(t, a)| (R(t.clone()), A(a.clone()))).collect()
}

fn rat_doc(p: &Piecewise) -> Vec<(R, R)> {
    p.points().iter().map(|(t, a)| (R(t.clone()), R(a.c.clone()))).collect()
}

fn event_doc(e: &TimedEvent) -> EventDoc {
    let time = R(e.time.clone());
    let map = |v: &[(String, u32)]| v.iter().map(|(k, c)| (k.clone(), *c as i64)).collect();
    match &e.event {
        Event::HandleSlide { target, source, coeff } => {
            EventDoc::HandleSlide { time, target: target.clone(), source: source.clone(), coeff: *coeff as i64 }
        }
        Event::Birth { upper, lower, coeff } => {
            EventDoc::Birth { time, upper: basis_doc(upper), lower: basis_doc(lower), coeff: *coeff as i64 }
        }
        Event::Death { upper, lower } => EventDoc::Death { time, upper: upper.clone(), lower: lower.clone() },
        Event::ExitBelow { name } => EventDoc::ExitBelow { time, name: name.clone() },
        Event::ExitAbove { name } => EventDoc::ExitAbove { time, name: name.clone() },
        Event::EntryBelow { elem, row } => EventDoc::EntryBelow { time, elem: basis_doc(elem), row: map(row) },
        Event::EntryAbove { elem, column } => EventDoc::EntryAbove { time, elem: basis_doc(elem), column: map(column) },
    }
}

fn with_kind<T: Serialize>(kind: &str, body: &T) -> Value {
    let mut v = serde_json::to_value(body).expect("documents serialize");
    v.as_object_mut().expect("documents are objects").insert("kind".into(), Value::String(kind.into()));
    v
}

/// The canonical JSON value of a document.
pub fn to_value(d: &Document) -> Value {
    match d {
        Document::Dga { dga, augmentation } => with_kind("dga", &dga_doc(dga, augmentation.as_ref(), None)),
        Document::LinkDga { link, augmentation, counts } => {
            with_kind("link_dga", &dga_doc(link.dga(), augmentation.as_ref(), counts.as_ref()))
        }
        Document::Complex(c) => with_kind("complex", &ComplexDoc { version: VERSION, body: complex_body(c) }),
        Document::Counts { field, counts } => {
            with_kind("counts", &CountsDoc { version: VERSION, field: field.p(), entries: count_docs(counts) })
        }
        Document::PwcScript(s) => with_kind(
            "pwc_script",
            &PwcDoc {
                version: VERSION,
                t_start: R(s.t_start.clone()),
                t_end: R(s.t_end.clone()),
                initial: complex_body(&s.initial),
                trajectories: s.trajectories.iter().map(|(k, p)| (k.clone(), pw_doc(p))).collect(),
                window: WindowTrajDoc { lo: s.window.lo.as_ref().map(pw_doc), hi: s.window.hi.as_ref().map(pw_doc) },
                events: s.events.iter().map(event_doc).collect(),
                pure: s.pure.clone(),
            },
        ),
        Document::OscProfile(p) => with_kind(
            "osc_profile",
            &OscDoc { version: VERSION, osc: rat_doc(&p.osc), max_h: p.max_h.as_ref().map(rat_doc), g_bound: p.g_bound.clone().map(R) },
        ),
        Document::BoundsInput(b) => with_kind("bounds_input", &BoundsInput { version: VERSION, ..b.clone() }),
    }
}

/// Canonical text: pretty-printed with sorted keys and a trailing newline.
pub fn serialize(d: &Document) -> String {
    let mut s = serde_json::to_string_pretty(&to_value(d)).expect("values print");
    s.push('\n');
    s
}

pub fn complex_value(c: &FilteredComplex) -> Value {
    to_value(&Document::Complex(c.clone()))
}

pub fn action_value(a: &Action) -> Value {
    serde_json::to_value(A(a.clone())).expect("actions serialize")
}

pub fn rational_value(r: &Q) -> Value {
    Value::String(format_rational(r))
}

pub fn bar_value(b: &Bar) -> Value {
    json!({
        "degree": b.degree,
        "start": action_value(&b.start),
        "end": b.end.as_ref().map(action_value),
    })
}

pub fn barcode_value(bc: &Barcode) -> Value {
    Value::Array(bc.bars().iter().map(bar_value).collect())
}
