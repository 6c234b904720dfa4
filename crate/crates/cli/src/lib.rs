//! The `rfc` command line: parse documents, run the algebra, print text, JSON or SVG.

pub mod svg;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use num::{One, Zero};
use serde_json::{json, Value};

use rfc_core::action::{format_rational, parse_rational_lenient, Action, Q};
use rfc_core::barcode::{apply_event, compute_barcode, Barcode};
use rfc_core::bounds::{self, AdversaryInstance, ChordSpectrum, ConformalProfile};
use rfc_core::complex::{FilteredComplex, Window};
use rfc_core::dga::FilteredDGA;
use rfc_core::gen;
use rfc_core::grading::{self, ChordIndexInput, OrbitIndexInput};
use rfc_core::io::{self, action_value, barcode_value, complex_value, rational_value, Document};
use rfc_core::pwc::{check_speed_law, check_window_admissibility, evolve, validate_script};
use rfc_core::rabinowitz::{build_rfc, rfc_acyclicity, BananaCounts};
use rfc_core::transform::{destabilize_pair, find_augmentations, linearize, Augmentation, Sti};
use rfc_core::Fp;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Svg,
}

#[derive(Parser, Debug)]
#[command(name = "rfc", version, about = "Action-filtered complexes, Rabinowitz Floer complexes and their barcodes")]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
    /// Reinterpret input documents over 𝔽_p.
    #[arg(long, global = true)]
    pub field: Option<u32>,
    /// Action window `a,b` (either side may be `inf`); actions are rationals or `<q>pi`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub window: Option<String>,
    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Barcode,
    Events,
    Cone,
    Sti,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Check a document, or run a randomized property suite.
    Validate {
        file: Option<PathBuf>,
        #[arg(long, value_enum)]
        suite: Option<Suite>,
        #[arg(long, default_value_t = 50)]
        cases: usize,
    },
    /// List augmentations of a DGA.
    Augment {
        file: PathBuf,
        #[arg(long, default_value_t = 1 << 16)]
        limit: u64,
    },
    /// Linearize a DGA at an augmentation (`--aug a=1,b=2`, else the document's, else zero).
    Linearize {
        file: PathBuf,
        #[arg(long)]
        aug: Option<String>,
    },
    /// Build the Rabinowitz Floer complex of a link DGA.
    Cone {
        file: PathBuf,
        #[arg(long, default_value_t = 1)]
        n: i64,
        /// A `counts` document; overrides counts embedded in the link DGA.
        #[arg(long)]
        counts: Option<PathBuf>,
        #[arg(long)]
        aug: Option<String>,
    },
    /// Barcode of a filtered complex.
    Barcode { file: PathBuf },
    /// Run a PWC script and report barcodes at event and sample times.
    Evolve {
        file: PathBuf,
        #[arg(long)]
        samples: Option<String>,
        /// An `osc_profile` document for the speed law and window admissibility.
        #[arg(long)]
        osc: Option<PathBuf>,
        /// Initial action threshold for window admissibility.
        #[arg(long)]
        l: Option<String>,
    },
    /// Degree formulas.
    Grade {
        #[command(subcommand)]
        what: GradeCmd,
    },
    /// The Legendrian ℝPⁿ push-off pair: chords, RFC and barcode in a window.
    Rpn {
        #[arg(long)]
        n: i64,
        /// ε as a multiple of π (default 1/(200(n+1))).
        #[arg(long)]
        eps: Option<String>,
    },
    /// Quantitative formulas.
    Bounds {
        #[command(subcommand)]
        what: BoundsCmd,
    },
    /// Cancel a pair ∂upper = k·lower + (shorter terms) by tame moves.
    Destab {
        file: PathBuf,
        #[arg(long)]
        upper: String,
        #[arg(long)]
        lower: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum GradeCmd {
    /// Degree of a perturbed Reeb orbit from its plane data.
    Plane {
        #[arg(long)]
        n: i64,
        #[arg(long, allow_hyphen_values = true)]
        mu_cz: i64,
        #[arg(long, allow_hyphen_values = true)]
        c1rel: i64,
        #[arg(long, default_value_t = 0)]
        bott_dim: i64,
        #[arg(long, default_value_t = 0)]
        morse_index: i64,
    },
    /// Degree of a perturbed Reeb chord from its half-plane data.
    Halfplane {
        #[arg(long, allow_hyphen_values = true)]
        cz: i64,
        #[arg(long, allow_hyphen_values = true)]
        maslov: i64,
        #[arg(long, default_value_t = 0)]
        bott_dim: i64,
        #[arg(long, default_value_t = 0)]
        morse_index: i64,
    },
    /// Orbit, pure chord and mixed chord degrees for ℝPⁿ.
    Table {
        #[arg(long)]
        n: i64,
        #[arg(long, default_value_t = 3)]
        max: i64,
    },
}

#[derive(Subcommand, Debug)]
pub enum BoundsCmd {
    /// Lower bound Σbᵢ − 2(k − 1) on chords, or the failed admissibility gate.
    MainTheorem {
        #[arg(long)]
        betti: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        osc: String,
        #[arg(long)]
        lengths: String,
        #[arg(long)]
        l: Option<String>,
        #[arg(long)]
        hbar: Option<String>,
    },
    /// Energy constant from critical values m₁ < … < m_q with 2m₁ > m_q > 0.
    Energy {
        #[arg(long)]
        values: String,
        #[arg(long)]
        eps: String,
    },
    /// Trace-cobordism lengths with certified decimal enclosures.
    Trace {
        #[arg(long, allow_hyphen_values = true)]
        f_min: String,
        #[arg(long, allow_hyphen_values = true)]
        f_max: String,
        #[arg(long)]
        eps: String,
        #[arg(long, default_value_t = 12)]
        digits: u32,
    },
    /// Check ℓ_out < e^(2δ)·ℓ_in for each pair.
    Growth {
        #[arg(long)]
        delta: String,
        /// `in:out` pairs separated by commas.
        #[arg(long)]
        pairs: String,
    },
    /// Exhaustive adversarial game against the chord-count bound.
    Adversary {
        #[arg(long)]
        betti: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        osc: String,
        #[arg(long)]
        lengths: String,
        #[arg(long, default_value_t = 4)]
        steps: u32,
    },
    /// Evaluate every section of a `bounds_input` document.
    File { file: PathBuf },
}

/// A failure classified by exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Domain(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Domain(e)
    }
}

impl From<rfc_core::Error> for Failure {
    fn from(e: rfc_core::Error) -> Self {
        Failure::Domain(e.into())
    }
}

type Out = std::result::Result<Output, Failure>;

/// What a command produced: text, a JSON value, SVG, and whether a check failed.
pub struct Output {
    text: String,
    json: Value,
    svg: Option<String>,
    failed: bool,
}

impl Output {
    fn new(text: String, json: Value) -> Self {
        Output { text, json, svg: None, failed: false }
    }

    fn with_svg(mut self, svg: String) -> Self {
        self.svg = Some(svg);
        self
    }

    fn failed(mut self, f: bool) -> Self {
        self.failed = f;
        self
    }
}

/// Run the command line; returns the exit code (0 ok, 1 domain error or failed check, 2 usage).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let target: &mut dyn Write = if code == 0 { out } else { err };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(o) => {
            let body = match cli.format {
                Format::Text => o.text,
                Format::Json => serde_json::to_string_pretty(&o.json).expect("values print") + "\n",
                Format::Svg => match o.svg {
                    Some(s) => s,
                    None => {
                        let _ = writeln!(err, "error: this command has no SVG output");
                        return 2;
                    }
                },
            };
            let _ = out.write_all(body.as_bytes());
            i32::from(o.failed)
        }
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "usage error: {m}");
            2
        }
        Err(Failure::Domain(e)) => {
            let _ = writeln!(err, "error: {e:#}");
            1
        }
    }
}

fn usage(m: impl Into<String>) -> Failure {
    Failure::Usage(m.into())
}

/// A rational, or `<q>pi` for a multiple of π.
pub fn parse_action_arg(s: &str) -> anyhow::Result<Action> {
    let t = s.trim();
    for suffix in ["pi", "π"] {
        if let Some(head) = t.strip_suffix(suffix) {
            let head = head.trim().trim_end_matches('*').trim();
            let k = match head {
                "" | "+" => Q::one(),
                "-" => -Q::one(),
                h => parse_rational_lenient(h)?,
            };
            return Ok(Action::pi_linear(k, Q::zero()));
        }
    }
    Ok(Action::rational(parse_rational_lenient(t)?))
}

fn parse_window(s: &str) -> std::result::Result<Window, Failure> {
    let (a, b) = s.split_once(',').ok_or_else(|| usage(format!("window {s:?} is not of the form a,b")))?;
    let side = |x: &str, inf: &[&str]| -> std::result::Result<Option<Action>, Failure> {
        let x = x.trim();
        if x.is_empty() || inf.contains(&x) {
            Ok(None)
        } else {
            parse_action_arg(x).map(Some).map_err(|e| usage(format!("window bound {x:?}: {e}")))
        }
    };
    let w = Window::new(side(a, &["-inf", "-∞"])?, side(b, &["inf", "+inf", "∞"])?);
    if let (Some(lo), Some(hi)) = (&w.lo, &w.hi) {
        if lo > hi {
            return Err(usage(format!("window {s:?} has a > b")));
        }
    }
    Ok(w)
}

fn rational_arg(name: &str, s: &str) -> std::result::Result<Q, Failure> {
    parse_rational_lenient(s).map_err(|e| usage(format!("--{name}: {e}")))
}

fn list<T>(name: &str, s: &str, f: impl Fn(&str) -> Option<T>) -> std::result::Result<Vec<T>, Failure> {
    s.split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|x| f(x.trim()).ok_or_else(|| usage(format!("--{name}: cannot read {x:?}"))))
        .collect()
}

fn rationals(name: &str, s: &str) -> std::result::Result<Vec<Q>, Failure> {
    list(name, s, |x| parse_rational_lenient(x).ok())
}

fn integers(name: &str, s: &str) -> std::result::Result<Vec<i64>, Failure> {
    list(name, s, |x| x.parse().ok())
}

fn load(path: &Path, field: Option<u32>) -> anyhow::Result<Document> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let text = match field {
        None => text,
        Some(p) => {
            let mut v: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            if let Some(o) = v.as_object_mut() {
                if o.contains_key("field") {
                    o.insert("field".into(), json!(p));
                }
                if let Some(init) = o.get_mut("initial").and_then(Value::as_object_mut) {
                    init.insert("field".into(), json!(p));
                }
            }
            v.to_string()
        }
    };
    io::parse(&text).with_context(|| format!("in {}", path.display()))
}

fn parse_aug(dga: &FilteredDGA, s: &str) -> std::result::Result<Augmentation, Failure> {
    let mut values = BTreeMap::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        let (k, v) = part.split_once('=').ok_or_else(|| usage(format!("--aug entry {part:?} is not name=value")))?;
        let v: i64 = v.trim().parse().map_err(|_| usage(format!("--aug value {v:?}")))?;
        values.insert(k.trim().to_string(), dga.field.reduce(v));
    }
    Ok(Augmentation { values })
}

fn aug_text(a: &Augmentation) -> String {
    if a.values.values().all(|v| *v == 0) {
        return "ε = 0".into();
    }
    let parts: Vec<String> = a.values.iter().filter(|(_, v)| **v != 0).map(|(k, v)| format!("{k}={v}")).collect();
    format!("ε: {}", parts.join(", "))
}

fn aug_value(a: &Augmentation) -> Value {
    Value::Object(a.values.iter().filter(|(_, v)| **v != 0).map(|(k, v)| (k.clone(), json!(v))).collect())
}

pub fn complex_text(c: &FilteredComplex) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "complex over F_{}, {} generators, window {}", c.field.p(), c.dim(), c.window);
    for &i in &c.filtration_order() {
        let b = &c.basis[i];
        let terms: Vec<String> = (0..c.dim())
            .filter(|&r| c.d.get(r, i) != 0)
            .map(|r| if c.d.get(r, i) == 1 { c.basis[r].name.clone() } else { format!("{}·{}", c.d.get(r, i), c.basis[r].name) })
            .collect();
        let d = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
        let _ = writeln!(s, "  {:<10} deg {:>3}  action {:<18} ∂ = {d}", b.name, b.degree, b.action.to_string());
    }
    s
}

pub fn barcode_text(bc: &Barcode) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "barcode: {} bars", bc.len());
    for b in bc.bars() {
        let _ = writeln!(s, "  {b}");
    }
    s
}

fn homology_value(h: &BTreeMap<i64, usize>) -> Value {
    Value::Object(h.iter().map(|(k, v)| (k.to_string(), json!(v))).collect())
}

fn dispatch(cli: &Cli) -> Out {
    let window = cli.window.as_deref().map(parse_window).transpose()?;
    match &cli.cmd {
        Cmd::Validate { file, suite, cases } => match (file, suite) {
            (Some(f), None) => validate_file(&load(f, cli.field)?, window.as_ref()),
            (None, Some(s)) => run_suite(*s, *cases, cli.seed, cli.field),
            _ => Err(usage("validate takes either a FILE or --suite")),
        },
        Cmd::Augment { file, limit } => {
            let (dga, _) = dga_of(load(file, cli.field)?)?;
            let augs = find_augmentations(&dga, *limit)?;
            let mut text = format!("{} augmentation(s)\n", augs.len());
            for a in &augs {
                let _ = writeln!(text, "  {}", aug_text(a));
            }
            Ok(Output::new(text, json!({ "augmentations": augs.iter().map(aug_value).collect::<Vec<_>>() })))
        }
        Cmd::Linearize { file, aug } => {
            let (dga, doc_aug) = dga_of(load(file, cli.field)?)?;
            let eps = match aug {
                Some(s) => parse_aug(&dga, s)?,
                None => doc_aug.unwrap_or_else(Augmentation::zero),
            };
            let lin = linearize(&dga, &eps)?;
            let lin = match &window {
                Some(w) => lin.window_subquotient(w.lo.as_ref(), w.hi.as_ref()),
                None => lin,
            };
            let bc = compute_barcode(&lin);
            let h = lin.homology_dims();
            let text = format!("{}\n{}{}homology {:?}\n", aug_text(&eps), complex_text(&lin), barcode_text(&bc), h);
            let json = json!({ "augmentation": aug_value(&eps), "complex": complex_value(&lin), "barcode": barcode_value(&bc), "homology": homology_value(&h) });
            Ok(Output::new(text, json).with_svg(svg::barcode_svg(&bc, "linearized complex")))
        }
        Cmd::Cone { file, n, counts, aug } => {
            let Document::LinkDga { link, augmentation, counts: doc_counts } = load(file, cli.field)? else {
                return Err(anyhow!("cone needs a link_dga document").into());
            };
            let eps = match aug {
                Some(s) => parse_aug(link.dga(), s)?,
                None => augmentation.unwrap_or_else(Augmentation::zero),
            };
            let counts = match counts {
                Some(p) => match load(p, cli.field)? {
                    Document::Counts { counts, .. } => counts,
                    other => return Err(anyhow!("--counts expects a counts document, got {}", other.kind()).into()),
                },
                None => doc_counts.unwrap_or_else(BananaCounts::zero),
            };
            let w = window.unwrap_or_else(Window::full);
            let rfc = build_rfc(&link, &eps, &counts, &w, *n)?;
            let bc = compute_barcode(&rfc.cone);
            let acyc = rfc_acyclicity(&rfc);
            let text = format!("{}{}acyclic: {}\nhomology {:?}\n", complex_text(&rfc.cone), barcode_text(&bc), acyc.acyclic, acyc.homology);
            let json = json!({
                "rfc": complex_value(&rfc.cone),
                "barcode": barcode_value(&bc),
                "acyclic": acyc.acyclic,
                "homology": homology_value(&acyc.homology),
                "ungraded": rfc.is_ungraded(),
            });
            Ok(Output::new(text, json).with_svg(svg::barcode_svg(&bc, "Rabinowitz Floer complex")))
        }
        Cmd::Barcode { file } => {
            let Document::Complex(c) = load(file, cli.field)? else {
                return Err(anyhow!("barcode needs a complex document").into());
            };
            let c = match &window {
                Some(w) => c.window_subquotient(w.lo.as_ref(), w.hi.as_ref()),
                None => c,
            };
            let bc = compute_barcode(&c);
            let json = json!({ "barcode": barcode_value(&bc), "homology": homology_value(&c.homology_dims()) });
            Ok(Output::new(barcode_text(&bc), json).with_svg(svg::barcode_svg(&bc, &format!("{} generators", c.dim()))))
        }
        Cmd::Evolve { file, samples, osc, l } => evolve_cmd(cli, file, samples.as_deref(), osc.as_deref(), l.as_deref()),
        Cmd::Grade { what } => grade_cmd(what),
        Cmd::Rpn { n, eps } => {
            let w = window.ok_or_else(|| usage("rpn needs --window a,b"))?;
            if !w.is_finite() {
                return Err(usage("rpn needs a finite window"));
            }
            let eps = match eps {
                Some(e) => Action::pi_linear(rational_arg("eps", e)?, Q::zero()),
                None => grading::default_epsilon(*n),
            };
            rpn_cmd(*n, &w, &eps)
        }
        Cmd::Bounds { what } => bounds_cmd(what, cli.field),
        Cmd::Destab { file, upper, lower } => {
            let (dga, _) = dga_of(load(file, cli.field)?)?;
            let (sti, out) = destabilize_pair(&dga, upper, lower)?;
            let text = format!("{} tame move(s)\n{}", sti.moves.len(), dga_text(&out));
            let json = json!({ "moves": sti.moves.iter().map(|m| m.kind()).collect::<Vec<_>>(), "dga": io::to_value(&Document::Dga { dga: out, augmentation: None }) });
            Ok(Output::new(text, json))
        }
    }
}

fn dga_of(d: Document) -> anyhow::Result<(FilteredDGA, Option<Augmentation>)> {
    match d {
        Document::Dga { dga, augmentation } => Ok((dga, augmentation)),
        Document::LinkDga { link, augmentation, .. } => Ok((link.into_dga(), augmentation)),
        other => bail!("expected a dga document, got {}", other.kind()),
    }
}

pub fn dga_text(dga: &FilteredDGA) -> String {
    let mut s = format!("DGA over F_{}, {} generators\n", dga.field.p(), dga.generators.len());
    for g in &dga.generators {
        let _ = writeln!(s, "  {:<10} deg {:>3}  action {:<18} ∂ = {}", g.name, g.degree, g.action.to_string(), dga.d(&g.name));
    }
    s
}

fn validate_file(d: &Document, window: Option<&Window>) -> Out {
    let mut problems: Vec<String> = Vec::new();
    match d {
        Document::Dga { dga, augmentation } => {
            problems.extend(dga.validate().violations.iter().map(|v| v.to_string()));
            if let Some(a) = augmentation {
                if let Err(e) = a.validate(dga) {
                    problems.push(format!("augmentation: {e}"));
                }
            }
        }
        Document::LinkDga { link, augmentation, counts } => {
            let eps = augmentation.clone().unwrap_or_else(Augmentation::zero);
            let counts = counts.clone().unwrap_or_else(BananaCounts::zero);
            let w = window.cloned().unwrap_or_else(Window::full);
            if let Err(e) = build_rfc(link, &eps, &counts, &w, 1) {
                problems.push(e.to_string());
            }
        }
        Document::PwcScript(s) => {
            if let Err(e) = validate_script(s).and_then(|_| evolve(s, &[])) {
                problems.push(e.to_string());
            }
        }
        Document::Complex(_) | Document::Counts { .. } | Document::OscProfile(_) | Document::BoundsInput(_) => {}
    }
    let ok = problems.is_empty();
    let mut text = if ok { format!("ok: {}\n", d.kind()) } else { format!("invalid {}\n", d.kind()) };
    for p in &problems {
        let _ = writeln!(text, "  {p}");
    }
    Ok(Output::new(text, json!({ "kind": d.kind(), "valid": ok, "problems": problems })).failed(!ok))
}

fn run_suite(suite: Suite, cases: usize, seed: u64, field: Option<u32>) -> Out {
    let f = Fp::new(field.unwrap_or(2))?;
    let mut rng = gen::rng(seed);
    let mut failures = Vec::new();
    let levels: Vec<Action> = (0..12).map(Action::int).collect();
    for case in 0..cases {
        let result: anyhow::Result<()> = (|| {
            match suite {
                Suite::Barcode => {
                    let c = gen::random_complex(&mut rng, f, 8, &levels, false, 3);
                    let bc = compute_barcode(&c);
                    let h = c.homology_dims();
                    let inf = bc.infinite_counts();
                    let h: BTreeMap<i64, usize> = h.into_iter().filter(|(_, v)| *v > 0).collect();
                    if inf != h {
                        bail!("infinite bars {inf:?} but homology {h:?}");
                    }
                    if bc.finite_bars().count() != c.d.rank() {
                        bail!("finite bar count differs from rank ∂");
                    }
                }
                Suite::Events => {
                    let mut c = gen::random_complex(&mut rng, f, 6, &levels, true, 3);
                    let mut bc = compute_barcode(&c);
                    for _ in 0..8 {
                        if let Some(ev) = gen::random_event(&mut rng, &c) {
                            let (b2, c2) = apply_event(&bc, &c, &ev)?;
                            if !b2.same_bars(&compute_barcode(&c2)) {
                                bail!("{} changed the barcode incorrectly", ev.kind());
                            }
                            (bc, c) = (b2, c2);
                        }
                    }
                }
                Suite::Cone => {
                    let (link, counts, _) = gen::random_link_instance(&mut rng, f, 5, 5, 2);
                    let rfc = build_rfc(&link, &Augmentation::zero(), &counts, &Window::full(), 2)?;
                    if !rfc.cone.d.mul(&rfc.cone.d).is_zero() {
                        bail!("cone differential does not square to zero");
                    }
                }
                Suite::Sti => {
                    let dga = gen::random_dga(&mut rng, f, 6);
                    let Some(eps) = find_augmentations(&dga, 4096)?.into_iter().next() else { return Ok(()) };
                    let before = linearize(&dga, &eps)?.homology_dims();
                    let mut fresh = 0;
                    let mut moves = Vec::new();
                    let mut cur = dga.clone();
                    for _ in 0..6 {
                        if let Some(mv) = gen::random_tame_move(&mut rng, &cur, &mut fresh) {
                            if let Ok(next) = rfc_core::transform::apply_tame(&cur, &mv) {
                                cur = next;
                                moves.push(mv);
                            }
                        }
                    }
                    let (d2, e2) = Sti { moves }.transport(&dga, &eps)?;
                    let after = linearize(&d2, &e2)?.homology_dims();
                    let strip = |h: BTreeMap<i64, usize>| -> BTreeMap<i64, usize> { h.into_iter().filter(|(_, v)| *v > 0).collect() };
                    if strip(before.clone()) != strip(after.clone()) {
                        bail!("linearized homology changed from {before:?} to {after:?}");
                    }
                }
            }
            Ok(())
        })();
        if let Err(e) = result {
            failures.push(format!("case {case}: {e:#}"));
        }
    }
    let name = format!("{suite:?}").to_lowercase();
    let ok = failures.is_empty();
    let mut text = format!("suite {name}: {cases} cases over F_{}, seed {seed}: {}\n", f.p(), if ok { "ok" } else { "FAILED" });
    for m in &failures {
        let _ = writeln!(text, "  {m}");
    }
    Ok(Output::new(text, json!({ "suite": name, "cases": cases, "seed": seed, "field": f.p(), "failures": failures })).failed(!ok))
}

fn evolve_cmd(cli: &Cli, file: &Path, samples: Option<&str>, osc: Option<&Path>, l: Option<&str>) -> Out {
    let Document::PwcScript(s) = load(file, cli.field)? else {
        return Err(anyhow!("evolve needs a pwc_script document").into());
    };
    let samples = samples.map(|x| rationals("samples", x)).transpose()?.unwrap_or_default();
    let frames = evolve(&s, &samples)?;
    let mut text = String::new();
    let mut jf = Vec::new();
    for fr in &frames {
        let _ = writeln!(text, "t = {} [{}] (read at {})", format_rational(&fr.t), fr.kind, format_rational(&fr.probe));
        for b in fr.barcode.bars() {
            let _ = writeln!(text, "  {b}");
        }
        jf.push(json!({ "t": rational_value(&fr.t), "probe": rational_value(&fr.probe), "kind": fr.kind.to_string(), "barcode": barcode_value(&fr.barcode) }));
    }
    let mut json = json!({ "frames": jf });
    let mut failed = false;
    if let Some(p) = osc {
        let Document::OscProfile(profile) = load(p, None)? else {
            return Err(anyhow!("--osc expects an osc_profile document").into());
        };
        let speed = check_speed_law(&s, &profile)?;
        let _ = writeln!(text, "speed law: {}", if speed.passed() { "ok" } else { "violated" });
        for v in &speed.violations {
            let _ = writeln!(text, "  {v}");
        }
        failed |= !speed.passed();
        json["speed_law"] = json!({ "passed": speed.passed(), "violations": speed.violations });
        if let Some(l) = l {
            let l = rational_arg("l", l)?;
            let adm = check_window_admissibility(&s, &profile, &l)?;
            match &adm.first_violation {
                None => text.push_str("window admissibility: ok\n"),
                Some(v) => {
                    let _ = writeln!(text, "window admissibility: {} violated at {}", v.condition, v.at);
                }
            }
            failed |= !adm.admissible();
            json["admissibility"] = json!({
                "admissible": adm.admissible(),
                "violation": adm.first_violation.as_ref().map(|v| json!({ "condition": v.condition, "at": v.at.to_string() })),
            });
        }
    }
    let last = &frames.last().expect("evolve yields at least two frames").barcode;
    Ok(Output::new(text, json).with_svg(svg::barcode_svg(last, "final barcode")).failed(failed))
}

fn grade_cmd(what: &GradeCmd) -> Out {
    match *what {
        GradeCmd::Plane { n, mu_cz, c1rel, bott_dim, morse_index } => {
            let d = grading::plane_index(&OrbitIndexInput { n, mu_cz, c1rel, bott_dim, morse_index })?;
            Ok(Output::new(format!("{d}\n"), json!({ "degree": d })))
        }
        GradeCmd::Halfplane { cz, maslov, bott_dim, morse_index } => {
            let d = grading::halfplane_index(&ChordIndexInput { cz, maslov, bott_dim, morse_index })?;
            Ok(Output::new(format!("{d}\n"), json!({ "degree": d })))
        }
        GradeCmd::Table { n, max } => {
            let mut text = format!("RP^{n}\norbits (cover m, Morse index i): degree\n");
            let mut orbits = Vec::new();
            for m in 1..=max {
                let row: Vec<i64> = (0..=2 * n).map(|i| grading::rpn_orbit_degree(n, m, i)).collect::<rfc_core::Result<_>>()?;
                let _ = writeln!(text, "  m={m}: {row:?}");
                orbits.push(json!({ "m": m, "degrees": row }));
            }
            text.push_str("pure chords (length kπ/2, Morse index i): degree\n");
            let mut pure = Vec::new();
            for k in 1..=max {
                let row: Vec<i64> = (0..=n).map(|i| grading::rpn_pure_chord_degree(n, k, i)).collect::<rfc_core::Result<_>>()?;
                let _ = writeln!(text, "  k={k}: {row:?}");
                pure.push(json!({ "k": k, "degrees": row }));
            }
            text.push_str("mixed chords c^k_j: degree\n");
            let eps = grading::default_epsilon(n);
            let mut mixed = Vec::new();
            for k in -max..max {
                let row: Vec<i64> =
                    (1..=n + 1).map(|j| grading::rpn_mixed_chord(n, j, k, &eps).map(|c| c.degree)).collect::<rfc_core::Result<_>>()?;
                let _ = writeln!(text, "  k={k}: {row:?}");
                mixed.push(json!({ "k": k, "degrees": row }));
            }
            Ok(Output::new(text, json!({ "n": n, "orbits": orbits, "pure_chords": pure, "mixed_chords": mixed })))
        }
    }
}

fn rpn_cmd(n: i64, w: &Window, eps: &Action) -> Out {
    let chords = grading::rpn_chords_in_window(n, w, eps)?;
    let rfc = grading::rpn_generate_rfc(n, w, eps)?;
    let bc = compute_barcode(&rfc.cone);
    let mut text = format!("RP^{n}, ε = {eps}, window {w}: {} chords\n", chords.len());
    for c in &chords {
        let _ = writeln!(text, "  {:<8} k={:>3} j={} deg {:>3}  action {}", c.name(), c.k, c.j, c.degree, c.action);
    }
    text.push_str(&barcode_text(&bc));
    let cj: Vec<Value> = chords
        .iter()
        .map(|c| json!({ "name": c.name(), "k": c.k, "j": c.j, "degree": c.degree, "action": action_value(&c.action) }))
        .collect();
    let json = json!({ "n": n, "eps": action_value(eps), "chords": cj, "rfc": complex_value(&rfc.cone), "barcode": barcode_value(&bc) });
    Ok(Output::new(text, json).with_svg(svg::barcode_svg(&bc, &format!("RP^{n} push-off pair"))))
}

fn spectrum(lengths: &str, hbar: Option<&str>, l: Option<&str>) -> std::result::Result<ChordSpectrum, Failure> {
    let lengths = rationals("lengths", lengths)?;
    let hbar = hbar.map(|h| rational_arg("hbar", h)).transpose()?;
    let l = l.map(|x| rational_arg("l", x)).transpose()?;
    Ok(ChordSpectrum::new(lengths, hbar, l)?)
}

fn bound_json(b: &bounds::BoundOutcome) -> Value {
    match b {
        bounds::BoundOutcome::Bound(v) => json!({ "bound": v }),
        bounds::BoundOutcome::Inadmissible { gate } => json!({ "inadmissible": gate }),
    }
}

fn bounds_cmd(what: &BoundsCmd, _field: Option<u32>) -> Out {
    match what {
        BoundsCmd::MainTheorem { betti, k, osc, lengths, l, hbar } => {
            let s = spectrum(lengths, hbar.as_deref(), l.as_deref())?;
            let b = bounds::main_theorem_bound(&integers("betti", betti)?, *k, &rational_arg("osc", osc)?, &s)?;
            Ok(Output::new(format!("{b}\n"), bound_json(&b)))
        }
        BoundsCmd::Energy { values, eps } => {
            let c = bounds::scf_energy_constant(&rationals("values", values)?, &rational_arg("eps", eps)?)?;
            Ok(Output::new(format!("{}\n", format_rational(&c)), json!({ "C": rational_value(&c) })))
        }
        BoundsCmd::Trace { f_min, f_max, eps, digits } => {
            let p = ConformalProfile {
                f_min: rational_arg("f-min", f_min)?,
                f_max: rational_arg("f-max", f_max)?,
                eps: rational_arg("eps", eps)?,
            };
            let t = bounds::trace_lengths(&p)?;
            Ok(trace_output(&t, *digits))
        }
        BoundsCmd::Growth { delta, pairs } => {
            let pairs = list("pairs", pairs, |x| {
                let (a, b) = x.split_once(':')?;
                Some((parse_rational_lenient(a).ok()?, parse_rational_lenient(b).ok()?))
            })?;
            let v = bounds::action_growth_check(&pairs, &rational_arg("delta", delta)?)?;
            Ok(growth_output(&v))
        }
        BoundsCmd::Adversary { betti, k, osc, lengths, steps } => {
            let inst = AdversaryInstance {
                betti: integers("betti", betti)?,
                spectrum: spectrum(lengths, None, None)?,
                k: *k,
                osc: rational_arg("osc", osc)?,
                steps: *steps,
            };
            let r = bounds::adversarial_min_survivors(&inst)?;
            let text = format!("bound {}, fewest surviving bars {}, {} states searched\n", r.bound, r.min_survivors, r.states);
            let mut json = bound_json(&r.bound);
            json["min_survivors"] = json!(r.min_survivors);
            json["holds"] = json!(r.bound_holds());
            Ok(Output::new(text, json).failed(!r.bound_holds()))
        }
        BoundsCmd::File { file } => {
            let Document::BoundsInput(b) = load(file, None)? else {
                return Err(anyhow!("expected a bounds_input document").into());
            };
            let mut text = String::new();
            let mut json = json!({});
            if let (Some(betti), Some(k), Some(osc), Some(lengths)) = (&b.betti, b.k, &b.osc, &b.lengths) {
                let s = ChordSpectrum::new(
                    lengths.iter().map(|r| r.0.clone()).collect(),
                    b.hbar.clone().map(|r| r.0),
                    b.l.clone().map(|r| r.0),
                )?;
                let v = bounds::main_theorem_bound(betti, k, &osc.0, &s)?;
                let _ = writeln!(text, "main theorem: {v}");
                json["main_theorem"] = bound_json(&v);
            }
            if let Some(e) = &b.energy {
                let vals: Vec<Q> = e.critical_values.iter().map(|r| r.0.clone()).collect();
                let c = bounds::scf_energy_constant(&vals, &e.eps.0)?;
                let _ = writeln!(text, "energy constant: {}", format_rational(&c));
                json["energy"] = rational_value(&c);
            }
            if let Some(c) = &b.conformal {
                let t =
                    bounds::trace_lengths(&ConformalProfile { f_min: c.f_min.0.clone(), f_max: c.f_max.0.clone(), eps: c.eps.0.clone() })?;
                let o = trace_output(&t, 12);
                text.push_str(&o.text);
                json["trace"] = o.json;
            }
            if let Some(g) = &b.growth {
                let pairs: Vec<(Q, Q)> = g.pairs.iter().map(|(a, b)| (a.0.clone(), b.0.clone())).collect();
                let o = growth_output(&bounds::action_growth_check(&pairs, &g.delta.0)?);
                text.push_str(&o.text);
                json["growth"] = o.json;
            }
            Ok(Output::new(text, json))
        }
    }
}

fn trace_output(t: &bounds::TraceLengths, digits: u32) -> Output {
    let bits = (digits as f64 * 3.33) as u32 + 8;
    let mut text = String::new();
    let mut json = json!({});
    for (name, v) in [("len01", &t.len01), ("len10", &t.len10), ("c0", &t.c0)] {
        let enc = v.enclosure(bits).to_decimal(digits);
        let _ = writeln!(text, "{name} = {v} ∈ {enc}");
        json[name] = json!({ "coeff": rational_value(&v.coeff), "exponent": rational_value(&v.exponent), "enclosure": enc });
    }
    Output::new(text, json)
}

fn growth_output(v: &bounds::GrowthVerdict) -> Output {
    let status: Vec<String> = v.statuses.iter().map(|s| format!("{s:?}").to_lowercase()).collect();
    let text = format!("e^(2δ) ∈ {}\n{}\n", v.factor.to_decimal(12), status.join(" "));
    let json = json!({ "factor": { "lo": rational_value(&v.factor.lo), "hi": rational_value(&v.factor.hi) }, "statuses": status, "passed": v.passed() });
    Output::new(text, json).failed(!v.passed())
}
