//! Closed-form quantitative outputs: the chord-count lower bound, the displacement energy
//! constant for push-off pairs, the action-growth check for exact cobordisms, trace lengths of
//! conformal contactomorphisms, and an adversarial search over drift schedules.

use std::collections::HashMap;
use std::fmt;

use num::{BigInt, Integer, One, Signed, ToPrimitive, Zero};

use crate::action::{format_rational, q, qi, Q};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChordSpectrum {
    lengths: Vec<Q>,
    hbar: Option<Q>,
    l: Option<Q>,
}

impl ChordSpectrum {
    /// `None` stands for `+∞` in both `hbar` and `l`.
    pub fn new(lengths: Vec<Q>, hbar: Option<Q>, l: Option<Q>) -> Result<Self> {
        if lengths.first().is_some_and(|x| !x.is_positive()) {
            return Err(Error::InvalidInput("chord lengths must be positive".into()));
        }
        if lengths.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("chord lengths must be strictly increasing".into()));
        }
        if l.as_ref().is_some_and(|l| !l.is_positive()) {
            return Err(Error::InvalidInput("l must be positive".into()));
        }
        match (&l, &hbar) {
            (None, Some(_)) => return Err(Error::InvalidInput("l = ∞ exceeds a finite ħ".into())),
            (Some(l), Some(h)) if l > h => {
                return Err(Error::InvalidInput(format!("l = {} exceeds ħ = {}", format_rational(l), format_rational(h))))
            }
            _ => {}
        }
        Ok(ChordSpectrum { lengths, hbar, l })
    }

    pub fn lengths(&self) -> &[Q] {
        &self.lengths
    }

    pub fn hbar(&self) -> Option<&Q> {
        self.hbar.as_ref()
    }

    pub fn l(&self) -> Option<&Q> {
        self.l.as_ref()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundOutcome {
    Bound(i64),
    Inadmissible { gate: String },
}

impl fmt::Display for BoundOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundOutcome::Bound(b) => write!(f, "{b}"),
            BoundOutcome::Inadmissible { gate } => write!(f, "inadmissible ({gate})"),
        }
    }
}

/// At least `Σ bᵢ − 2(k − 1)` chords from Λ to its image, provided `osc < min(l, ℓ(c_k))`.
pub fn main_theorem_bound(betti: &[i64], k: usize, osc: &Q, spectrum: &ChordSpectrum) -> Result<BoundOutcome> {
    if k == 0 || k > spectrum.lengths.len() {
        return Err(Error::InvalidInput(format!("k = {k} outside 1..={}", spectrum.lengths.len())));
    }
    if betti.iter().any(|b| *b < 0) {
        return Err(Error::InvalidInput("Betti numbers must be nonnegative".into()));
    }
    if osc.is_negative() {
        return Err(Error::InvalidInput("the oscillation norm is nonnegative".into()));
    }
    if let Some(l) = &spectrum.l {
        if osc >= l {
            return Ok(BoundOutcome::Inadmissible { gate: format!("osc < l = {}", format_rational(l)) });
        }
    }
    let lk = &spectrum.lengths[k - 1];
    if osc >= lk {
        return Ok(BoundOutcome::Inadmissible { gate: format!("osc < ℓ(c_{k}) = {}", format_rational(lk)) });
    }
    Ok(BoundOutcome::Bound(betti.iter().sum::<i64>() - 2 * (k as i64 - 1)))
}

/// `C = min{ε²(2m₁ − m_q), ε²(m₂ − m₁), …, ε²(m_q − m_{q−1})}` for critical values `m₁ < … < m_q`
/// normalized so that `2m₁ > m_q > 0`.
pub fn scf_energy_constant(values: &[Q], eps: &Q) -> Result<Q> {
    let (Some(first), Some(last)) = (values.first(), values.last()) else {
        return Err(Error::InvalidInput("no critical values".into()));
    };
    if !eps.is_positive() {
        return Err(Error::InvalidInput("ε must be positive".into()));
    }
    if values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("critical values must be distinct and increasing".into()));
    }
    if !last.is_positive() || first * qi(2) <= *last {
        return Err(Error::InvalidInput(format!(
            "critical values violate 2·min > max > 0 (min {}, max {})",
            format_rational(first),
            format_rational(last)
        )));
    }
    let e2 = eps * eps;
    let c = std::iter::once(first * qi(2) - last).chain(values.windows(2).map(|w| &w[1] - &w[0])).map(|g| &e2 * g).min().expect("nonempty");
    debug_assert!(c.is_positive());
    Ok(c)
}

/// A closed rational interval known to contain a real number.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosure {
    pub lo: Q,
    pub hi: Q,
}

impl Enclosure {
    pub fn exact(x: Q) -> Self {
        Enclosure { lo: x.clone(), hi: x }
    }

    pub fn width(&self) -> Q {
        &self.hi - &self.lo
    }

    pub fn scale(&self, c: &Q) -> Enclosure {
        let (a, b) = (&self.lo * c, &self.hi * c);
        if a <= b {
            Enclosure { lo: a, hi: b }
        } else {
            Enclosure { lo: b, hi: a }
        }
    }

    pub fn to_f64(&self) -> f64 {
        let mid = (&self.lo + &self.hi) / qi(2);
        mid.numer().to_f64().unwrap_or(f64::NAN) / mid.denom().to_f64().unwrap_or(f64::NAN)
    }

    /// Decimal bounds rounded outward to `digits` places.
    pub fn to_decimal(&self, digits: u32) -> String {
        let scale = BigInt::from(10u32).pow(digits);
        let lo = (&self.lo * Q::from_integer(scale.clone())).floor().to_integer();
        let hi = (&self.hi * Q::from_integer(scale.clone())).ceil().to_integer();
        format!("[{}, {}]", decimal(&lo, digits), decimal(&hi, digits))
    }
}

fn decimal(v: &BigInt, digits: u32) -> String {
    let neg = v.is_negative();
    let s = v.abs().to_string();
    let d = digits as usize;
    let s = if s.len() <= d { format!("{}{}", "0".repeat(d + 1 - s.len()), s) } else { s };
    let (int, frac) = s.split_at(s.len() - d);
    let sign = if neg { "-" } else { "" };
    if d == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

fn round_down(x: &Q, bits: u32) -> Q {
    let den = BigInt::one() << bits;
    Q::new((x * Q::from_integer(den.clone())).floor().to_integer(), den)
}

fn round_up(x: &Q, bits: u32) -> Q {
    let den = BigInt::one() << bits;
    Q::new((x * Q::from_integer(den.clone())).ceil().to_integer(), den)
}

/// Certified enclosure of `eˣ` with width about `2^{-bits}·eˣ`.
pub fn exp_enclosure(x: &Q, bits: u32) -> Enclosure {
    if x.is_zero() {
        return Enclosure::exact(Q::one());
    }
    if x.is_negative() {
        let e = exp_enclosure(&-x, bits + 2);
        return Enclosure { lo: round_down(&(Q::one() / &e.hi), bits + 4), hi: round_up(&(Q::one() / &e.lo), bits + 4) };
    }
    // halve until y ≤ 1/2, sum the series, then square back up
    let mut s = 0u32;
    let mut y = x.clone();
    while y > q(1, 2) {
        y /= qi(2);
        s += 1;
    }
    let work = bits + 2 * s + 16;
    let tol = Q::new(BigInt::one(), BigInt::one() << work);
    let (mut sum, mut term, mut n) = (Q::one(), Q::one(), 0i64);
    loop {
        n += 1;
        term = term * &y / qi(n);
        sum += &term;
        // remaining tail is at most the next term times 2 since y ≤ 1/2
        let next = &term * &y / qi(n + 1);
        if next < tol {
            let (mut lo, mut hi) = (round_down(&sum, work), round_up(&(&sum + next * qi(2)), work));
            for _ in 0..s {
                lo = round_down(&(&lo * &lo), work);
                hi = round_up(&(&hi * &hi), work);
            }
            return Enclosure { lo, hi };
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GrowthStatus {
    Pass,
    Violation,
    /// The enclosure of the growth factor straddles the ratio.
    Undecided,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrowthVerdict {
    pub factor: Enclosure,
    pub statuses: Vec<GrowthStatus>,
}

impl GrowthVerdict {
    pub fn passed(&self) -> bool {
        self.statuses.iter().all(|s| *s == GrowthStatus::Pass)
    }

    pub fn violations(&self) -> Vec<usize> {
        self.statuses.iter().enumerate().filter(|(_, s)| **s == GrowthStatus::Violation).map(|(i, _)| i).collect()
    }
}

/// Checks `ℓ_out < e^{2δ}·ℓ_in` for every pair against a given enclosure of `e^{2δ}`. A pair
/// passes only if it passes for the lower end and fails only if it fails for the upper end.
pub fn action_growth_check_with(pairs: &[(Q, Q)], factor: Enclosure) -> Result<GrowthVerdict> {
    if factor.lo > factor.hi || factor.lo < Q::one() {
        return Err(Error::InvalidInput("e^{2δ} enclosure must satisfy 1 ≤ lo ≤ hi".into()));
    }
    let statuses = pairs
        .iter()
        .map(|(lin, lout)| {
            if *lout < lin * &factor.lo {
                GrowthStatus::Pass
            } else if *lout >= lin * &factor.hi {
                GrowthStatus::Violation
            } else {
                GrowthStatus::Undecided
            }
        })
        .collect();
    Ok(GrowthVerdict { factor, statuses })
}

/// As [`action_growth_check_with`], computing `e^{2δ}` itself and refining until every pair is
/// decided or the precision budget runs out.
pub fn action_growth_check(pairs: &[(Q, Q)], delta: &Q) -> Result<GrowthVerdict> {
    if delta.is_negative() {
        return Err(Error::InvalidInput("δ must be nonnegative".into()));
    }
    let x = delta * qi(2);
    let mut bits = 32;
    loop {
        let v = action_growth_check_with(pairs, exp_enclosure(&x, bits))?;
        if bits >= 1024 || !v.statuses.contains(&GrowthStatus::Undecided) {
            return Ok(v);
        }
        bits *= 2;
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConformalProfile {
    pub f_min: Q,
    pub f_max: Q,
    pub eps: Q,
}

/// `coeff · e^{exponent}`, kept symbolic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpScaled {
    pub coeff: Q,
    pub exponent: Q,
}

impl ExpScaled {
    pub fn enclosure(&self, bits: u32) -> Enclosure {
        exp_enclosure(&self.exponent, bits).scale(&self.coeff)
    }
}

impl fmt::Display for ExpScaled {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeff.is_zero() {
            write!(f, "0")
        } else {
            write!(f, "({})·e^({})", format_rational(&self.coeff), format_rational(&self.exponent))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceLengths {
    pub len01: ExpScaled,
    pub len10: ExpScaled,
    pub c0: ExpScaled,
}

/// Lengths of the trace cobordism of a contactomorphism with conformal factor `e^f`:
/// `len01 = −e^{1+ε}·min f`, `len10 = e^{1+ε}·max f` (both clamped at 0) and
/// `c0 = e^{1+ε}(max f − min f)`.
pub fn trace_lengths(p: &ConformalProfile) -> Result<TraceLengths> {
    if !p.eps.is_positive() {
        return Err(Error::InvalidInput("ε must be positive".into()));
    }
    if p.f_min > p.f_max {
        return Err(Error::InvalidInput("f_min exceeds f_max".into()));
    }
    let exponent = Q::one() + &p.eps;
    let scaled = |c: Q| ExpScaled { coeff: c, exponent: exponent.clone() };
    let zero = Q::zero();
    Ok(TraceLengths {
        len01: scaled((-&p.f_min).max(zero.clone())),
        len10: scaled(p.f_max.clone().max(zero)),
        c0: scaled(&p.f_max - &p.f_min),
    })
}

/// A persistence game in the shadow of the chord-count bound. Morse bars start at action 0,
/// every pure chord `cᵢ` contributes two foreign endpoints at `±ℓ(cᵢ)`. On each of `steps`
/// grid intervals every live endpoint drifts by an amount in `[0, osc/steps]` (so pairwise
/// drift speed is at most `osc`), linearly in between. A Morse bar may be killed by any foreign
/// endpoint it meets during an interval; each endpoint kills at most once.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdversaryInstance {
    pub betti: Vec<i64>,
    pub spectrum: ChordSpectrum,
    pub k: usize,
    pub osc: Q,
    pub steps: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdversaryReport {
    pub bound: BoundOutcome,
    pub min_survivors: i64,
    pub states: u64,
}

impl AdversaryReport {
    pub fn bound_holds(&self) -> bool {
        match self.bound {
            BoundOutcome::Bound(b) => self.min_survivors >= b,
            BoundOutcome::Inadmissible { .. } => true,
        }
    }
}

struct Game {
    steps: u32,
    unit: i64,
    memo: HashMap<(u32, Vec<i64>, Vec<i64>), i64>,
    states: u64,
}

const MAX_LIVE: usize = 9;

impl Game {
    /// Fewest Morse bars left at the end, over every drift and kill schedule from this state.
    fn solve(&mut self, step: u32, morse: Vec<i64>, foreign: Vec<i64>) -> i64 {
        let reach = 2 * (self.steps - step) as i64 * self.unit;
        let near = |a: i64, others: &[i64]| others.iter().any(|b| (a - b).abs() <= reach);
        let foreign: Vec<i64> = foreign.into_iter().filter(|f| near(*f, &morse)).collect();
        let (morse, safe): (Vec<i64>, Vec<i64>) = morse.into_iter().partition(|m| near(*m, &foreign));
        let safe = safe.len() as i64;
        if step == self.steps || foreign.is_empty() || morse.is_empty() {
            return safe + morse.len() as i64;
        }
        let (morse, foreign) = normalize(morse, foreign);
        let key = (step, morse.clone(), foreign.clone());
        if let Some(v) = self.memo.get(&key) {
            return safe + v;
        }
        self.states += 1;
        let live = morse.len() + foreign.len();
        // each foreign endpoint kills at most once
        let floor = (morse.len() as i64 - foreign.len() as i64).max(0);
        let mut best = i64::MAX;
        let mut moves = vec![0i64; live];
        loop {
            let nm: Vec<i64> = morse.iter().zip(&moves).map(|(p, d)| p + d * self.unit).collect();
            let nf: Vec<i64> = foreign.iter().zip(&moves[morse.len()..]).map(|(p, d)| p + d * self.unit).collect();
            let met: Vec<Vec<usize>> =
                (0..morse.len()).map(|i| (0..foreign.len()).filter(|&j| crossed(foreign[j] - morse[i], nf[j] - nm[i])).collect()).collect();
            let mut kills = Vec::new();
            matchings(&met, 0, &mut vec![false; foreign.len()], &mut Vec::new(), &mut kills);
            for kill in kills {
                let m2: Vec<i64> = (0..nm.len()).filter(|i| !kill.iter().any(|(a, _)| a == i)).map(|i| nm[i]).collect();
                let f2: Vec<i64> = (0..nf.len()).filter(|j| !kill.iter().any(|(_, b)| b == j)).map(|j| nf[j]).collect();
                best = best.min(self.solve(step + 1, m2, f2));
            }
            if best == floor {
                break;
            }
            // next displacement vector in {0, 1, 2}^live, in units of osc / (2·steps)
            let mut i = 0;
            while i < live && moves[i] == 2 {
                moves[i] = 0;
                i += 1;
            }
            if i == live {
                break;
            }
            moves[i] += 1;
        }
        self.memo.insert(key, best);
        safe + best
    }
}

fn crossed(before: i64, after: i64) -> bool {
    before == 0 || after == 0 || (before < 0) != (after < 0)
}

fn normalize(mut morse: Vec<i64>, mut foreign: Vec<i64>) -> (Vec<i64>, Vec<i64>) {
    let base = morse.iter().chain(&foreign).copied().min().unwrap_or(0);
    morse.iter_mut().for_each(|x| *x -= base);
    foreign.iter_mut().for_each(|x| *x -= base);
    morse.sort_unstable();
    foreign.sort_unstable();
    (morse, foreign)
}

fn matchings(met: &[Vec<usize>], i: usize, used: &mut Vec<bool>, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
    if i == met.len() {
        out.push(cur.clone());
        return;
    }
    matchings(met, i + 1, used, cur, out);
    for &j in &met[i] {
        if !used[j] {
            used[j] = true;
            cur.push((i, j));
            matchings(met, i + 1, used, cur, out);
            cur.pop();
            used[j] = false;
        }
    }
}

/// Exhaustive minimum of surviving Morse bars over all schedules of the game.
pub fn adversarial_min_survivors(inst: &AdversaryInstance) -> Result<AdversaryReport> {
    let bound = main_theorem_bound(&inst.betti, inst.k, &inst.osc, &inst.spectrum)?;
    if inst.steps == 0 || inst.steps > 8 {
        return Err(Error::InvalidInput("the time grid has 1 to 8 steps".into()));
    }
    if !inst.osc.is_positive() {
        return Err(Error::InvalidInput("the game needs osc > 0".into()));
    }
    let unit_q = &inst.osc / qi(2 * inst.steps as i64);
    let den = inst.spectrum.lengths.iter().fold(unit_q.denom().clone(), |acc, l| acc.lcm(l.denom()));
    let to_int = |x: &Q| -> Result<i64> {
        (x * Q::from_integer(den.clone())).to_integer().to_i64().ok_or_else(|| Error::Overflow("lengths too fine".into()))
    };
    let unit = to_int(&unit_q)?;
    let m = inst.betti.iter().sum::<i64>();
    let morse = vec![0i64; m as usize];
    let mut foreign = Vec::new();
    for l in &inst.spectrum.lengths {
        let v = to_int(l)?;
        foreign.push(v);
        foreign.push(-v);
    }
    let reach = 2 * inst.steps as i64 * unit;
    let live = m as usize + foreign.iter().filter(|f| f.abs() <= reach).count();
    if live > MAX_LIVE {
        return Err(Error::InvalidInput(format!("{live} interacting endpoints exceed the search limit {MAX_LIVE}")));
    }
    let mut game = Game { steps: inst.steps, unit, memo: HashMap::new(), states: 0 };
    let min_survivors = game.solve(0, morse, foreign);
    Ok(AdversaryReport { bound, min_survivors, states: game.states })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(lengths: &[(i64, i64)]) -> ChordSpectrum {
        ChordSpectrum::new(lengths.iter().map(|(a, b)| q(*a, *b)).collect(), None, None).unwrap()
    }

    #[test]
    fn bound_examples() {
        let s = spec(&[(1, 1), (2, 1), (3, 1)]);
        assert_eq!(main_theorem_bound(&[1, 1], 1, &q(1, 10), &s).unwrap(), BoundOutcome::Bound(2));
        assert_eq!(main_theorem_bound(&[1, 1, 1, 1], 1, &q(1, 2), &s).unwrap(), BoundOutcome::Bound(4));
        assert_eq!(main_theorem_bound(&[1, 1, 1], 2, &q(3, 2), &s).unwrap(), BoundOutcome::Bound(1));
        assert!(matches!(main_theorem_bound(&[1, 1], 1, &qi(1), &s).unwrap(), BoundOutcome::Inadmissible { .. }));
        let capped = ChordSpectrum::new(vec![qi(5)], None, Some(q(1, 2))).unwrap();
        assert!(
            matches!(main_theorem_bound(&[1, 1], 1, &q(1, 2), &capped).unwrap(), BoundOutcome::Inadmissible { gate } if gate.contains("l ="))
        );
        assert!(main_theorem_bound(&[1, 1], 4, &q(1, 2), &s).is_err());
        assert!(ChordSpectrum::new(vec![qi(1)], Some(qi(1)), Some(qi(2))).is_err());
    }

    #[test]
    fn bound_is_monotone_in_k() {
        let s = spec(&[(1, 1), (2, 1), (3, 1), (4, 1)]);
        let b: Vec<i64> = (1..=4)
            .map(|k| match main_theorem_bound(&[2, 3, 1], k, &q(1, 2), &s).unwrap() {
                BoundOutcome::Bound(b) => b,
                _ => unreachable!(),
            })
            .collect();
        assert!(b.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn energy_constant_examples() {
        let vals = [q(3, 5), q(4, 5), qi(1)];
        assert_eq!(scf_energy_constant(&vals, &q(1, 10)).unwrap(), q(1, 500));
        assert!(scf_energy_constant(&[q(1, 2), qi(1)], &q(1, 10)).is_err());
        assert!(scf_energy_constant(&[q(3, 5), q(3, 5), qi(1)], &q(1, 10)).is_err());
        assert_eq!(scf_energy_constant(&[q(3, 4)], &q(1, 2)).unwrap(), q(3, 16));
    }

    #[test]
    fn exp_encloses_known_values() {
        let e = exp_enclosure(&qi(1), 64);
        assert!(e.lo < e.hi && e.width() < q(1, 1 << 40));
        assert_eq!(e.to_decimal(10), "[2.7182818284, 2.7182818285]");
        let inv = exp_enclosure(&qi(-1), 64);
        assert!(inv.to_f64() - (-1f64).exp() < 1e-15);
        for x in [q(1, 7), q(101, 100), qi(5), q(-33, 10)] {
            let enc = exp_enclosure(&x, 48);
            let f = (x.numer().to_f64().unwrap() / x.denom().to_f64().unwrap()).exp();
            assert!((enc.to_f64() - f).abs() < 1e-12 * f.max(1.0));
            assert!(enc.lo <= enc.hi);
        }
    }

    #[test]
    fn growth_examples() {
        assert!(action_growth_check(&[(qi(2), qi(1))], &Q::zero()).unwrap().passed());
        assert_eq!(action_growth_check(&[(qi(1), qi(1))], &Q::zero()).unwrap().violations(), vec![0]);
        let fac = Enclosure { lo: qi(1), hi: q(3, 2) };
        assert_eq!(action_growth_check_with(&[(qi(1), qi(2))], fac).unwrap().violations(), vec![0]);
        // e^{3/10} ≈ 1.3499 ≥ 4/3
        let v = action_growth_check(&[(qi(1), q(5, 4))], &q(3, 20)).unwrap();
        assert!(v.factor.lo >= q(4, 3));
        assert!(v.passed());
    }

    #[test]
    fn trace_length_examples() {
        let z = trace_lengths(&ConformalProfile { f_min: Q::zero(), f_max: Q::zero(), eps: q(1, 100) }).unwrap();
        assert!(z.len01.coeff.is_zero() && z.len10.coeff.is_zero() && z.c0.coeff.is_zero());
        let t = trace_lengths(&ConformalProfile { f_min: q(-1, 10), f_max: q(1, 5), eps: q(1, 100) }).unwrap();
        assert_eq!((t.len01.coeff.clone(), t.len01.exponent.clone()), (q(1, 10), q(101, 100)));
        assert_eq!(t.c0.coeff, q(3, 10));
        assert_eq!(&t.len01.coeff + &t.len10.coeff, t.c0.coeff);
        let enc = t.c0.enclosure(40);
        assert!((enc.to_f64() - 0.3 * 1.01f64.exp()).abs() < 1e-10);
        let pos = trace_lengths(&ConformalProfile { f_min: Q::zero(), f_max: qi(1), eps: q(1, 2) }).unwrap();
        assert!(pos.len01.coeff.is_zero());
    }

    #[test]
    fn adversary_meets_bound_exactly_when_reachable() {
        // c₁ is within reach, c₂ is not: the two endpoints of c₁ kill two Morse bars
        let inst = AdversaryInstance { betti: vec![1, 1, 1], spectrum: spec(&[(1, 4), (3, 1)]), k: 2, osc: q(1, 2), steps: 4 };
        let r = adversarial_min_survivors(&inst).unwrap();
        assert_eq!(r.bound, BoundOutcome::Bound(1));
        assert_eq!(r.min_survivors, 1);
        // with k = 1 nothing is in reach
        let inst1 = AdversaryInstance { k: 1, osc: q(1, 5), ..inst.clone() };
        assert_eq!(adversarial_min_survivors(&inst1).unwrap().min_survivors, 3);
    }

    #[test]
    fn gate_matters() {
        // osc ≥ ℓ(c₁): the gate refuses, and indeed both endpoints of c₁ can kill
        let inst = AdversaryInstance { betti: vec![1, 1], spectrum: spec(&[(1, 2)]), k: 1, osc: q(1, 2), steps: 2 };
        let r = adversarial_min_survivors(&inst).unwrap();
        assert!(matches!(r.bound, BoundOutcome::Inadmissible { .. }));
        assert_eq!(r.min_survivors, 0);
    }
}
