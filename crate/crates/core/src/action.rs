//! Exact action values.
//!
//! Actions are elements of the ℚ-vector space spanned by `1` and `π`, written `qπ + r`.
//! Plain rational actions have `q = 0`. Comparison is exact: `π` is irrational, so two
//! distinct pairs never compare equal, and the sign of `qπ + r` is decided by a certified
//! rational enclosure of `π` refined until it separates the value from zero.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::{Mutex, OnceLock};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Parse `"n"` or `"n/d"`. The fraction must be reduced with a positive denominator.
pub fn parse_rational(s: &str) -> Result<Q> {
    let bad = |reason: &str| Error::InvalidInput(format!("rational {s:?}: {reason}"));
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad("bad numerator"))?;
    let d: BigInt = d.parse().map_err(|_| bad("bad denominator"))?;
    if d.is_zero() {
        return Err(bad("zero denominator"));
    }
    if d.is_negative() {
        return Err(bad("negative denominator"));
    }
    let r = Q::new(n.clone(), d.clone());
    if *r.numer() != n || *r.denom() != d {
        return Err(bad("not reduced"));
    }
    Ok(r)
}

/// Lenient parse for command-line input: accepts unreduced fractions and decimals.
pub fn parse_rational_lenient(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::InvalidInput(format!("cannot read {s:?} as a rational"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Q::new(n, d));
    }
    if let Some((i, f)) = s.split_once('.') {
        let neg = i.trim_start().starts_with('-');
        let ip: BigInt = if i.is_empty() || i == "-" { BigInt::zero() } else { i.parse().map_err(|_| bad())? };
        if f.is_empty() || !f.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let fp: BigInt = f.parse().map_err(|_| bad())?;
        let scale = num::pow(BigInt::from(10), f.len());
        let frac = Q::new(fp, scale);
        let ip = Q::from_integer(ip);
        return Ok(if neg { ip - frac } else { ip + frac });
    }
    Ok(Q::from_integer(s.parse().map_err(|_| bad())?))
}

pub fn format_rational(r: &Q) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational_to_f64(r: &Q) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn atan_inv_bounds(x: i64, terms: usize) -> (Q, Q) {
    // alternating series with decreasing terms: consecutive partial sums bracket the limit
    let x2 = BigInt::from(x * x);
    let mut pow = BigInt::from(x);
    let mut sum = Q::zero();
    let mut prev = Q::zero();
    for k in 0..=terms {
        prev = sum.clone();
        let term = Q::new(BigInt::one(), BigInt::from(2 * k as i64 + 1) * &pow);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        pow *= &x2;
    }
    if prev < sum {
        (prev, sum)
    } else {
        (sum, prev)
    }
}

fn round_out(lo: &Q, hi: &Q, digits: usize) -> (Q, Q) {
    let scale = num::pow(BigInt::from(10), digits);
    let lo_n = (lo * Q::from_integer(scale.clone())).floor().to_integer();
    let hi_n = (hi * Q::from_integer(scale.clone())).ceil().to_integer();
    (Q::new(lo_n, scale.clone()), Q::new(hi_n, scale))
}

fn pi_enclosure_level(level: usize) -> (Q, Q) {
    static CACHE: OnceLock<Mutex<Vec<(Q, Q)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(Vec::new()));
    let mut guard = cache.lock().expect("pi cache poisoned");
    while guard.len() <= level {
        let l = guard.len();
        let terms = 16usize << l;
        // Machin: π = 16·atan(1/5) − 4·atan(1/239)
        let (a_lo, a_hi) = atan_inv_bounds(5, terms);
        let (b_lo, b_hi) = atan_inv_bounds(239, terms / 3 + 2);
        let lo = qi(16) * a_lo - qi(4) * b_hi;
        let hi = qi(16) * a_hi - qi(4) * b_lo;
        let digits = (terms as f64 * 1.39) as usize;
        guard.push(round_out(&lo, &hi, digits));
    }
    guard[level].clone()
}

/// Certified rational bounds `lo < π < hi`; higher levels are tighter.
pub fn pi_bounds(level: usize) -> (Q, Q) {
    pi_enclosure_level(level)
}

/// `qπ + r` with rational `q`, `r`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Action {
    pub pi: Q,
    pub c: Q,
}

impl Action {
    pub fn rational(c: Q) -> Self {
        Action { pi: Q::zero(), c }
    }

    pub fn int(n: i64) -> Self {
        Action::rational(qi(n))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Action::rational(q(n, d))
    }

    pub fn pi_linear(pi: Q, c: Q) -> Self {
        Action { pi, c }
    }

    pub fn zero() -> Self {
        Action::rational(Q::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.pi.is_zero() && self.c.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.pi.is_zero()
    }

    /// The rational value when there is no `π` part.
    pub fn as_rational(&self) -> Option<&Q> {
        self.is_rational().then_some(&self.c)
    }

    pub fn scale(&self, k: &Q) -> Self {
        Action { pi: &self.pi * k, c: &self.c * k }
    }

    pub fn half(&self) -> Self {
        self.scale(&q(1, 2))
    }

    /// Exact sign of `qπ + r`.
    pub fn signum(&self) -> Ordering {
        if self.pi.is_zero() {
            return self.c.cmp(&Q::zero());
        }
        let mut level = 0;
        loop {
            let (lo, hi) = pi_bounds(level);
            let (a, b) = (&self.pi * lo + &self.c, &self.pi * hi + &self.c);
            let (mn, mx) = if a < b { (a, b) } else { (b, a) };
            if mn > Q::zero() {
                return Ordering::Greater;
            }
            if mx < Q::zero() {
                return Ordering::Less;
            }
            level += 1;
        }
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.pi) * std::f64::consts::PI + rational_to_f64(&self.c)
    }
}

impl Ord for Action {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum()
    }
}

impl PartialOrd for Action {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &Action {
    type Output = Action;
    fn add(self, o: &Action) -> Action {
        Action { pi: &self.pi + &o.pi, c: &self.c + &o.c }
    }
}

impl Add for Action {
    type Output = Action;
    fn add(self, o: Action) -> Action {
        &self + &o
    }
}

impl Sub for &Action {
    type Output = Action;
    fn sub(self, o: &Action) -> Action {
        Action { pi: &self.pi - &o.pi, c: &self.c - &o.c }
    }
}

impl Sub for Action {
    type Output = Action;
    fn sub(self, o: Action) -> Action {
        &self - &o
    }
}

impl Neg for &Action {
    type Output = Action;
    fn neg(self) -> Action {
        Action { pi: -&self.pi, c: -&self.c }
    }
}

impl From<Q> for Action {
    fn from(c: Q) -> Self {
        Action::rational(c)
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pi.is_zero() {
            return write!(f, "{}", format_rational(&self.c));
        }
        let qs = if self.pi.is_one() {
            "π".to_string()
        } else if self.pi == -Q::one() {
            "-π".to_string()
        } else {
            format!("{}π", format_rational(&self.pi))
        };
        if self.c.is_zero() {
            write!(f, "{qs}")
        } else if self.c.is_negative() {
            write!(f, "{qs} - {}", format_rational(&-&self.c))
        } else {
            write!(f, "{qs} + {}", format_rational(&self.c))
        }
    }
}
