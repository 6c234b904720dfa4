//! Prime field arithmetic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The ground field 𝔽_p. Elements are canonical representatives in `0..p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Fp {
    p: u32,
}

impl Default for Fp {
    fn default() -> Self {
        Fp { p: 2 }
    }
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Fp {
    pub fn new(p: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("characteristic {p} is not prime")));
        }
        if p > 46_337 {
            return Err(Error::InvalidInput(format!("characteristic {p} too large")));
        }
        Ok(Fp { p })
    }

    pub fn two() -> Self {
        Fp { p: 2 }
    }

    pub fn p(self) -> u32 {
        self.p
    }

    /// Reduce an arbitrary integer into `0..p`.
    pub fn reduce(self, x: i64) -> u32 {
        x.rem_euclid(self.p as i64) as u32
    }

    pub fn add(self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.p as u64) as u32
    }

    pub fn sub(self, a: u32, b: u32) -> u32 {
        ((a as u64 + self.p as u64 - b as u64) % self.p as u64) as u32
    }

    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(self, a: u32) -> Option<u32> {
        if a.is_multiple_of(self.p) {
            return None;
        }
        // Fermat: a^(p-2)
        Some(self.pow(a, self.p as u64 - 2))
    }

    pub fn pow(self, a: u32, mut e: u64) -> u32 {
        let m = self.p as u64;
        let mut base = a as u64 % m;
        let mut acc = 1u64 % m;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % m;
            }
            base = base * base % m;
            e >>= 1;
        }
        acc as u32
    }

    /// `(-1)^k` as a field element.
    pub fn sign(self, k: i64) -> u32 {
        if k.rem_euclid(2) == 0 {
            1 % self.p
        } else {
            self.neg(1)
        }
    }

    /// All nonzero elements.
    pub fn units(self) -> impl Iterator<Item = u32> {
        1..self.p
    }

    /// Signed representative in `(-p/2, p/2]`, used for display.
    pub fn signed(self, a: u32) -> i64 {
        let a = a as i64;
        let p = self.p as i64;
        if a > p / 2 {
            a - p
        } else {
            a
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverses_in_f3_and_f7() {
        let f3 = Fp::new(3).unwrap();
        assert_eq!(f3.inv(2), Some(2));
        let f7 = Fp::new(7).unwrap();
        for a in 1..7 {
            assert_eq!(f7.mul(a, f7.inv(a).unwrap()), 1);
        }
        assert_eq!(f7.inv(0), None);
    }

    #[test]
    fn rejects_composites() {
        assert!(Fp::new(4).is_err());
        assert!(Fp::new(1).is_err());
        assert!(Fp::new(0).is_err());
    }

    #[test]
    fn signs_over_f2_are_trivial() {
        let f2 = Fp::two();
        assert_eq!(f2.sign(1), 1);
        assert_eq!(f2.neg(1), 1);
    }
}
