//! Exact rationals over `i128` with checked arithmetic.
//!
//! Every operation that could overflow returns [`Error::Overflow`]; nothing
//! ever rounds. Comparison never overflows (it works on continued-fraction
//! expansions instead of cross products).

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A rational number in lowest terms with a positive denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Rat {
    num: i128,
    den: i128,
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Rat {
    pub const ZERO: Rat = Rat { num: 0, den: 1 };
    pub const ONE: Rat = Rat { num: 1, den: 1 };

    /// Builds `num / den`, normalising sign and common factors.
    pub fn new(num: i128, den: i128) -> Result<Rat> {
        if den == 0 {
            return Err(Error::Overflow);
        }
        let g = gcd(num, den);
        let (mut n, mut d) = (num / g, den / g);
        if d < 0 {
            n = n.checked_neg().ok_or(Error::Overflow)?;
            d = d.checked_neg().ok_or(Error::Overflow)?;
        }
        Ok(Rat { num: n, den: d })
    }

    pub fn from_int(v: i64) -> Rat {
        Rat { num: v as i128, den: 1 }
    }

    pub fn numer(&self) -> i128 {
        self.num
    }

    pub fn denom(&self) -> i128 {
        self.den
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    /// The value as an `i64` when integral and in range.
    pub fn to_i64(&self) -> Option<i64> {
        if self.den == 1 {
            i64::try_from(self.num).ok()
        } else {
            None
        }
    }

    pub fn floor(&self) -> i128 {
        self.num.div_euclid(self.den)
    }

    pub fn ceil(&self) -> i128 {
        -((-self.num).div_euclid(self.den))
    }

    pub fn checked_add(self, rhs: Rat) -> Result<Rat> {
        let g = gcd(self.den, rhs.den);
        let l = (self.den / g).checked_mul(rhs.den).ok_or(Error::Overflow)?;
        let a = self.num.checked_mul(l / self.den).ok_or(Error::Overflow)?;
        let b = rhs.num.checked_mul(l / rhs.den).ok_or(Error::Overflow)?;
        Rat::new(a.checked_add(b).ok_or(Error::Overflow)?, l)
    }

    pub fn checked_neg(self) -> Result<Rat> {
        Ok(Rat { num: self.num.checked_neg().ok_or(Error::Overflow)?, den: self.den })
    }

    pub fn checked_sub(self, rhs: Rat) -> Result<Rat> {
        self.checked_add(rhs.checked_neg()?)
    }

    pub fn checked_mul(self, rhs: Rat) -> Result<Rat> {
        let g1 = gcd(self.num, rhs.den).max(1);
        let g2 = gcd(rhs.num, self.den).max(1);
        let n = (self.num / g1).checked_mul(rhs.num / g2).ok_or(Error::Overflow)?;
        let d = (self.den / g2).checked_mul(rhs.den / g1).ok_or(Error::Overflow)?;
        Rat::new(n, d)
    }

    pub fn checked_div(self, rhs: Rat) -> Result<Rat> {
        if rhs.num == 0 {
            return Err(Error::Overflow);
        }
        self.checked_mul(Rat { num: rhs.den, den: rhs.num }).and_then(|r| Rat::new(r.num, r.den))
    }

    pub fn checked_mul_int(self, k: i128) -> Result<Rat> {
        self.checked_mul(Rat::new(k, 1)?)
    }
}

/// Compares `an/ad` with `bn/bd` for positive denominators without
/// multiplying, by peeling off integer parts.
fn cmp_frac(an: i128, ad: i128, bn: i128, bd: i128) -> Ordering {
    let (aq, ar) = (an.div_euclid(ad), an.rem_euclid(ad));
    let (bq, br) = (bn.div_euclid(bd), bn.rem_euclid(bd));
    match aq.cmp(&bq) {
        Ordering::Equal => {}
        o => return o,
    }
    match (ar == 0, br == 0) {
        (true, true) => Ordering::Equal,
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        // ar/ad vs br/bd, both in (0,1): compare reciprocals, reversed.
        (false, false) => cmp_frac(bd, br, ad, ar),
    }
}

impl Ord for Rat {
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_frac(self.num, self.den, other.num, other.den)
    }
}

impl PartialOrd for Rat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<i64> for Rat {
    fn from(v: i64) -> Self {
        Rat::from_int(v)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for Rat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Rat> {
        let bad = || Error::Parse { line: 0, col: 0, msg: format!("malformed rational `{s}`") };
        match s.split_once('/') {
            Some((n, d)) => Rat::new(n.trim().parse().map_err(|_| bad())?, d.trim().parse().map_err(|_| bad())?),
            None => Rat::new(s.trim().parse().map_err(|_| bad())?, 1),
        }
    }
}

impl From<Rat> for String {
    fn from(r: Rat) -> String {
        r.to_string()
    }
}

impl TryFrom<String> for Rat {
    type Error = Error;

    fn try_from(s: String) -> Result<Rat> {
        s.parse()
    }
}
