//! The circle group T = R/Z restricted to rational points.
//!
//! Every element is stored by its canonical representative `num/den` with
//! `gcd(|num|, den) = 1` and `-den < 2*num <= den`, so the representative lies
//! in the right-closed interval (-1/2, 1/2]. Equality of cosets is equality of
//! these pairs.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Residue of `a` modulo `m` shifted into `(-m/2, m/2]`.
///
/// `m` must be positive. Ties (`a ≡ m/2`) resolve to `+m/2`.
pub fn centered_residue(a: &BigInt, m: &BigInt) -> BigInt {
    let mut r = a.mod_floor(m);
    if &r * 2 > *m {
        r -= m;
    }
    r
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CircleElem {
    num: BigInt,
    den: BigInt,
}

impl CircleElem {
    pub fn zero() -> Self {
        CircleElem {
            num: BigInt::zero(),
            den: BigInt::one(),
        }
    }

    /// Canonical representative of `num/den + Z`.
    pub fn make(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        let num = num.into();
        let den = den.into();
        if !den.is_positive() {
            return Err(Error::InvalidDenominator);
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(num: BigInt, den: BigInt) -> Self {
        let r = centered_residue(&num, &den);
        let g = r.gcd(&den);
        if g.is_zero() {
            return Self::zero();
        }
        let (num, den) = (r / &g, den / g);
        if num.is_zero() {
            return Self::zero();
        }
        CircleElem { num, den }
    }

    pub fn num(&self) -> &BigInt {
        &self.num
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, other: &Self) -> Self {
        let den = self.den.lcm(&other.den);
        let num = &self.num * (&den / &self.den) + &other.num * (&den / &other.den);
        Self::reduce(num, den)
    }

    pub fn neg(&self) -> Self {
        Self::reduce(-&self.num, self.den.clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn smul(&self, n: &BigInt) -> Self {
        Self::reduce(&self.num * n, self.den.clone())
    }

    /// Membership in the closed arc `T_m = [-1/(4m), 1/(4m)] + Z`.
    pub fn in_tm(&self, m: u64) -> Result<bool> {
        if m == 0 {
            return Err(Error::InvalidLevel(0));
        }
        Ok(self.num.abs() * 4u32 * m <= self.den)
    }

    /// Membership in `T_+ = T_1`.
    pub fn in_t_plus(&self) -> bool {
        self.num.abs() * 4u32 <= self.den
    }

    /// All canonical elements whose reduced denominator is exactly `den`,
    /// ordered by numerator.
    pub fn with_exact_denominator(den: u64) -> Vec<Self> {
        if den == 0 {
            return Vec::new();
        }
        if den == 1 {
            return vec![Self::zero()];
        }
        let d = den as i64;
        let lo = -(d - 1) / 2;
        (lo..=d / 2)
            .filter(|&n| n.gcd(&d) == 1)
            .map(|n| CircleElem {
                num: BigInt::from(n),
                den: BigInt::from(d),
            })
            .collect()
    }
}

impl PartialOrd for CircleElem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Orders by the canonical representative as a rational in (-1/2, 1/2].
impl Ord for CircleElem {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }
}

impl fmt::Display for CircleElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for CircleElem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let num: BigInt = n.parse().map_err(|_| Error::Parse {
            pos: 0,
            msg: format!("bad numerator `{n}`"),
        })?;
        let den: BigInt = d.parse().map_err(|_| Error::Parse {
            pos: n.len() + 1,
            msg: format!("bad denominator `{d}`"),
        })?;
        CircleElem::make(num, den)
    }
}

impl Serialize for CircleElem {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CircleElem {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
