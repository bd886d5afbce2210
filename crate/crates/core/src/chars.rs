//! The torsion character group `Z(b^oo) = U_n Z(b_n)` inside T.
//!
//! A character `k/b_n + Z` acts on the integers by `x -> k*x/b_n + Z`. It is
//! stored at its minimal level: `k` is centered modulo `b_n` and the level is
//! lowered while `q_n` divides `k`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::circle::{centered_residue, CircleElem};
use crate::dseq::DSequence;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Character {
    k: BigInt,
    level: usize,
    base: DSequence,
}

impl Character {
    /// `k/b_level + Z`, reduced to its minimal level.
    pub fn new(base: &DSequence, k: impl Into<BigInt>, level: usize) -> Result<Self> {
        let mut k = centered_residue(&k.into(), &base.term(level)?);
        let mut level = level;
        if k.is_zero() {
            level = 0;
        }
        while level > 0 {
            let q = base.ratio(level)?;
            let (quot, rem) = k.div_rem(&q);
            if !rem.is_zero() {
                break;
            }
            k = quot;
            level -= 1;
        }
        Ok(Character {
            k,
            level,
            base: base.clone(),
        })
    }

    pub fn zero(base: &DSequence) -> Self {
        Character {
            k: BigInt::zero(),
            level: 0,
            base: base.clone(),
        }
    }

    pub fn k(&self) -> &BigInt {
        &self.k
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn base(&self) -> &DSequence {
        &self.base
    }

    fn modulus(&self) -> BigInt {
        self.base
            .term(self.level)
            .expect("level was validated at construction")
    }

    /// The character as a point of T.
    pub fn value(&self) -> CircleElem {
        CircleElem::make(self.k.clone(), self.modulus()).expect("b_n >= 1")
    }

    /// `k*x/b_n + Z`.
    pub fn eval(&self, x: &BigInt) -> CircleElem {
        CircleElem::make(&self.k * x, self.modulus()).expect("b_n >= 1")
    }

    /// Whether `k*x/b_n + Z` lies in `T_m`, without reducing the fraction.
    pub fn eval_in_tm(&self, x: &BigInt, m: u64) -> bool {
        let modulus = self.modulus();
        let r = centered_residue(&(&self.k * x), &modulus);
        r.abs() * 4u32 * m <= modulus
    }

    pub fn eval_in_t_plus(&self, x: &BigInt) -> bool {
        self.eval_in_tm(x, 1)
    }

    fn check_base(&self, other: &Self) -> Result<()> {
        if self.base != other.base {
            return Err(Error::IncompatibleBase(
                self.base.descriptor().into(),
                other.base.descriptor().into(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_base(other)?;
        let level = self.level.max(other.level);
        let top = self.base.term(level)?;
        let k = &self.k * (&top / self.modulus()) + &other.k * (&top / other.modulus());
        Character::new(&self.base, k, level)
    }

    pub fn neg(&self) -> Self {
        Character::new(&self.base, -&self.k, self.level).expect("same level")
    }

    /// Order of the character in T.
    pub fn order(&self) -> BigInt {
        self.value().den().clone()
    }

    pub fn is_zero(&self) -> bool {
        self.k.is_zero()
    }
}

impl PartialEq for Character {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base && self.level == other.level && self.k == other.k
    }
}

impl Eq for Character {}

impl PartialOrd for Character {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Window order: by level, then by centered numerator.
impl Ord for Character {
    fn cmp(&self, other: &Self) -> Ordering {
        self.level
            .cmp(&other.level)
            .then_with(|| self.k.cmp(&other.k))
    }
}

#[derive(Serialize)]
struct CharacterJson {
    #[serde(with = "crate::json::int")]
    k: BigInt,
    level: usize,
    value: CircleElem,
}

impl Serialize for Character {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CharacterJson {
            k: self.k.clone(),
            level: self.level,
            value: self.value(),
        }
        .serialize(s)
    }
}

/// Largest window size [`enum_window`] will materialize.
pub const MAX_WINDOW: u64 = 1 << 24;

/// All `b_n` characters of `Z(b_n)` in window order.
pub fn enum_window(b: &DSequence, n: usize) -> Result<Vec<Character>> {
    let size = b.term(n)?;
    let size_u = size
        .to_u64()
        .filter(|&s| s <= MAX_WINDOW)
        .ok_or_else(|| Error::Precondition(format!("window Z({size}) is too large to enumerate")))?;
    let mut out = Vec::with_capacity(size_u as usize);
    out.push(Character::zero(b));
    for level in 1..=n {
        let bl = b.term(level)?.to_i64().expect("bounded by window size");
        let q = b.ratio(level)?.to_i64().expect("bounded by window size");
        for k in (-(bl - 1) / 2)..=(bl / 2) {
            if k % q != 0 {
                out.push(Character {
                    k: BigInt::from(k),
                    level,
                    base: b.clone(),
                });
            }
        }
    }
    debug_assert_eq!(out.len() as u64, size_u);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn f() -> DSequence {
        DSequence::factorial()
    }

    fn c(n: i64, d: i64) -> CircleElem {
        CircleElem::make(n, d).unwrap()
    }

    #[test]
    fn evaluation() {
        let chi = Character::new(&f(), 1, 2).unwrap();
        assert_eq!(chi.eval(&BigInt::from(4)), c(-1, 3));
        for n in 0..6 {
            let chi = Character::new(&f(), 1, n).unwrap();
            assert!(chi.eval(&f().term(n).unwrap()).is_zero());
        }
        let half = Character::new(&f(), 1, 1).unwrap();
        assert_eq!(half.eval(&BigInt::from(3)), c(1, 2));
    }

    #[test]
    fn reduction_to_minimal_level() {
        // 3/6 = 1/2 drops to level 1; 6/24 = 1/4 stays at level 3 since q_3 = 4 does not divide 6.
        let a = Character::new(&f(), 3, 2).unwrap();
        assert_eq!((a.k().clone(), a.level()), (BigInt::from(1), 1));
        let b = Character::new(&f(), 6, 3).unwrap();
        assert_eq!((b.k().clone(), b.level()), (BigInt::from(6), 3));
        let z = Character::new(&f(), 24, 3).unwrap();
        assert_eq!(z, Character::zero(&f()));
        assert_eq!(Character::new(&f(), 4, 2).unwrap().k(), &BigInt::from(-2));
    }

    #[test]
    fn group_operations() {
        let sixth = Character::new(&f(), 1, 2).unwrap();
        let third = sixth.add(&sixth).unwrap();
        assert_eq!(third.level(), 2);
        assert_eq!(third.value(), c(1, 3));
        assert_eq!(sixth.order(), BigInt::from(6));
        assert!(sixth.add(&sixth.neg()).unwrap().is_zero());
        let other = Character::new(&DSequence::pow(2).unwrap(), 1, 1).unwrap();
        assert!(matches!(sixth.add(&other), Err(Error::IncompatibleBase(..))));
    }

    #[test]
    fn windows() {
        let w1: Vec<CircleElem> = enum_window(&f(), 1).unwrap().iter().map(|x| x.value()).collect();
        assert_eq!(w1, vec![CircleElem::zero(), c(1, 2)]);
        let w2: BTreeSet<CircleElem> =
            enum_window(&f(), 2).unwrap().iter().map(|x| x.value()).collect();
        // Oracle: k/6 for k = 0..5 directly.
        let direct: BTreeSet<CircleElem> = (0..6).map(|k| c(k, 6)).collect();
        assert_eq!(w2, direct);
        assert_eq!(w2.len(), 6);
        for b in [f(), DSequence::pow(3).unwrap()] {
            assert_eq!(enum_window(&b, 0).unwrap(), vec![Character::zero(&b)]);
        }
        // Window order is level first then numerator.
        let w = enum_window(&f(), 3).unwrap();
        let mut sorted = w.clone();
        sorted.sort();
        assert_eq!(w, sorted);
        // Canonical minimal form: rebuilding from (k, level) is idempotent.
        for chi in &w {
            assert_eq!(&Character::new(&f(), chi.k().clone(), chi.level()).unwrap(), chi);
        }
    }

    #[test]
    fn window_nesting_and_tplus_kernel() {
        let r = DSequence::ratios(&[2, 3], true).unwrap();
        for b in [f(), r] {
            for n in 0..5 {
                let small: BTreeSet<CircleElem> =
                    enum_window(&b, n).unwrap().iter().map(|x| x.value()).collect();
                let big: BTreeSet<CircleElem> =
                    enum_window(&b, n + 1).unwrap().iter().map(|x| x.value()).collect();
                assert!(small.is_subset(&big));
                let bn = b.term(n).unwrap();
                for chi in enum_window(&b, n).unwrap() {
                    for t in -20i64..=20 {
                        assert!(chi.eval(&(&bn * t)).is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn json_shape() {
        let chi = Character::new(&f(), 1, 2).unwrap();
        assert_eq!(
            serde_json::to_string(&chi).unwrap(),
            r#"{"k":1,"level":2,"value":"1/6"}"#
        );
    }

    proptest! {
        #[test]
        fn homomorphism(k in -500i64..500, level in 0usize..6, x in -10_000i64..10_000, y in -10_000i64..10_000) {
            let chi = Character::new(&f(), k, level).unwrap();
            let (x, y) = (BigInt::from(x), BigInt::from(y));
            prop_assert_eq!(chi.eval(&(&x + &y)), chi.eval(&x).add(&chi.eval(&y)));
            prop_assert_eq!(chi.eval_in_t_plus(&x), chi.eval(&x).in_t_plus());
        }
    }
}
