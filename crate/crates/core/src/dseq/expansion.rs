//! Balanced mixed-radix digits `L = sum k_j b_j` with
//! `k_j in (-q_{j+1}/2, q_{j+1}/2]`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::DSequence;
use crate::circle::centered_residue;
use crate::error::{Error, Result};

/// Extra steps allowed once the remainder has settled at -1 over a tail of
/// ratio 2 whose continuation the source cannot describe.
const SETTLED_STEP_CAP: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigitExpansion {
    digits: Vec<BigInt>,
    base: DSequence,
    unique: Option<bool>,
    terminal_borrow: bool,
}

#[derive(Serialize)]
struct ExpansionJson<'a> {
    #[serde(with = "crate::json::int_vec")]
    digits: &'a [BigInt],
    dseq: &'a str,
    unique: Option<bool>,
    terminal_borrow: bool,
}

impl Serialize for DigitExpansion {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ExpansionJson {
            digits: &self.digits,
            dseq: self.base.descriptor(),
            unique: self.unique,
            terminal_borrow: self.terminal_borrow,
        }
        .serialize(s)
    }
}

impl DigitExpansion {
    /// Wrap a digit list without checking it; see [`expansion_value`].
    pub fn from_digits(base: &DSequence, digits: Vec<BigInt>) -> Self {
        let terminal_borrow = is_terminal_borrow(base, &digits);
        DigitExpansion {
            digits,
            base: base.clone(),
            unique: base.infinitely_many_non_two_ratios(),
            terminal_borrow,
        }
    }

    pub fn digits(&self) -> &[BigInt] {
        &self.digits
    }

    pub fn base(&self) -> &DSequence {
        &self.base
    }

    /// `Some(true)` when the sequence has infinitely many ratios other than 2,
    /// which makes the expansion the unique one; `None` when undecidable.
    pub fn unique(&self) -> Option<bool> {
        self.unique
    }

    /// The leading digit is the `-1` closing an all-2 tail.
    pub fn terminal_borrow(&self) -> bool {
        self.terminal_borrow
    }

    /// Partial sums `S_n = sum_{j<=n} k_j b_j`.
    pub fn partial_sums(&self) -> Result<Vec<BigInt>> {
        let mut acc = BigInt::zero();
        let mut out = Vec::with_capacity(self.digits.len());
        for (j, k) in self.digits.iter().enumerate() {
            acc += k * self.base.term(j)?;
            out.push(acc.clone());
        }
        Ok(out)
    }

    /// First `n` with `|S_n| > b_{n+1}/2`, together with `S_n`.
    pub fn partial_sum_violation(&self) -> Result<Option<(usize, BigInt)>> {
        for (n, s) in self.partial_sums()?.into_iter().enumerate() {
            if s.abs() * 2 > self.base.term(n + 1)? {
                return Ok(Some((n, s)));
            }
        }
        Ok(None)
    }

    /// First `n` with `|S_n| >= b_{n+1}`.
    pub fn strict_partial_sum_violation(&self) -> Result<Option<(usize, BigInt)>> {
        for (n, s) in self.partial_sums()?.into_iter().enumerate() {
            if s.abs() >= self.base.term(n + 1)? {
                return Ok(Some((n, s)));
            }
        }
        Ok(None)
    }

    /// First position whose digit leaves `(-q_{j+1}/2, q_{j+1}/2]`.
    pub fn digit_bound_violation(&self) -> Result<Option<usize>> {
        for (j, k) in self.digits.iter().enumerate() {
            if !digit_in_bounds(k, &self.base.ratio(j + 1)?) {
                return Ok(Some(j));
            }
        }
        Ok(None)
    }
}

fn digit_in_bounds(k: &BigInt, q: &BigInt) -> bool {
    let twice = k * 2;
    twice > -q && &twice <= q
}

fn is_terminal_borrow(base: &DSequence, digits: &[BigInt]) -> bool {
    let Some(last) = digits.last() else {
        return false;
    };
    let n = digits.len() - 1;
    *last == -BigInt::one()
        && base.ratio(n + 1).is_ok_and(|q| q == BigInt::from(2))
        && base.tail_all_twos_after(n) == Some(true)
}

/// Greedy centered-residue expansion of `value`.
///
/// `k_j` is the residue of `r_j` modulo `q_{j+1}` in `(-q/2, q/2]` and
/// `r_{j+1} = (r_j - k_j)/q_{j+1}`, stopping at `r = 0`. Over a tail of ratios
/// all equal to 2 a negative remainder settles at -1 forever; the expansion is
/// then closed with a single leading digit -1 (two's complement form).
pub fn expand(b: &DSequence, value: &BigInt) -> Result<DigitExpansion> {
    let mut r = value.clone();
    let mut digits = Vec::new();
    let minus_one = -BigInt::one();
    let two = BigInt::from(2);
    let mut settled = 0usize;
    while !r.is_zero() {
        let j = digits.len();
        let q = b.ratio(j + 1)?;
        if r == minus_one && q == two {
            if b.tail_all_twos_after(j) == Some(true) {
                digits.push(minus_one);
                break;
            }
            settled += 1;
            if settled > SETTLED_STEP_CAP {
                return Err(Error::Horizon(format!(
                    "remainder stuck at -1 over {SETTLED_STEP_CAP} ratios equal to 2"
                )));
            }
        }
        let k = centered_residue(&r, &q);
        r = (&r - &k) / &q;
        digits.push(k);
    }
    Ok(DigitExpansion::from_digits(b, digits))
}

/// `sum k_j b_j` after validating the digit bounds and a nonzero leading digit.
pub fn expansion_value(d: &DigitExpansion) -> Result<BigInt> {
    if let Some(last) = d.digits.last() {
        if last.is_zero() {
            return Err(Error::InvalidExpansion("leading digit is zero".into()));
        }
    }
    let n = d.digits.len();
    for (j, k) in d.digits.iter().enumerate() {
        let q = d.base.ratio(j + 1)?;
        if digit_in_bounds(k, &q) {
            continue;
        }
        if j + 1 == n && d.terminal_borrow {
            continue;
        }
        return Err(Error::InvalidExpansion(format!(
            "digit k_{j} = {k} outside (-{q}/2, {q}/2]"
        )));
    }
    let mut acc = BigInt::zero();
    for (j, k) in d.digits.iter().enumerate() {
        acc += k * d.base.term(j)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn digits(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn r23() -> DSequence {
        DSequence::ratios(&[2, 3], true).unwrap()
    }

    /// Every tuple inside the digit bounds over `q_1..q_len`, with its value.
    fn all_bounded_tuples(b: &DSequence, len: usize) -> Vec<(Vec<i64>, i64)> {
        let mut out = vec![(Vec::new(), 0i64)];
        for j in 0..len {
            let q: i64 = b.ratio(j + 1).unwrap().try_into().unwrap();
            let bj: i64 = b.term(j).unwrap().try_into().unwrap();
            let lo = -(q - 1) / 2;
            let mut next = Vec::new();
            for (t, v) in &out {
                for k in lo..=q / 2 {
                    let mut t2 = t.clone();
                    t2.push(k);
                    next.push((t2, v + k * bj));
                }
            }
            out = next;
        }
        out
    }

    #[test]
    fn factorial_ten() {
        let f = DSequence::factorial();
        let e = expand(&f, &BigInt::from(10)).unwrap();
        assert_eq!(e.digits(), digits(&[0, -1, 2]).as_slice());
        assert_eq!(expansion_value(&e).unwrap(), BigInt::from(10));
        // Brute force: (0,-1,2) is the only bounded tuple of length 3 worth 10.
        let hits: Vec<_> = all_bounded_tuples(&f, 3)
            .into_iter()
            .filter(|(_, v)| *v == 10)
            .collect();
        assert_eq!(hits, vec![(vec![0, -1, 2], 10)]);
    }

    #[test]
    fn zero_and_one() {
        for b in [DSequence::factorial(), r23(), DSequence::pow(2).unwrap()] {
            assert!(expand(&b, &BigInt::zero()).unwrap().digits().is_empty());
            assert_eq!(expand(&b, &BigInt::one()).unwrap().digits(), digits(&[1]).as_slice());
            let empty = DigitExpansion::from_digits(&b, vec![]);
            assert_eq!(expansion_value(&empty).unwrap(), BigInt::zero());
        }
    }

    #[test]
    fn value_rejects_bad_digits() {
        let f = DSequence::factorial();
        let bad = DigitExpansion::from_digits(&f, digits(&[-1, 0, 1]));
        assert!(matches!(expansion_value(&bad), Err(Error::InvalidExpansion(_))));
        let lead0 = DigitExpansion::from_digits(&f, digits(&[1, 0]));
        assert!(matches!(expansion_value(&lead0), Err(Error::InvalidExpansion(_))));
        let ok = DigitExpansion::from_digits(&f, digits(&[1, 1, -1]));
        assert_eq!(expansion_value(&ok).unwrap(), BigInt::from(-3));
    }

    #[test]
    fn all_two_tail_negative_values() {
        let p2 = DSequence::pow(2).unwrap();
        let e = expand(&p2, &BigInt::from(-1)).unwrap();
        assert_eq!(e.digits(), digits(&[-1]).as_slice());
        assert!(e.terminal_borrow());
        assert_eq!(e.unique(), Some(false));
        let e = expand(&p2, &BigInt::from(-3)).unwrap();
        assert_eq!(e.digits(), digits(&[1, 0, -1]).as_slice());
        assert_eq!(expansion_value(&e).unwrap(), BigInt::from(-3));
        assert_eq!(e.digit_bound_violation().unwrap(), Some(2));
        // Unknown tail: the step cap turns into a horizon error.
        let twos = DSequence::from_ratio_fn("two", |_| BigInt::from(2));
        assert!(matches!(expand(&twos, &BigInt::from(-5)), Err(Error::Horizon(_))));
    }

    #[test]
    fn ratios_23_minus_three_breaks_partial_sum_bound() {
        // L = -3 has no digit tuple meeting both bounds: S_1 is forced to 3 and
        // S_2 in {3, 9} cannot be -3 mod 12 with |S_2| <= 6.
        let b = r23();
        let e = expand(&b, &BigInt::from(-3)).unwrap();
        assert_eq!(e.digits(), digits(&[1, 1, 1, -1]).as_slice());
        assert_eq!(e.digit_bound_violation().unwrap(), None);
        assert_eq!(e.partial_sum_violation().unwrap(), Some((2, BigInt::from(9))));
        assert_eq!(e.strict_partial_sum_violation().unwrap(), None);
        let admissible = all_bounded_tuples(&b, 8)
            .into_iter()
            .filter(|(t, v)| {
                *v == -3 && {
                    let mut s = 0i64;
                    t.iter().enumerate().all(|(n, k)| {
                        s += k * i64::try_from(b.term(n).unwrap()).unwrap();
                        2 * s.abs() <= i64::try_from(b.term(n + 1).unwrap()).unwrap()
                    })
                }
            })
            .count();
        assert_eq!(admissible, 0);
    }

    #[test]
    fn digit_bounds_only_uniqueness_oracle() {
        // With the digit bounds alone every |L| <= 500 has exactly one tuple of
        // length 8 over (2,3)-repeat, and it is the greedy one.
        let b = r23();
        let mut found: std::collections::HashMap<i64, Vec<Vec<i64>>> = Default::default();
        for (t, v) in all_bounded_tuples(&b, 8) {
            if v.abs() <= 500 {
                found.entry(v).or_default().push(t);
            }
        }
        for l in -500i64..=500 {
            let hits = &found[&l];
            assert_eq!(hits.len(), 1, "L = {l}");
            let mut want = hits[0].clone();
            while want.last() == Some(&0) {
                want.pop();
            }
            let got: Vec<i64> = expand(&b, &BigInt::from(l))
                .unwrap()
                .digits()
                .iter()
                .map(|d| i64::try_from(d).unwrap())
                .collect();
            assert_eq!(got, want, "L = {l}");
        }
    }

    proptest! {
        #[test]
        fn round_trip_and_digit_bounds(l in -1_000_000_000i64..1_000_000_000) {
            for b in [DSequence::factorial(), r23(), DSequence::primorial()] {
                let e = expand(&b, &BigInt::from(l)).unwrap();
                prop_assert_eq!(expansion_value(&e).unwrap(), BigInt::from(l));
                prop_assert_eq!(e.digit_bound_violation().unwrap(), None);
                prop_assert_eq!(e.strict_partial_sum_violation().unwrap(), None);
                prop_assert_eq!(e.unique(), Some(true));
            }
        }

        #[test]
        fn pow2_round_trip(l in -1_000_000i64..1_000_000) {
            let p2 = DSequence::pow(2).unwrap();
            let e = expand(&p2, &BigInt::from(l)).unwrap();
            prop_assert_eq!(expansion_value(&e).unwrap(), BigInt::from(l));
            prop_assert_eq!(e.terminal_borrow(), l < 0);
        }
    }
}
