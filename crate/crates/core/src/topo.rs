//! Neighborhood membership for the group topologies on the integers built
//! from D-sequences.
//!
//! - `lambda_b`: basis `b_n Z`.
//! - `tau_c`: uniform convergence on `(1/c_j + Z)_j`; the basic neighborhood at
//!   level `m` is `{x : x/c_j + Z in T_m for all j}`.
//! - finite families of `tau_c`: intersections of the above, which are the
//!   basic neighborhoods of a supremum topology that an experiment can exhibit.
//!
//! Every membership predicate is exact. `tau_member` only needs the terms with
//! `c_j <= 4m|x|`, since `|x|/c_j < 1/(4m)` for all the others.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::circle::CircleElem;
use crate::dseq::{is_subsequence_of, DSequence};
use crate::error::{Error, Result};

/// Terms compared when checking that a family member is a subsequence of the base.
pub const SUBSEQUENCE_CHECK_TERMS: usize = 24;

pub fn lambda_member(b: &DSequence, n: usize, x: &BigInt) -> Result<bool> {
    if x.is_zero() {
        return Ok(true);
    }
    Ok(x.is_multiple_of(&b.term(n)?))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TauVerdict {
    pub member: bool,
    /// Largest index `j` that was examined; `None` when nothing needed checking.
    pub cutoff: Option<usize>,
    /// Index whose point `x/c_j + Z` left `T_m`.
    pub failing_index: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failing_value: Option<CircleElem>,
}

pub fn tau_member(c: &DSequence, m: u64, x: &BigInt) -> Result<TauVerdict> {
    if m == 0 {
        return Err(Error::InvalidLevel(0));
    }
    let mut verdict = TauVerdict {
        member: true,
        cutoff: None,
        failing_index: None,
        failing_value: None,
    };
    if x.is_zero() {
        return Ok(verdict);
    }
    let bound = x.abs() * 4u32 * m;
    for j in 0.. {
        if c.last_index().is_some_and(|l| j > l) {
            break;
        }
        let cj = c.term(j)?;
        if cj > bound {
            break;
        }
        verdict.cutoff = Some(j);
        let point = CircleElem::make(x.clone(), cj)?;
        if !point.in_tm(m)? {
            verdict.member = false;
            verdict.failing_index = Some(j);
            verdict.failing_value = Some(point);
            break;
        }
    }
    Ok(verdict)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GammaVerdict {
    pub member: bool,
    pub members: Vec<TauVerdict>,
}

/// Intersection of `tau_{c_i}` neighborhoods at levels `m_i`.
pub fn gamma_member(family: &[(DSequence, u64)], x: &BigInt) -> Result<GammaVerdict> {
    if family.is_empty() {
        return Err(Error::Precondition("family must be non-empty".into()));
    }
    let mut members = Vec::with_capacity(family.len());
    let mut member = true;
    for (c, m) in family {
        let v = tau_member(c, *m, x)?;
        member &= v.member;
        members.push(v);
    }
    Ok(GammaVerdict { member, members })
}

/// A basic neighborhood of 0 in one of the topologies above.
#[derive(Clone, Debug)]
pub enum NeighborhoodKind {
    Lambda { level: usize },
    Tau { c: DSequence, m: u64 },
    Gamma(Vec<(DSequence, u64)>),
}

#[derive(Clone, Debug)]
pub struct NeighborhoodSpec {
    kind: NeighborhoodKind,
    base: DSequence,
}

impl NeighborhoodSpec {
    /// Build a neighborhood; `tau`/`gamma` sequences must be subsequences of
    /// `base` (checked on a prefix of [`SUBSEQUENCE_CHECK_TERMS`] terms).
    pub fn new(base: &DSequence, kind: NeighborhoodKind) -> Result<Self> {
        let check = |c: &DSequence, m: u64| -> Result<()> {
            if m == 0 {
                return Err(Error::InvalidLevel(0));
            }
            if !is_subsequence_of(c, base, SUBSEQUENCE_CHECK_TERMS)? {
                return Err(Error::Precondition(format!("`{c}` is not a subsequence of `{base}`")));
            }
            Ok(())
        };
        match &kind {
            NeighborhoodKind::Lambda { .. } => {}
            NeighborhoodKind::Tau { c, m } => check(c, *m)?,
            NeighborhoodKind::Gamma(fam) => {
                if fam.is_empty() {
                    return Err(Error::Precondition("family must be non-empty".into()));
                }
                for (c, m) in fam {
                    check(c, *m)?;
                }
            }
        }
        Ok(NeighborhoodSpec {
            kind,
            base: base.clone(),
        })
    }

    pub fn kind(&self) -> &NeighborhoodKind {
        &self.kind
    }

    pub fn contains(&self, x: &BigInt) -> Result<bool> {
        match &self.kind {
            NeighborhoodKind::Lambda { level } => lambda_member(&self.base, *level, x),
            NeighborhoodKind::Tau { c, m } => Ok(tau_member(c, *m, x)?.member),
            NeighborhoodKind::Gamma(fam) => Ok(gamma_member(fam, x)?.member),
        }
    }
}

/// Outcome of checking eventual divisibility by `b_n` on a finite prefix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum NullCertificate {
    /// `b_n | x_m` for all `from <= m < horizon`.
    Certified { level: usize, from: usize, horizon: usize },
    /// The last element violates divisibility, so no tail is certified.
    Failed { level: usize, latest_violation: usize, horizon: usize },
}

impl NullCertificate {
    pub fn is_certified(&self) -> bool {
        matches!(self, NullCertificate::Certified { .. })
    }
}

/// Least `M` with `b_n | x_m` for every `m >= M` inside the prefix.
pub fn null_prefix_certificate(b: &DSequence, xs: &[BigInt], n: usize) -> Result<NullCertificate> {
    let bn = b.term(n)?;
    let horizon = xs.len();
    let latest = xs.iter().rposition(|x| !x.is_multiple_of(&bn));
    Ok(match latest {
        Some(i) if i + 1 == horizon => NullCertificate::Failed {
            level: n,
            latest_violation: i,
            horizon,
        },
        Some(i) => NullCertificate::Certified {
            level: n,
            from: i + 1,
            horizon,
        },
        None => NullCertificate::Certified {
            level: n,
            from: 0,
            horizon,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dseq::subsequence;
    use proptest::prelude::*;

    fn f() -> DSequence {
        DSequence::factorial()
    }

    fn r23() -> DSequence {
        DSequence::ratios(&[2, 3], true).unwrap()
    }

    fn big(x: i64) -> BigInt {
        BigInt::from(x)
    }

    /// Membership checked against the first `len` terms with no cutoff.
    fn tau_brute(c: &DSequence, m: u64, x: i64, len: usize) -> bool {
        (0..len).all(|j| {
            CircleElem::make(big(x), c.term(j).unwrap())
                .unwrap()
                .in_tm(m)
                .unwrap()
        })
    }

    #[test]
    fn lambda_examples() {
        assert!(lambda_member(&f(), 2, &big(12)).unwrap());
        assert!(!lambda_member(&f(), 3, &big(12)).unwrap());
        for x in -5..5 {
            assert!(lambda_member(&r23(), 0, &big(x)).unwrap());
        }
    }

    #[test]
    fn tau_examples() {
        let v = tau_member(&f(), 1, &big(1)).unwrap();
        assert!(!v.member);
        assert_eq!(v.failing_index, Some(1));
        assert!(tau_member(&f(), 3, &big(0)).unwrap().member);
        let v = tau_member(&f(), 1, &big(24)).unwrap();
        assert!(v.member);
        // c_j <= 96 are 1, 2, 6, 24.
        assert_eq!(v.cutoff, Some(3));
        assert!(tau_member(&f(), 0, &big(1)).is_err());
    }

    #[test]
    fn gamma_examples() {
        let fam = vec![(f(), 2)];
        for x in -30..30 {
            assert_eq!(
                gamma_member(&fam, &big(x)).unwrap().member,
                tau_member(&f(), 2, &big(x)).unwrap().member
            );
        }
        assert!(gamma_member(&[(f(), 1), (r23(), 4)], &big(0)).unwrap().member);
        assert!(gamma_member(&[], &big(1)).is_err());
    }

    #[test]
    fn neighborhood_specs() {
        let b = r23();
        let c = subsequence(&b, &[0, 2, 5, 9]).unwrap();
        let n = NeighborhoodSpec::new(&b, NeighborhoodKind::Tau { c: c.clone(), m: 1 }).unwrap();
        assert!(n.contains(&big(0)).unwrap());
        assert!(NeighborhoodSpec::new(&b, NeighborhoodKind::Tau { c: f(), m: 1 }).is_err());
        let l = NeighborhoodSpec::new(&b, NeighborhoodKind::Lambda { level: 2 }).unwrap();
        assert!(l.contains(&big(12)).unwrap());
        assert!(!l.contains(&big(3)).unwrap());
        assert!(NeighborhoodSpec::new(&b, NeighborhoodKind::Gamma(vec![])).is_err());
    }

    #[test]
    fn null_certificates() {
        let b = r23();
        let xs = b.terms(20).unwrap();
        for n in 0..=10 {
            assert_eq!(
                null_prefix_certificate(&b, &xs, n).unwrap(),
                NullCertificate::Certified { level: n, from: n, horizon: 21 }
            );
        }
        let zeros = vec![BigInt::zero(); 10];
        assert_eq!(
            null_prefix_certificate(&b, &zeros, 4).unwrap(),
            NullCertificate::Certified { level: 4, from: 0, horizon: 10 }
        );
        let ones = vec![big(1); 10];
        assert_eq!(
            null_prefix_certificate(&b, &ones, 1).unwrap(),
            NullCertificate::Failed { level: 1, latest_violation: 9, horizon: 10 }
        );
    }

    // For each level n, c = b and m = max_{j<=n} q_j give tau(c, m) ⊆ b_n Z.
    #[test]
    fn tau_refines_lambda() {
        for b in [f(), r23()] {
            for n in 1..=4 {
                let m = (1..=n)
                    .map(|j| u64::try_from(b.ratio(j).unwrap()).unwrap())
                    .max()
                    .unwrap();
                for x in -1000..=1000 {
                    if tau_member(&b, m, &big(x)).unwrap().member {
                        assert!(lambda_member(&b, n, &big(x)).unwrap(), "b={b} n={n} x={x}");
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn cutoff_matches_brute_force(x in -3000i64..3000, m in 1u64..6) {
            for c in [f(), r23(), subsequence(&r23(), &[0, 1, 3, 6, 10, 15]).unwrap()] {
                let len = c.len().unwrap_or(30);
                prop_assert_eq!(tau_member(&c, m, &big(x)).unwrap().member, tau_brute(&c, m, x, len));
            }
        }

        #[test]
        fn monotone_and_symmetric(x in -3000i64..3000, m in 1u64..6, extra in 0u64..4) {
            let c = f();
            if tau_member(&c, m + extra, &big(x)).unwrap().member {
                prop_assert!(tau_member(&c, m, &big(x)).unwrap().member);
            }
            prop_assert_eq!(
                tau_member(&c, m, &big(x)).unwrap().member,
                tau_member(&c, m, &big(-x)).unwrap().member
            );
            prop_assert_eq!(
                lambda_member(&r23(), 3, &big(x)).unwrap(),
                lambda_member(&r23(), 3, &big(-x)).unwrap()
            );
        }
    }
}
