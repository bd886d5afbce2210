//! Killing a `lambda_b`-null sequence: a subsequence `c` of `b` whose
//! topology `tau_c` keeps `x_m` away from 0 while staying compatible.
//!
//! Round `j` picks `(n_j, m_j)` with `b_{n_j} | x_{m_j}` and
//! `b_{n_j+1} ∤ x_{m_j}`; then `x_{m_j}/b_{n_j+1} + Z = k/q_{n_j+1} + Z` for the
//! digit `k = k_{n_j} != 0`, which lies outside `T_L` when every ratio is at
//! most `L`. Successive rounds keep `n_{j+1} - n_j > j`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::circle::{centered_residue, CircleElem};
use crate::dseq::{is_basic, subsequence, DSequence};
use crate::error::{Error, Result};
use crate::graev::declared_ratio_bound;
use crate::topo::{null_prefix_certificate, tau_member, NullCertificate, TauVerdict};

/// Levels at which the input is checked to be `lambda_b`-null.
pub const NULL_CHECK_LEVELS: usize = 6;
/// Ratios checked for primality when `basic` is not declared.
pub const BASIC_CHECK_TERMS: usize = 64;
pub const DEFAULT_HORIZON: usize = 64;

#[derive(Clone, Debug)]
pub enum Xs {
    /// `x_m = b_m`.
    Terms,
    List(Vec<BigInt>),
}

impl Xs {
    fn prefix(&self, b: &DSequence, horizon: usize) -> Result<Vec<BigInt>> {
        match self {
            Xs::Terms => {
                let upto = match b.last_index() {
                    Some(l) => l.min(horizon.saturating_sub(1)),
                    None => horizon.saturating_sub(1),
                };
                b.terms(upto)
            }
            Xs::List(v) => Ok(v.iter().take(horizon).cloned().collect()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KillRound {
    pub n: usize,
    pub m: usize,
    #[serde(with = "crate::json::int")]
    pub x: BigInt,
    /// `x_m / b_{n+1} + Z`.
    pub witness: CircleElem,
    /// The digit `k_n` of `x_m`.
    #[serde(with = "crate::json::int")]
    pub digit: BigInt,
}

#[derive(Clone, Debug, Serialize)]
pub struct KillerOutput {
    pub rounds: Vec<KillRound>,
    #[serde(serialize_with = "terms_of")]
    pub c: DSequence,
    pub bound: u64,
    pub horizon: usize,
    pub null_checks: Vec<NullCertificate>,
    /// `tau_member(c, L, x_{m_j})` for every round.
    pub tau_checks: Vec<TauVerdict>,
}

fn terms_of<S: serde::Serializer>(c: &DSequence, s: S) -> std::result::Result<S::Ok, S::Error> {
    let last = c.last_index().expect("killer output is finite");
    let terms = c.terms(last).map_err(serde::ser::Error::custom)?;
    crate::json::int_vec::serialize(&terms, s)
}

fn check_hypotheses(b: &DSequence) -> Result<u64> {
    let bound = declared_ratio_bound(b)? as u64;
    if !b.basic_declared() {
        let v = is_basic(b, BASIC_CHECK_TERMS)?;
        if !v.basic {
            return Err(Error::Precondition(format!(
                "`{b}` is not basic (q_{} is composite)",
                v.first_composite.expect("non-basic verdict names a ratio")
            )));
        }
    }
    Ok(bound)
}

fn check_input(b: &DSequence, xs: &[BigInt]) -> Result<Vec<NullCertificate>> {
    if xs.len() < 2 {
        return Err(Error::Precondition("sequence prefix needs at least two elements".into()));
    }
    let tail = &xs[xs.len() / 2..];
    if tail.iter().all(|x| x == &tail[0]) {
        return Err(Error::Precondition(
            "sequence is constant on the second half of its prefix".into(),
        ));
    }
    let levels = match b.last_index() {
        Some(l) => NULL_CHECK_LEVELS.min(l),
        None => NULL_CHECK_LEVELS,
    };
    let mut checks = Vec::with_capacity(levels + 1);
    for n in 0..=levels {
        let cert = null_prefix_certificate(b, xs, n)?;
        if !cert.is_certified() {
            return Err(Error::Precondition(format!(
                "sequence is not b_{n}-divisible at the end of its prefix"
            )));
        }
        checks.push(cert);
    }
    Ok(checks)
}

/// First `(n, m)` with `n >= from`, `b_n | x_m`, `b_{n+1} ∤ x_m`.
fn find_round(b: &DSequence, xs: &[BigInt], from: usize) -> Result<Option<(usize, usize)>> {
    let largest = xs.iter().map(|x| x.abs()).max().unwrap_or_default();
    let mut n = from;
    loop {
        if b.last_index().is_some_and(|l| n + 1 > l) {
            return Ok(None);
        }
        let bn = b.term(n)?;
        if bn > largest {
            return Ok(None);
        }
        let next = b.term(n + 1)?;
        let hit = xs
            .iter()
            .position(|x| !x.is_zero() && x.is_multiple_of(&bn) && !x.is_multiple_of(&next));
        if let Some(m) = hit {
            return Ok(Some((n, m)));
        }
        n += 1;
    }
}

pub fn kill_sequence(b: &DSequence, xs: &Xs, rounds: usize, horizon: usize) -> Result<KillerOutput> {
    if rounds == 0 {
        return Err(Error::Precondition("at least one round is required".into()));
    }
    let bound = check_hypotheses(b)?;
    let prefix = xs.prefix(b, horizon)?;
    let null_checks = check_input(b, &prefix)?;

    let mut out = Vec::with_capacity(rounds);
    let mut from = 1;
    for j in 1..=rounds {
        let Some((n, m)) = find_round(b, &prefix, from)? else {
            return Err(Error::Horizon(format!(
                "no (n, m) with n >= {from} in the first {} elements (round {j})",
                prefix.len()
            )));
        };
        let x = prefix[m].clone();
        let next = b.term(n + 1)?;
        let witness = CircleElem::make(x.clone(), next.clone())?;
        let digit = centered_residue(&(&x / b.term(n)?), &b.ratio(n + 1)?);
        out.push(KillRound {
            n,
            m,
            x,
            witness,
            digit,
        });
        from = n + j + 1;
    }

    let idx: Vec<usize> = out.iter().map(|r| r.n + 1).collect();
    let c = subsequence(b, &idx)?;
    let tau_checks = out
        .iter()
        .map(|r| tau_member(&c, bound, &r.x))
        .collect::<Result<Vec<_>>>()?;
    let output = KillerOutput {
        rounds: out,
        c,
        bound,
        horizon: prefix.len(),
        null_checks,
        tau_checks,
    };
    output.verify(b)?;
    Ok(output)
}

impl KillerOutput {
    /// Independent re-check of gaps, divisibility, witnesses and `c`.
    pub fn verify(&self, b: &DSequence) -> Result<()> {
        let fail = |msg: String| Err(Error::Precondition(format!("killer output invalid: {msg}")));
        for (j, w) in self.rounds.windows(2).enumerate() {
            if w[1].n - w[0].n <= j + 1 {
                return fail(format!("gap n_{} - n_{} <= {}", j + 2, j + 1, j + 1));
            }
        }
        for (j, r) in self.rounds.iter().enumerate() {
            let (bn, next) = (b.term(r.n)?, b.term(r.n + 1)?);
            if !r.x.is_multiple_of(&bn) || r.x.is_multiple_of(&next) {
                return fail(format!("round {} breaks the divisibility pattern", j + 1));
            }
            if r.witness != CircleElem::make(r.x.clone(), next)? {
                return fail(format!("round {} witness mismatch", j + 1));
            }
            if r.witness.in_tm(self.bound)? {
                return fail(format!("round {} witness {} lies in T_{}", j + 1, r.witness, self.bound));
            }
            let q = b.ratio(r.n + 1)?;
            if r.digit.is_zero() || r.witness != CircleElem::make(r.digit.clone(), q)? {
                return fail(format!("round {} digit {} does not give the witness", j + 1, r.digit));
            }
            if self.c.term(j + 1)? != b.term(r.n + 1)? {
                return fail(format!("c_{} is not b_{}", j + 1, r.n + 1));
            }
        }
        if self.c.term(0)? != BigInt::from(1) {
            return fail("c_0 must be 1".into());
        }
        if let Some(j) = self.tau_checks.iter().position(|t| t.member) {
            return fail(format!("x_{} is still in the tau_c neighborhood", self.rounds[j].m));
        }
        Ok(())
    }

    /// `(n_j, m_j)` pairs.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.rounds.iter().map(|r| (r.n, r.m)).collect()
    }

    /// Smallest ratio `c_{j+1}/c_j` between consecutive killed terms (`j >= 1`).
    pub fn min_block_ratio(&self) -> Option<u64> {
        let last = self.c.last_index()?;
        (1..last)
            .filter_map(|j| {
                let (a, b) = (self.c.term(j).ok()?, self.c.term(j + 1).ok()?);
                (b / a).to_u64()
            })
            .min()
    }
}
