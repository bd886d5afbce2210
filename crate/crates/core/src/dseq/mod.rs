//! D-sequences: divisibility chains `1 = b_0 | b_1 | b_2 | ...` with
//! `q_n = b_n / b_{n-1} >= 2`.
//!
//! A [`DSequence`] is a cheap handle around a ratio source and a lazily
//! extended cache of terms. The cache only ever grows, so earlier terms never
//! change once computed. Tail properties (bounded ratios, `b_{n+l}/b_n -> oo`)
//! are asserted globally only when the sequence carries a [`GrowthTag`];
//! otherwise the predicates below answer for the checked prefix only.

mod expansion;
mod grammar;
mod primes;

use std::fmt;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

pub use expansion::{expand, expansion_value, DigitExpansion};
pub use grammar::parse_dseq;
pub use primes::is_prime;

/// Declared asymptotic class of a sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrowthTag {
    /// `sup q_n < oo`.
    Bounded,
    /// `q_n -> oo`.
    RatioToInfinity,
    /// `b_{n+l}/b_n -> oo` for the given `l`.
    BlockToInfinity(usize),
}

impl GrowthTag {
    /// Whether this declaration implies `b_{n+l}/b_n -> oo`.
    pub fn implies_block(self, l: usize) -> bool {
        match self {
            GrowthTag::Bounded => false,
            GrowthTag::RatioToInfinity => l >= 1,
            GrowthTag::BlockToInfinity(l0) => l >= l0,
        }
    }

    fn conflicts_with(self, known: GrowthTag) -> bool {
        matches!(
            (self, known),
            (GrowthTag::Bounded, GrowthTag::RatioToInfinity)
                | (GrowthTag::Bounded, GrowthTag::BlockToInfinity(_))
                | (GrowthTag::RatioToInfinity, GrowthTag::Bounded)
                | (GrowthTag::BlockToInfinity(_), GrowthTag::Bounded)
        )
    }
}

impl fmt::Display for GrowthTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrowthTag::Bounded => f.write_str("bounded"),
            GrowthTag::RatioToInfinity => f.write_str("dinf"),
            GrowthTag::BlockToInfinity(l) => write!(f, "dinf-l:{l}"),
        }
    }
}

/// An index sequence `(n_i)_{i >= 1}`: an explicit prefix followed by an
/// optional affine rule `n_i = a*i + c` for positions beyond the prefix.
///
/// Without a rule the sequence is finite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexSeq {
    prefix: Vec<usize>,
    tail: Option<(usize, i64)>,
}

impl IndexSeq {
    pub fn finite(prefix: Vec<usize>) -> Self {
        IndexSeq { prefix, tail: None }
    }

    /// `n_i = a*i + c` beyond `prefix`. Every tail value must be non-negative.
    pub fn affine(prefix: Vec<usize>, a: usize, c: i64) -> Result<Self> {
        let first = prefix.len() as i64 + 1;
        if a as i64 * first + c < 0 {
            return Err(Error::InvalidIndices(format!(
                "affine rule {a}*i{c:+} is negative at i = {first}"
            )));
        }
        Ok(IndexSeq {
            prefix,
            tail: Some((a, c)),
        })
    }

    /// The identity rule `n_i = i`.
    pub fn identity() -> Self {
        IndexSeq {
            prefix: Vec::new(),
            tail: Some((1, 0)),
        }
    }

    pub fn prefix(&self) -> &[usize] {
        &self.prefix
    }

    pub fn tail(&self) -> Option<(usize, i64)> {
        self.tail
    }

    /// Number of positions, `None` when infinite.
    pub fn len(&self) -> Option<usize> {
        match self.tail {
            Some(_) => None,
            None => Some(self.prefix.len()),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    /// `n_i` for 1-based position `i`.
    pub fn get(&self, i: usize) -> Option<usize> {
        if i == 0 {
            return None;
        }
        if i <= self.prefix.len() {
            return Some(self.prefix[i - 1]);
        }
        self.tail
            .map(|(a, c)| (a as i64 * i as i64 + c) as usize)
    }
}

impl fmt::Display for IndexSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.prefix.is_empty() {
            let p: Vec<String> = self.prefix.iter().map(|n| n.to_string()).collect();
            parts.push(format!("prefix:{}", p.join(",")));
        }
        if let Some((a, c)) = self.tail {
            parts.push(format!("affine:{a},{c}"));
        }
        f.write_str(&parts.join(" "))
    }
}

type RatioFn = dyn Fn(usize) -> BigInt + Send + Sync;

enum Source {
    /// `b_n = (n+1)!`, so `q_n = n + 1`.
    Factorial,
    Pow(BigInt),
    /// `q_n` is the n-th prime.
    Primorial,
    Ratios { list: Vec<BigInt>, repeat: bool },
    /// `c_0 = 1`, `c_j = base_{idx_j}`.
    Subsequence { base: DSequence, idx: IndexSeq },
    Custom(Box<RatioFn>),
}

struct Inner {
    source: Source,
    growth: Option<GrowthTag>,
    basic_declared: bool,
    descriptor: String,
    cache: RwLock<Vec<BigInt>>,
}

/// A D-sequence handle. Clones share the term cache.
#[derive(Clone)]
pub struct DSequence {
    inner: Arc<Inner>,
}

impl fmt::Debug for DSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DSequence({})", self.inner.descriptor)
    }
}

impl fmt::Display for DSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.inner.descriptor)
    }
}

/// Sequences are equal when their canonical descriptors are equal.
impl PartialEq for DSequence {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.descriptor == other.inner.descriptor
    }
}

impl Eq for DSequence {}

impl DSequence {
    fn build(source: Source, growth: Option<GrowthTag>, basic: bool, descriptor: String) -> Self {
        DSequence {
            inner: Arc::new(Inner {
                source,
                growth,
                basic_declared: basic,
                descriptor,
                cache: RwLock::new(vec![BigInt::one()]),
            }),
        }
    }

    pub fn factorial() -> Self {
        Self::build(Source::Factorial, None, false, "factorial".into())
    }

    pub fn pow(k: u64) -> Result<Self> {
        if k < 2 {
            return Err(Error::MalformedSequence {
                index: 1,
                ratio: k.to_string(),
            });
        }
        Ok(Self::build(
            Source::Pow(BigInt::from(k)),
            None,
            false,
            format!("pow:{k}"),
        ))
    }

    pub fn primorial() -> Self {
        Self::build(Source::Primorial, None, false, "primorial".into())
    }

    /// Ratios `q_1, q_2, ...` from a list, cycled when `repeat` is set.
    pub fn ratios(list: &[u64], repeat: bool) -> Result<Self> {
        if list.is_empty() {
            return Err(Error::Parse {
                pos: 0,
                msg: "empty ratio list".into(),
            });
        }
        if let Some(i) = list.iter().position(|&q| q < 2) {
            return Err(Error::MalformedSequence {
                index: i + 1,
                ratio: list[i].to_string(),
            });
        }
        let qs: Vec<String> = list.iter().map(|q| q.to_string()).collect();
        let mut d = format!("ratios:{}", qs.join(","));
        if repeat {
            d.push_str(";repeat");
        }
        Ok(Self::build(
            Source::Ratios {
                list: list.iter().map(|&q| BigInt::from(q)).collect(),
                repeat,
            },
            None,
            false,
            d,
        ))
    }

    /// A sequence from a closed-form ratio rule `n -> q_n` (called for `n >= 1`).
    pub fn from_ratio_fn(
        name: &str,
        f: impl Fn(usize) -> BigInt + Send + Sync + 'static,
    ) -> Self {
        Self::build(Source::Custom(Box::new(f)), None, false, format!("fn:{name}"))
    }

    /// Attach a growth declaration, rejecting ones that contradict what the
    /// ratio source is known to do.
    pub fn with_growth(self, tag: GrowthTag) -> Result<Self> {
        if let Some(known) = self.known_growth() {
            if tag.conflicts_with(known) {
                return Err(Error::Precondition(format!(
                    "declared growth `{tag}` contradicts `{self}` which is `{known}`"
                )));
            }
        }
        Ok(self.redeclare(Some(tag), self.inner.basic_declared))
    }

    /// Attach a primality declaration for all ratios.
    pub fn with_basic(self) -> Result<Self> {
        if self.known_basic() == Some(false) {
            return Err(Error::Precondition(format!(
                "`{self}` cannot be declared basic: some ratio is composite"
            )));
        }
        Ok(self.redeclare(self.inner.growth, true))
    }

    fn redeclare(&self, growth: Option<GrowthTag>, basic: bool) -> Self {
        let source = match &self.inner.source {
            Source::Factorial => Source::Factorial,
            Source::Pow(k) => Source::Pow(k.clone()),
            Source::Primorial => Source::Primorial,
            Source::Ratios { list, repeat } => Source::Ratios {
                list: list.clone(),
                repeat: *repeat,
            },
            Source::Subsequence { base, idx } => Source::Subsequence {
                base: base.clone(),
                idx: idx.clone(),
            },
            // A closure cannot be cloned; share it through a term lookup on the original.
            Source::Custom(_) => {
                let orig = self.clone();
                Source::Custom(Box::new(move |n| orig.ratio(n).unwrap_or_else(|_| BigInt::zero())))
            }
        };
        let base = self.base_descriptor();
        let mut d = base.to_string();
        if let Some(g) = growth {
            d.push_str(&format!(" growth={g}"));
        }
        if basic {
            d.push_str(" basic");
        }
        let out = Self::build(source, growth, basic, d);
        // Carry over already computed terms; they are identical by construction.
        let computed = self.inner.cache.read().expect("cache lock").clone();
        *out.inner.cache.write().expect("cache lock") = computed;
        out
    }

    fn base_descriptor(&self) -> &str {
        let d = &self.inner.descriptor;
        let cut = [" growth=", " basic"]
            .iter()
            .filter_map(|t| d.find(t))
            .min()
            .unwrap_or(d.len());
        &d[..cut]
    }

    fn known_growth(&self) -> Option<GrowthTag> {
        match &self.inner.source {
            Source::Factorial | Source::Primorial => Some(GrowthTag::RatioToInfinity),
            Source::Pow(_) => Some(GrowthTag::Bounded),
            Source::Ratios { repeat: true, .. } => Some(GrowthTag::Bounded),
            _ => None,
        }
    }

    fn known_basic(&self) -> Option<bool> {
        match &self.inner.source {
            Source::Factorial => Some(false),
            Source::Primorial => Some(true),
            Source::Pow(k) => is_prime(k).ok(),
            Source::Ratios { list, .. } => {
                let mut all = true;
                for q in list {
                    all &= is_prime(q).ok()?;
                }
                Some(all)
            }
            _ => None,
        }
    }

    /// Declared growth class, falling back to what the source is known to satisfy.
    pub fn growth(&self) -> Option<GrowthTag> {
        self.inner.growth.or_else(|| self.known_growth())
    }

    pub fn declared_growth(&self) -> Option<GrowthTag> {
        self.inner.growth
    }

    pub fn basic_declared(&self) -> bool {
        self.inner.basic_declared
    }

    pub fn descriptor(&self) -> &str {
        &self.inner.descriptor
    }

    /// Number of terms for finite sequences, `None` for infinite ones.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> Option<usize> {
        match &self.inner.source {
            Source::Ratios { list, repeat: false } => Some(list.len() + 1),
            Source::Subsequence { base, idx } => {
                let own = idx.len().map(|n| n + 1);
                match (own, base.len()) {
                    (Some(a), _) => Some(a),
                    (None, Some(_)) => None,
                    (None, None) => None,
                }
            }
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.len().is_some()
    }

    /// Largest valid index, or `None` if infinite.
    pub fn last_index(&self) -> Option<usize> {
        self.len().map(|n| n - 1)
    }

    fn raw_ratio(&self, n: usize, prev: &BigInt) -> Result<BigInt> {
        let q = match &self.inner.source {
            Source::Factorial => BigInt::from(n + 1),
            Source::Pow(k) => k.clone(),
            Source::Primorial => {
                let prev_q = if n == 1 {
                    BigInt::one()
                } else {
                    self.ratio(n - 1)?
                };
                primes::next_prime(&prev_q)?
            }
            Source::Ratios { list, repeat } => {
                if !*repeat && n > list.len() {
                    return Err(Error::OutOfRange {
                        index: n,
                        len: list.len() + 1,
                    });
                }
                list[(n - 1) % list.len()].clone()
            }
            Source::Subsequence { base, idx } => {
                let j = idx.get(n).ok_or(Error::OutOfRange {
                    index: n,
                    len: idx.len().unwrap_or(0) + 1,
                })?;
                let prev_idx = if n == 1 { 0 } else { idx.get(n - 1).unwrap_or(0) };
                if j <= prev_idx {
                    return Err(Error::InvalidIndices(format!(
                        "subsequence indices not strictly increasing at position {n}"
                    )));
                }
                let t = base.term(j)?;
                let (q, rem) = t.div_rem(prev);
                debug_assert!(rem.is_zero());
                q
            }
            Source::Custom(f) => f(n),
        };
        if q < BigInt::from(2) {
            return Err(Error::MalformedSequence {
                index: n,
                ratio: q.to_string(),
            });
        }
        Ok(q)
    }

    /// `b_n`, extending the cache as needed.
    pub fn term(&self, n: usize) -> Result<BigInt> {
        {
            let cache = self.inner.cache.read().expect("cache lock");
            if let Some(t) = cache.get(n) {
                return Ok(t.clone());
            }
        }
        if let Some(len) = self.len() {
            if n >= len {
                return Err(Error::OutOfRange { index: n, len });
            }
        }
        let mut cache = self.inner.cache.write().expect("cache lock");
        while cache.len() <= n {
            let i = cache.len();
            let prev = cache[i - 1].clone();
            // Primorial looks up its own previous ratio; release the lock for it.
            let q = if matches!(self.inner.source, Source::Primorial) {
                drop(cache);
                let q = self.raw_ratio(i, &prev)?;
                cache = self.inner.cache.write().expect("cache lock");
                if cache.len() > i {
                    continue;
                }
                q
            } else {
                self.raw_ratio(i, &prev)?
            };
            cache.push(prev * q);
        }
        Ok(cache[n].clone())
    }

    /// `q_n = b_n / b_{n-1}` for `n >= 1`.
    pub fn ratio(&self, n: usize) -> Result<BigInt> {
        if n == 0 {
            return Err(Error::InvalidIndices("q_0 is undefined".into()));
        }
        if let Source::Primorial = self.inner.source {
            // Avoid recursion through term(): walk primes directly when uncached.
            let cache = self.inner.cache.read().expect("cache lock");
            if cache.len() > n {
                return Ok(&cache[n] / &cache[n - 1]);
            }
            drop(cache);
            let mut p = BigInt::one();
            for _ in 0..n {
                p = primes::next_prime(&p)?;
            }
            return Ok(p);
        }
        let t = self.term(n)?;
        let prev = self.term(n - 1)?;
        Ok(t / prev)
    }

    /// `b_0, ..., b_n`.
    pub fn terms(&self, n: usize) -> Result<Vec<BigInt>> {
        self.term(n)?;
        let cache = self.inner.cache.read().expect("cache lock");
        Ok(cache[..=n].to_vec())
    }

    /// All terms `b_j <= bound`, in order. Finite sequences stop at their end.
    pub fn terms_at_most(&self, bound: &BigInt) -> Result<Vec<BigInt>> {
        let mut out = Vec::new();
        for n in 0.. {
            if self.last_index().is_some_and(|l| n > l) {
                break;
            }
            let t = self.term(n)?;
            if &t > bound {
                break;
            }
            out.push(t);
        }
        Ok(out)
    }

    /// Whether every ratio after position `j` is known to be 2.
    /// `None` when the source cannot tell.
    pub fn tail_all_twos_after(&self, j: usize) -> Option<bool> {
        let two = BigInt::from(2);
        match &self.inner.source {
            Source::Factorial | Source::Primorial => Some(false),
            Source::Pow(k) => Some(*k == two),
            Source::Ratios { list, repeat: true } => Some(list.iter().all(|q| *q == two)),
            Source::Ratios { list, repeat: false } => {
                Some(list.iter().skip(j).all(|q| *q == two))
            }
            _ => None,
        }
    }

    /// Whether `q_{j+1} != 2` holds for infinitely many `j`, when decidable.
    pub fn infinitely_many_non_two_ratios(&self) -> Option<bool> {
        if self.is_finite() {
            return None;
        }
        self.tail_all_twos_after(0).map(|all_two| !all_two)
    }
}

/// Bounded-ratio verdict over `q_1..q_upto`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RatioBound {
    #[serde(with = "crate::json::int")]
    pub prefix_max: BigInt,
    pub checked_upto: usize,
    /// The bound holds for the whole sequence by declaration.
    pub global: bool,
}

pub fn has_bounded_ratios(b: &DSequence, upto: usize) -> Result<RatioBound> {
    let upto = clamp_upto(b, upto.max(1));
    let mut max = BigInt::zero();
    for n in 1..=upto {
        max = max.max(b.ratio(n)?);
    }
    Ok(RatioBound {
        prefix_max: max,
        checked_upto: upto,
        global: b.growth() == Some(GrowthTag::Bounded),
    })
}

fn clamp_upto(b: &DSequence, upto: usize) -> usize {
    match b.last_index() {
        Some(l) => upto.min(l),
        None => upto,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BasicVerdict {
    pub basic: bool,
    pub first_composite: Option<usize>,
    pub checked_upto: usize,
}

/// Primality of `q_1..q_upto`.
pub fn is_basic(b: &DSequence, upto: usize) -> Result<BasicVerdict> {
    let upto = clamp_upto(b, upto.max(1));
    for n in 1..=upto {
        if !is_prime(&b.ratio(n)?)? {
            return Ok(BasicVerdict {
                basic: false,
                first_composite: Some(n),
                checked_upto: upto,
            });
        }
    }
    Ok(BasicVerdict {
        basic: true,
        first_composite: None,
        checked_upto: upto,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockVerdict {
    /// `b_{n+l}/b_n >= threshold` for every `n` in the second half of the checked prefix.
    pub prefix_verdict: bool,
    /// Least `n0` such that the inequality holds for all checked `n >= n0`.
    pub tail_start: Option<usize>,
    pub checked_upto: usize,
    /// The growth declaration asserts `b_{n+l}/b_n -> oo`.
    pub asserted_global: bool,
}

/// Prefix check of `b_{n+l}/b_n >= threshold` over `n + l <= upto`.
pub fn is_dinf_block(
    c: &DSequence,
    l: usize,
    threshold: &BigInt,
    upto: usize,
) -> Result<BlockVerdict> {
    if l == 0 {
        return Err(Error::InvalidLevel(0));
    }
    let upto = clamp_upto(c, upto);
    let asserted_global = c.growth().is_some_and(|g| g.implies_block(l));
    if upto < l {
        return Ok(BlockVerdict {
            prefix_verdict: false,
            tail_start: None,
            checked_upto: upto,
            asserted_global,
        });
    }
    let last_n = upto - l;
    let mut tail_start = None;
    for n in (0..=last_n).rev() {
        if c.term(n + l)? >= c.term(n)? * threshold {
            tail_start = Some(n);
        } else {
            break;
        }
    }
    let half = last_n.div_ceil(2);
    Ok(BlockVerdict {
        prefix_verdict: tail_start.is_some_and(|t| t <= half),
        tail_start,
        checked_upto: upto,
        asserted_global,
    })
}

/// The subsequence of `b` at strictly increasing `indices`, with `b_0 = 1`
/// prepended when index 0 is absent.
pub fn subsequence(b: &DSequence, indices: &[usize]) -> Result<DSequence> {
    if let Some(w) = indices.windows(2).position(|w| w[0] >= w[1]) {
        return Err(Error::InvalidIndices(format!(
            "indices must be strictly increasing (position {})",
            w + 1
        )));
    }
    if let Some(last) = b.last_index() {
        if let Some(&too_big) = indices.iter().find(|&&i| i > last) {
            return Err(Error::OutOfRange {
                index: too_big,
                len: last + 1,
            });
        }
    }
    let rest: Vec<usize> = indices.iter().copied().filter(|&i| i != 0).collect();
    subsequence_by_rule(b, IndexSeq::finite(rest))
}

/// `c_0 = 1`, `c_j = b_{idx_j}` for `j >= 1`.
pub fn subsequence_by_rule(b: &DSequence, idx: IndexSeq) -> Result<DSequence> {
    if idx.get(1) == Some(0) {
        return Err(Error::InvalidIndices(
            "index rule must start above 0 (b_0 is prepended)".into(),
        ));
    }
    let d = format!("sub({};{})", b.base_descriptor(), idx);
    Ok(DSequence::build(
        Source::Subsequence {
            base: b.clone(),
            idx,
        },
        None,
        false,
        d,
    ))
}

/// Prefix check that every term `c_0..c_upto` is a term of `b`.
pub fn is_subsequence_of(c: &DSequence, b: &DSequence, upto: usize) -> Result<bool> {
    let upto = clamp_upto(c, upto);
    let mut j = 0usize;
    for n in 0..=upto {
        let t = c.term(n)?;
        loop {
            if b.last_index().is_some_and(|l| j > l) {
                return Ok(false);
            }
            let bj = b.term(j)?;
            j += 1;
            if bj == t {
                break;
            }
            if bj > t {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Index of the largest term `b_n <= x` (`x >= 1`), i.e. how many terms are
/// needed to express `x`. Returns 0 for `x < 1`.
pub fn index_at_most(b: &DSequence, x: &BigInt) -> Result<usize> {
    let mut n = 0;
    loop {
        if b.last_index().is_some_and(|l| n >= l) {
            return Ok(n);
        }
        if &b.term(n + 1)? > x {
            return Ok(n);
        }
        n += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[u64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn preset_terms() {
        let f = DSequence::factorial();
        assert_eq!(f.terms(4).unwrap(), big(&[1, 2, 6, 24, 120]));
        let r = DSequence::ratios(&[2, 3], true).unwrap();
        assert_eq!(r.term(4).unwrap(), BigInt::from(36));
        assert_eq!(r.terms(4).unwrap(), big(&[1, 2, 6, 12, 36]));
        assert_eq!(DSequence::pow(2).unwrap().term(5).unwrap(), BigInt::from(32));
        assert_eq!(
            DSequence::primorial().terms(4).unwrap(),
            big(&[1, 2, 6, 30, 210])
        );
        for s in [f, r, DSequence::primorial()] {
            assert_eq!(s.term(0).unwrap(), BigInt::one());
        }
    }

    #[test]
    fn malformed_ratios() {
        assert!(matches!(
            DSequence::ratios(&[1, 3], false),
            Err(Error::MalformedSequence { index: 1, .. })
        ));
        let bad = DSequence::from_ratio_fn("bad", |n| BigInt::from(if n == 3 { 1 } else { 2 }));
        assert_eq!(bad.term(2).unwrap(), BigInt::from(4));
        assert!(matches!(
            bad.term(3),
            Err(Error::MalformedSequence { index: 3, .. })
        ));
        assert!(DSequence::pow(1).is_err());
    }

    #[test]
    fn finite_sequences() {
        let r = DSequence::ratios(&[2, 3], false).unwrap();
        assert_eq!(r.len(), Some(3));
        assert_eq!(r.term(2).unwrap(), BigInt::from(6));
        assert_eq!(r.term(3), Err(Error::OutOfRange { index: 3, len: 3 }));
    }

    #[test]
    fn bounded_ratio_examples() {
        let r = DSequence::ratios(&[2, 3], true).unwrap();
        let v = has_bounded_ratios(&r, 10).unwrap();
        assert_eq!(v.prefix_max, BigInt::from(3));
        assert!(v.global);
        let f = has_bounded_ratios(&DSequence::factorial(), 10).unwrap();
        assert_eq!(f.prefix_max, BigInt::from(11));
        assert!(!f.global);
        let p = has_bounded_ratios(&DSequence::pow(2).unwrap(), 5).unwrap();
        assert_eq!(p.prefix_max, BigInt::from(2));
        assert!(p.global);
    }

    #[test]
    fn basic_examples() {
        assert!(is_basic(&DSequence::ratios(&[2, 3], true).unwrap(), 20).unwrap().basic);
        let f = is_basic(&DSequence::factorial(), 20).unwrap();
        assert!(!f.basic);
        assert_eq!(f.first_composite, Some(3));
        assert!(is_basic(&DSequence::pow(2).unwrap(), 20).unwrap().basic);
        assert!(is_basic(&DSequence::primorial(), 12).unwrap().basic);
    }

    #[test]
    fn block_examples() {
        let p2 = DSequence::pow(2).unwrap();
        assert!(!is_dinf_block(&p2, 1, &BigInt::from(3), 20).unwrap().prefix_verdict);
        assert!(is_dinf_block(&p2, 1, &BigInt::from(2), 20).unwrap().prefix_verdict);
        let f = is_dinf_block(&DSequence::factorial(), 1, &BigInt::from(100), 200).unwrap();
        assert!(f.prefix_verdict);
        assert!(f.asserted_global);
        assert_eq!(f.tail_start, Some(98));
        assert!(is_dinf_block(&p2, 0, &BigInt::from(2), 5).is_err());
    }

    #[test]
    fn subsequence_examples() {
        let f = DSequence::factorial();
        let s = subsequence(&f, &[0, 2, 4]).unwrap();
        assert_eq!(s.terms(2).unwrap(), big(&[1, 6, 120]));
        assert_eq!(s.len(), Some(3));
        let r = DSequence::ratios(&[2, 3], true).unwrap();
        let s = subsequence(&r, &[0, 2, 4]).unwrap();
        assert_eq!(s.terms(2).unwrap(), big(&[1, 6, 36]));
        assert_eq!(s.ratio(1).unwrap(), BigInt::from(6));
        assert_eq!(s.ratio(2).unwrap(), BigInt::from(6));
        // 0 absent: prepended.
        let s = subsequence(&r, &[1, 3]).unwrap();
        assert_eq!(s.terms(2).unwrap(), big(&[1, 2, 12]));
        let ident: Vec<usize> = (0..12).collect();
        let s = subsequence(&r, &ident).unwrap();
        assert_eq!(s.terms(11).unwrap(), r.terms(11).unwrap());
        assert!(matches!(
            subsequence(&r, &[0, 3, 2]),
            Err(Error::InvalidIndices(_))
        ));
        assert!(is_subsequence_of(&subsequence(&r, &[0, 2, 5]).unwrap(), &r, 10).unwrap());
        assert!(!is_subsequence_of(&DSequence::pow(3).unwrap(), &r, 3).unwrap());
    }

    #[test]
    fn subsequence_by_affine_rule() {
        let r = DSequence::ratios(&[2, 3], true).unwrap();
        let s = subsequence_by_rule(&r, IndexSeq::affine(vec![], 2, 0).unwrap()).unwrap();
        assert!(!s.is_finite());
        for j in 0..8 {
            assert_eq!(s.term(j).unwrap(), r.term(2 * j).unwrap());
        }
    }

    #[test]
    fn growth_declarations() {
        let r = DSequence::ratios(&[2, 3], true).unwrap();
        assert!(r.clone().with_growth(GrowthTag::RatioToInfinity).is_err());
        let r = r.with_growth(GrowthTag::Bounded).unwrap().with_basic().unwrap();
        assert_eq!(r.descriptor(), "ratios:2,3;repeat growth=bounded basic");
        assert!(DSequence::factorial().with_basic().is_err());
        assert!(DSequence::factorial()
            .with_growth(GrowthTag::BlockToInfinity(2))
            .is_ok());
    }

    #[test]
    fn index_sequences() {
        let id = IndexSeq::identity();
        assert_eq!((1..5).map(|i| id.get(i).unwrap()).collect::<Vec<_>>(), [1, 2, 3, 4]);
        let s = IndexSeq::affine(vec![5, 0], 3, -4).unwrap();
        assert_eq!(s.get(1), Some(5));
        assert_eq!(s.get(2), Some(0));
        assert_eq!(s.get(3), Some(5));
        assert!(IndexSeq::affine(vec![], 0, -1).is_err());
        assert_eq!(IndexSeq::finite(vec![1]).get(2), None);
    }

    #[test]
    fn concurrent_readers_agree() {
        let f = DSequence::factorial();
        let handles: Vec<_> = (0..8)
            .map(|t| {
                let f = f.clone();
                std::thread::spawn(move || f.term(30 + t).unwrap())
            })
            .collect();
        let got: Vec<BigInt> = handles.into_iter().map(|h| h.join().unwrap()).collect();
        for (t, v) in got.iter().enumerate() {
            assert_eq!(*v, f.term(30 + t).unwrap());
        }
    }
}
