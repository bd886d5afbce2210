//! The finest group topology on the integers in which `b_n -> 0`.
//!
//! Basic neighborhoods of 0 are `V_(n_i) = U_k [n_1, ..., n_k]` where
//! `[n_1, ..., n_k] = {g_1 + ... + g_k : g_i in A*_{n_i}}` and
//! `A*_m = {+-b_n : n >= m} U {0}`. Membership in `V` is only semi-decidable
//! (terms of any size may cancel), so [`v_member`] answers YES with a
//! certificate or UNKNOWN, never NO.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::chars::{enum_window, Character};
use crate::dseq::{index_at_most, DSequence, GrowthTag, IndexSeq};
use crate::error::{Error, Result};

/// An index sequence `(n_i)` over a base sequence.
#[derive(Clone, Debug)]
pub struct GraevSpec {
    index_seq: IndexSeq,
    base: DSequence,
}

impl GraevSpec {
    pub fn new(base: &DSequence, index_seq: IndexSeq) -> Self {
        GraevSpec {
            index_seq,
            base: base.clone(),
        }
    }

    pub fn base(&self) -> &DSequence {
        &self.base
    }

    pub fn index_seq(&self) -> &IndexSeq {
        &self.index_seq
    }

    /// `n_i` for slot `i >= 1`.
    pub fn slot_index(&self, i: usize) -> Option<usize> {
        self.index_seq.get(i)
    }
}

impl fmt::Display for GraevSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} over {}", self.index_seq, self.base)
    }
}

/// `A*_m` truncated to indices `m..=cutoff`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TruncatedSet {
    #[serde(with = "crate::json::int_vec")]
    pub elements: Vec<BigInt>,
    pub m: usize,
    pub cutoff: usize,
    /// More elements exist beyond the cutoff.
    pub truncated: bool,
}

pub fn a_star(b: &DSequence, m: usize, cutoff: usize) -> Result<TruncatedSet> {
    if cutoff < m {
        return Err(Error::InvalidIndices(format!("cutoff {cutoff} is below m = {m}")));
    }
    let mut elements = vec![BigInt::zero()];
    for n in m..=cutoff {
        let t = b.term(n)?;
        elements.push(-&t);
        elements.push(t);
    }
    elements.sort();
    let truncated = b.last_index().is_none_or(|l| cutoff < l);
    Ok(TruncatedSet {
        elements,
        m,
        cutoff,
        truncated,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CertTerm {
    pub sign: i8,
    pub index: usize,
    pub slot: usize,
}

/// A decomposition `x = g_1 + ... + g_k` with `g_i in A*_{n_i}`; zero terms
/// are omitted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    #[serde(with = "crate::json::int")]
    pub x: BigInt,
    pub terms: Vec<CertTerm>,
    pub k: usize,
}

impl Certificate {
    /// Re-check the decomposition by direct summation and slot constraints.
    pub fn verify(&self, spec: &GraevSpec) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidExpansion("certificate depth must be at least 1".into()));
        }
        let mut seen = vec![false; self.k + 1];
        let mut sum = BigInt::zero();
        for t in &self.terms {
            if t.slot == 0 || t.slot > self.k {
                return Err(Error::InvalidExpansion(format!("slot {} outside 1..={}", t.slot, self.k)));
            }
            if std::mem::replace(&mut seen[t.slot], true) {
                return Err(Error::InvalidExpansion(format!("slot {} used twice", t.slot)));
            }
            let n_slot = spec.slot_index(t.slot).ok_or_else(|| {
                Error::InvalidExpansion(format!("index sequence has no slot {}", t.slot))
            })?;
            if t.index < n_slot {
                return Err(Error::InvalidExpansion(format!(
                    "term b_{} is not in A*_{} (slot {})",
                    t.index, n_slot, t.slot
                )));
            }
            if t.sign != 1 && t.sign != -1 {
                return Err(Error::InvalidExpansion(format!("sign {} is not +-1", t.sign)));
            }
            sum += spec.base.term(t.index)? * i32::from(t.sign);
        }
        if sum != self.x {
            return Err(Error::InvalidExpansion(format!("terms sum to {sum}, not {}", self.x)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default)]
pub struct SearchCaps {
    pub max_k: Option<usize>,
    pub max_index: Option<usize>,
    pub max_abs: Option<BigInt>,
    pub max_states: Option<usize>,
}

pub const DEFAULT_MAX_K: usize = 8;
pub const DEFAULT_INDEX_SLACK: usize = 16;
pub const DEFAULT_ABS_FACTOR_LOG2: usize = 20;
pub const DEFAULT_MAX_STATES: usize = 1 << 21;

/// Caps with defaults filled in for a particular `x`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResolvedCaps {
    pub max_k: usize,
    pub max_index: usize,
    #[serde(with = "crate::json::int")]
    pub max_abs: BigInt,
    pub max_states: usize,
}

impl SearchCaps {
    pub fn resolve(&self, spec: &GraevSpec, x: &BigInt) -> Result<ResolvedCaps> {
        let max_k = self.max_k.unwrap_or(DEFAULT_MAX_K);
        if max_k == 0 {
            return Err(Error::Precondition("max_k must be positive".into()));
        }
        let max_index = match self.max_index {
            Some(i) => i,
            None => {
                let span = index_at_most(&spec.base, &x.abs())? + 1;
                let slots = (1..=max_k)
                    .filter_map(|i| spec.slot_index(i))
                    .max()
                    .unwrap_or(0);
                span.max(slots) + DEFAULT_INDEX_SLACK
            }
        };
        let max_index = match spec.base.last_index() {
            Some(l) => max_index.min(l),
            None => max_index,
        };
        let max_abs = match &self.max_abs {
            Some(a) if a.is_positive() => a.clone(),
            Some(_) => return Err(Error::Precondition("max_abs must be positive".into())),
            None => x.abs().max(BigInt::one()) << DEFAULT_ABS_FACTOR_LOG2,
        };
        let max_states = self.max_states.unwrap_or(DEFAULT_MAX_STATES).max(1);
        Ok(ResolvedCaps {
            max_k,
            max_index,
            max_abs,
            max_states,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict")]
pub enum Membership {
    #[serde(rename = "YES")]
    Yes { certificate: Certificate },
    /// Nothing found within the caps; membership is not refuted.
    #[serde(rename = "UNKNOWN")]
    Unknown { state_cap_hit: bool },
}

impl Membership {
    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Membership::Yes { certificate } => Some(certificate),
            Membership::Unknown { .. } => None,
        }
    }

    pub fn is_yes(&self) -> bool {
        matches!(self, Membership::Yes { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MemberReport {
    #[serde(flatten)]
    pub membership: Membership,
    pub caps: ResolvedCaps,
    /// Deepest bracket length searched.
    pub depth_searched: usize,
}

type Choice = Option<(i8, usize)>;

struct SlotOptions {
    choices: Vec<Choice>,
    values: Vec<BigInt>,
}

fn slot_options(
    spec: &GraevSpec,
    slot: usize,
    caps: &ResolvedCaps,
    bound: &BigInt,
) -> Result<SlotOptions> {
    let mut choices = vec![None];
    let mut values = vec![BigInt::zero()];
    if let Some(n_i) = spec.slot_index(slot) {
        for j in n_i..=caps.max_index {
            let t = spec.base.term(j)?;
            if &t > bound {
                break;
            }
            choices.push(Some((1, j)));
            values.push(t.clone());
            choices.push(Some((-1, j)));
            values.push(-t);
        }
    }
    Ok(SlotOptions { choices, values })
}

/// Visits every assignment over the given slots in lexicographic order,
/// pruning whenever a running sum leaves `[-limit, limit]`. `visit` returns
/// `false` to stop; the function returns `false` if it was stopped.
fn for_each_assignment(
    opts: &[SlotOptions],
    start: &BigInt,
    limit: &BigInt,
    prune: bool,
    visit: &mut dyn FnMut(&[usize], &BigInt) -> bool,
) -> bool {
    let depth = opts.len();
    if depth == 0 {
        return visit(&[], start);
    }
    let mut pick = vec![0usize; depth];
    let mut sums = vec![start.clone(); depth + 1];
    let mut level = 0usize;
    loop {
        if pick[level] == opts[level].choices.len() {
            if level == 0 {
                return true;
            }
            pick[level] = 0;
            level -= 1;
            pick[level] += 1;
            continue;
        }
        let s = &sums[level] + &opts[level].values[pick[level]];
        if prune && s.abs() > *limit {
            pick[level] += 1;
            continue;
        }
        sums[level + 1] = s;
        if level + 1 == depth {
            if !visit(&pick, &sums[depth]) {
                return false;
            }
            pick[level] += 1;
        } else {
            level += 1;
        }
    }
}

enum DepthOutcome {
    Found(Certificate),
    Exhausted,
    Capped,
}

fn search_depth(spec: &GraevSpec, x: &BigInt, k: usize, caps: &ResolvedCaps) -> Result<DepthOutcome> {
    let twice = &caps.max_abs * 2u32;
    let mut opts = Vec::with_capacity(k);
    for slot in 1..=k {
        let bound = if slot == 1 { &caps.max_abs } else { &twice };
        opts.push(slot_options(spec, slot, caps, bound)?);
    }
    let split = k.div_ceil(2);
    let (left, right) = opts.split_at(split);

    let mut table: HashMap<BigInt, Vec<usize>> = HashMap::new();
    let mut capped = false;
    for_each_assignment(left, &BigInt::zero(), &caps.max_abs, true, &mut |pick, sum| {
        if table.len() >= caps.max_states {
            capped = true;
            return false;
        }
        table.entry(sum.clone()).or_insert_with(|| pick.to_vec());
        true
    });

    let mut found = None;
    let mut visited = 0usize;
    for_each_assignment(right, &BigInt::zero(), &twice, false, &mut |pick, rsum| {
        visited += 1;
        if visited > caps.max_states {
            capped = true;
            return false;
        }
        let need = x - rsum;
        let Some(lpick) = table.get(&need) else {
            return true;
        };
        // Partial sums across the right half must stay within max_abs as well.
        let mut s = need.clone();
        for (slot, &p) in pick.iter().enumerate() {
            s += &right[slot].values[p];
            if s.abs() > caps.max_abs {
                return true;
            }
        }
        let mut terms = Vec::new();
        for (slot, &p) in lpick.iter().chain(pick.iter()).enumerate() {
            let choice = if slot < split {
                left[slot].choices[p]
            } else {
                right[slot - split].choices[p]
            };
            if let Some((sign, index)) = choice {
                terms.push(CertTerm {
                    sign,
                    index,
                    slot: slot + 1,
                });
            }
        }
        found = Some(Certificate {
            x: x.clone(),
            terms,
            k,
        });
        false
    });

    Ok(match found {
        Some(c) => DepthOutcome::Found(c),
        None if capped => DepthOutcome::Capped,
        None => DepthOutcome::Exhausted,
    })
}

/// Bounded search for `x in V_(n_i)`, iteratively deepening the bracket length.
pub fn v_member(spec: &GraevSpec, x: &BigInt, caps: &SearchCaps) -> Result<MemberReport> {
    let caps = caps.resolve(spec, x)?;
    let mut state_cap_hit = false;
    let mut depth_searched = 0;
    for k in 1..=caps.max_k {
        if spec.slot_index(k).is_none() {
            break;
        }
        depth_searched = k;
        match search_depth(spec, x, k, &caps)? {
            DepthOutcome::Found(certificate) => {
                certificate.verify(spec)?;
                return Ok(MemberReport {
                    membership: Membership::Yes { certificate },
                    caps,
                    depth_searched,
                });
            }
            DepthOutcome::Exhausted => {}
            DepthOutcome::Capped => {
                state_cap_hit = true;
                break;
            }
        }
    }
    Ok(MemberReport {
        membership: Membership::Unknown { state_cap_hit },
        caps,
        depth_searched,
    })
}

/// Search restricted to bracket length exactly `k`.
pub fn v_member_at_depth(
    spec: &GraevSpec,
    x: &BigInt,
    k: usize,
    caps: &SearchCaps,
) -> Result<Option<Certificate>> {
    let caps = caps.resolve(spec, x)?;
    Ok(match search_depth(spec, x, k, &caps)? {
        DepthOutcome::Found(c) => Some(c),
        _ => None,
    })
}

/// One element `multiple * b_index` of the set `A` with its certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AElement {
    #[serde(with = "crate::json::int")]
    pub value: BigInt,
    pub multiple: usize,
    pub index: usize,
    pub certificate: Certificate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ASet {
    /// Declared bound on the ratios.
    pub ratio_bound: usize,
    /// `N`: the largest of the `ratio_bound` smallest slot indices.
    pub n: usize,
    /// Positions `i` of those smallest indices, ascending.
    pub slots: Vec<usize>,
    pub elements: Vec<AElement>,
}

/// Global ratio bound from the growth declaration.
pub fn declared_ratio_bound(b: &DSequence) -> Result<usize> {
    if b.growth() != Some(GrowthTag::Bounded) {
        return Err(Error::Precondition(format!(
            "`{b}` carries no bounded-ratio declaration"
        )));
    }
    let bound = crate::dseq::has_bounded_ratios(b, RATIO_BOUND_HORIZON)?.prefix_max;
    bound
        .to_usize()
        .ok_or_else(|| Error::Precondition(format!("ratio bound {bound} is too large")))
}

/// Ratios read to determine the numeric bound of a `growth=bounded` sequence.
/// Periodic presets attain their maximum within one period.
pub const RATIO_BOUND_HORIZON: usize = 64;

/// Positions of the `l` smallest indices of `(n_i)`, ties broken by position.
fn smallest_slots(seq: &IndexSeq, l: usize) -> Result<Vec<(usize, usize)>> {
    let reach = seq.prefix().len() + l;
    let mut cand: Vec<(usize, usize)> = (1..=reach)
        .filter_map(|i| seq.get(i).map(|n| (n, i)))
        .collect();
    if cand.len() < l {
        return Err(Error::Precondition(format!(
            "index sequence has fewer than {l} slots"
        )));
    }
    cand.sort();
    cand.truncate(l);
    Ok(cand)
}

/// The elements `j * b_M` (`M >= N`, `1 <= j < q_{M+1}`) of `A` in increasing
/// order, each certified inside `V_(n_i)` with `j` copies of `b_M`.
pub fn build_a(spec: &GraevSpec, count: usize) -> Result<ASet> {
    if count == 0 {
        return Err(Error::Precondition("count must be positive".into()));
    }
    let b = &spec.base;
    let l = declared_ratio_bound(b)?;
    let chosen = smallest_slots(&spec.index_seq, l)?;
    let n = chosen.iter().map(|&(v, _)| v).max().expect("l >= 2");
    let mut slots: Vec<usize> = chosen.iter().map(|&(_, i)| i).collect();
    slots.sort_unstable();

    let mut elements = Vec::with_capacity(count);
    let mut m = n;
    'outer: loop {
        let bm = b.term(m)?;
        let q = b.ratio(m + 1)?.to_usize().expect("bounded ratio");
        for j in 1..q {
            if elements.len() == count {
                break 'outer;
            }
            let used = &slots[..j];
            let certificate = Certificate {
                x: &bm * j,
                terms: used
                    .iter()
                    .map(|&slot| CertTerm {
                        sign: 1,
                        index: m,
                        slot,
                    })
                    .collect(),
                k: *used.last().expect("j >= 1"),
            };
            certificate.verify(spec)?;
            elements.push(AElement {
                value: &bm * j,
                multiple: j,
                index: m,
                certificate,
            });
        }
        m += 1;
    }
    Ok(ASet {
        ratio_bound: l,
        n,
        slots,
        elements,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GraevPolar {
    pub window: usize,
    pub count: usize,
    pub n: usize,
    pub characters: Vec<Character>,
    /// The result is exactly `Z(b_N)` (inside the window).
    pub equals_z_bn: bool,
}

/// `{chi in Z(b_M) : chi(a) in T_+ for the first `count` elements a of A}`.
pub fn graev_polar_window(spec: &GraevSpec, window: usize, count: usize) -> Result<GraevPolar> {
    let a = build_a(spec, count)?;
    let values: Vec<BigInt> = a.elements.iter().map(|e| e.value.clone()).collect();
    let characters: Vec<Character> = enum_window(&spec.base, window)?
        .into_iter()
        .filter(|chi| values.iter().all(|v| chi.eval_in_t_plus(v)))
        .collect();
    let target = enum_window(&spec.base, a.n.min(window))?;
    let equals_z_bn = a.n <= window && characters == target;
    Ok(GraevPolar {
        window,
        count,
        n: a.n,
        characters,
        equals_z_bn,
    })
}
