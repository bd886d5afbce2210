//! Exhaustive checks of the arc lemmas in T and of the window-scale
//! locally quasi-convex modification claim for Graev topologies.
//!
//! Multiples lemma: if `k, 2k, ..., mk in T_+` and `mk in T_n` then `k in T_{nm}`.
//! Chain lemma: for `m_1, ..., m_n >= 2` with products `P_i = m_1...m_i`, if
//! `t*P_{i-1}*k in T_+` for all `i` and `1 <= t <= m_i`, then `k in T_{P_n}`.

use num_integer::gcd;
use rayon::prelude::*;
use serde::Serialize;

use crate::chars::{enum_window, Character};
use crate::circle::CircleElem;
use crate::error::{Error, Result};
use crate::graev::{build_a, graev_polar_window, GraevSpec};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Lemma1Counterexample {
    pub k: CircleElem,
    pub m: u64,
    pub n: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Lemma1Verdict {
    pub pass: bool,
    pub max_den: u64,
    pub max_m: u64,
    pub max_n: u64,
    /// Number of `k` examined.
    pub points: u64,
    /// Triples `(k, m, n)` whose premises held.
    pub premises_held: u64,
    pub counterexample: Option<Lemma1Counterexample>,
}

fn lemma1_den(d: u64, max_m: u64, max_n: u64) -> (u64, u64, Option<Lemma1Counterexample>) {
    let mut points = 0;
    let mut held = 0;
    for k in CircleElem::with_exact_denominator(d) {
        points += 1;
        let mut mult = CircleElem::zero();
        for m in 1..=max_m {
            mult = mult.add(&k);
            if !mult.in_t_plus() {
                break;
            }
            for n in 1..=max_n {
                if !mult.in_tm(n).expect("n >= 1") {
                    break;
                }
                held += 1;
                if !k.in_tm(n * m).expect("nm >= 1") {
                    return (points, held, Some(Lemma1Counterexample { k, m, n }));
                }
            }
        }
    }
    (points, held, None)
}

pub fn verify_lemma1(max_den: u64, max_m: u64, max_n: u64) -> Result<Lemma1Verdict> {
    if max_den == 0 || max_m == 0 || max_n == 0 {
        return Err(Error::Precondition("bounds must be positive".into()));
    }
    let per_den: Vec<_> = (1..=max_den)
        .into_par_iter()
        .map(|d| lemma1_den(d, max_m, max_n))
        .collect();
    let points = per_den.iter().map(|r| r.0).sum();
    let premises_held = per_den.iter().map(|r| r.1).sum();
    let counterexample = per_den.into_iter().find_map(|r| r.2);
    Ok(Lemma1Verdict {
        pass: counterexample.is_none(),
        max_den,
        max_m,
        max_n,
        points,
        premises_held,
        counterexample,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainCounterexample {
    pub k: CircleElem,
    pub chain: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainVerdict {
    pub pass: bool,
    pub alphabet: Vec<u64>,
    pub max_product: u64,
    pub max_den: u64,
    pub chains: u64,
    /// Largest product over all chains.
    pub max_chain_product: u64,
    pub points: u64,
    /// Pairs `(k, chain)` whose premises held.
    pub premises_held: u64,
    pub counterexample: Option<ChainCounterexample>,
    /// Nonzero `k` satisfying the premises of every chain.
    pub survivors: u64,
    /// Survivors violating `4 * max_chain_product * |num| <= den`.
    pub survivors_outside_bound: u64,
    /// Nonzero survivors with `den < 4 * max_chain_product`.
    pub survivors_below_scale: u64,
    pub smallest_survivor: Option<CircleElem>,
}

/// `t*k in T_m` for `k = a/d` with `a` centered.
fn in_tm(a: i64, d: i64, t: i64, m: i64) -> bool {
    let r = (i128::from(t) * i128::from(a)).rem_euclid(i128::from(d));
    let r = if 2 * r > i128::from(d) { r - i128::from(d) } else { r };
    4 * r.abs() * i128::from(m) <= i128::from(d)
}

struct ChainWalk<'a> {
    alphabet: &'a [i64],
    max_product: i64,
    a: i64,
    d: i64,
    held: u64,
    counterexample: Option<Vec<u64>>,
    stack: Vec<u64>,
}

impl ChainWalk<'_> {
    /// Visits every chain extending the current one whose premises hold.
    fn walk(&mut self, p: i64) {
        for &m in self.alphabet {
            let next = p * m;
            if next > self.max_product {
                continue;
            }
            if !(2..=m).all(|t| in_tm(self.a, self.d, t * p, 1)) {
                continue;
            }
            self.stack.push(m as u64);
            self.held += 1;
            if self.counterexample.is_none() && !in_tm(self.a, self.d, 1, next) {
                self.counterexample = Some(self.stack.clone());
            }
            self.walk(next);
            self.stack.pop();
        }
    }
}

fn chain_stats(alphabet: &[i64], max_product: i64) -> (u64, i64) {
    fn go(alphabet: &[i64], max_product: i64, p: i64, count: &mut u64, best: &mut i64) {
        for &m in alphabet {
            let next = p * m;
            if next <= max_product {
                *count += 1;
                *best = (*best).max(next);
                go(alphabet, max_product, next, count, best);
            }
        }
    }
    let (mut count, mut best) = (0, 1);
    go(alphabet, max_product, 1, &mut count, &mut best);
    (count, best)
}

struct DenResult {
    points: u64,
    held: u64,
    counterexample: Option<ChainCounterexample>,
    survivors: Vec<i64>,
}

pub fn verify_lemma_chain(alphabet: &[u64], max_product: u64) -> Result<ChainVerdict> {
    if alphabet.is_empty() || alphabet.iter().any(|&m| m < 2) {
        return Err(Error::Precondition("alphabet elements must be at least 2".into()));
    }
    if max_product == 0 || max_product > (1 << 40) {
        return Err(Error::Precondition("max_product must be in 1..=2^40".into()));
    }
    let mut letters: Vec<i64> = alphabet.iter().map(|&m| m as i64).collect();
    letters.sort_unstable();
    letters.dedup();
    let max_p = max_product as i64;
    let (chains, best) = chain_stats(&letters, max_p);
    let max_den = 4 * max_p;

    let per_den: Vec<DenResult> = (1..=max_den)
        .into_par_iter()
        .map(|d| {
            let mut res = DenResult {
                points: 0,
                held: 0,
                counterexample: None,
                survivors: Vec::new(),
            };
            for a in (-(d - 1) / 2)..=(d / 2) {
                if gcd(a, d) != 1 {
                    continue;
                }
                res.points += 1;
                // Every chain starts with the premise k in T_+.
                if !in_tm(a, d, 1, 1) {
                    continue;
                }
                let mut w = ChainWalk {
                    alphabet: &letters,
                    max_product: max_p,
                    a,
                    d,
                    held: 0,
                    counterexample: None,
                    stack: Vec::new(),
                };
                w.walk(1);
                res.held += w.held;
                if res.counterexample.is_none() {
                    if let Some(chain) = w.counterexample {
                        res.counterexample = Some(ChainCounterexample {
                            k: CircleElem::make(a, d).expect("d >= 1"),
                            chain,
                        });
                    }
                }
                if w.held == chains && a != 0 {
                    res.survivors.push(a);
                }
            }
            res
        })
        .collect();

    let mut verdict = ChainVerdict {
        pass: false,
        alphabet: letters.iter().map(|&m| m as u64).collect(),
        max_product,
        max_den: max_den as u64,
        chains,
        max_chain_product: best as u64,
        points: 0,
        premises_held: 0,
        counterexample: None,
        survivors: 0,
        survivors_outside_bound: 0,
        survivors_below_scale: 0,
        smallest_survivor: None,
    };
    for (i, r) in per_den.into_iter().enumerate() {
        let d = i as i64 + 1;
        verdict.points += r.points;
        verdict.premises_held += r.held;
        if verdict.counterexample.is_none() {
            verdict.counterexample = r.counterexample;
        }
        for a in r.survivors {
            verdict.survivors += 1;
            if 4 * best as i128 * i128::from(a.abs()) > i128::from(d) {
                verdict.survivors_outside_bound += 1;
            }
            if d < 4 * best {
                verdict.survivors_below_scale += 1;
            }
            if verdict.smallest_survivor.is_none() {
                verdict.smallest_survivor = Some(CircleElem::make(a, d).expect("d >= 1"));
            }
        }
    }
    verdict.pass = verdict.counterexample.is_none()
        && verdict.survivors_outside_bound == 0
        && verdict.survivors_below_scale == 0;
    Ok(verdict)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LqcVerdict {
    pub pass: bool,
    pub n: usize,
    pub window: usize,
    pub count: usize,
    /// Polar of the Graev neighborhood, computed through `A`.
    pub graev_polar: Vec<Character>,
    /// Polar of `b_N Z` inside the window.
    pub lambda_polar: Vec<Character>,
    pub polars_equal: bool,
    /// The Graev polar lies inside `Z(b_N)`.
    pub inside_z_bn: bool,
    /// The polars are a proper part of the window.
    pub strict_in_window: bool,
}

/// Window-scale check that the Graev polar equals the `lambda_b` polar of `b_N Z`.
pub fn verify_lqc_modification(spec: &GraevSpec, window: usize, count: usize) -> Result<LqcVerdict> {
    let b = spec.base();
    let n = build_a(spec, 1)?.n;
    let graev = graev_polar_window(spec, window, count)?;
    let full = enum_window(b, window)?;
    let lambda_polar: Vec<Character> = if window <= n {
        full.clone()
    } else {
        let bn = b.term(n)?;
        let steps = b.term(window)? / &bn;
        let steps = u64::try_from(steps).map_err(|_| Error::Precondition("window too large".into()))?;
        full.iter()
            .filter(|chi| (1..=steps).all(|x| chi.eval_in_t_plus(&(&bn * x))))
            .cloned()
            .collect()
    };
    let z_bn = enum_window(b, n.min(window))?;
    let inside_z_bn = graev.characters.iter().all(|c| c.level() <= n);
    let polars_equal = graev.characters == lambda_polar;
    Ok(LqcVerdict {
        pass: polars_equal && inside_z_bn && (window < n || lambda_polar == z_bn),
        n,
        window,
        count,
        strict_in_window: lambda_polar.len() < full.len(),
        graev_polar: graev.characters,
        lambda_polar,
        polars_equal,
        inside_z_bn,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dseq::{parse_dseq, IndexSeq};

    #[test]
    fn lemma1_small() {
        let v = verify_lemma1(60, 6, 4).unwrap();
        assert!(v.pass);
        assert!(v.premises_held > 0);
        // Oracle count of points: sum of phi(d).
        let phi: u64 = (1..=60u64).map(|d| (1..=d).filter(|&a| gcd(a, d) == 1).count() as u64).sum();
        assert_eq!(v.points, phi);
    }

    #[test]
    fn lemma1_instances() {
        // k = 1/8, m = 2, n = 1: 2k = 1/4 in T_1, k in T_2.
        let k = CircleElem::make(1, 8).unwrap();
        assert!(k.smul(&2.into()).in_tm(1).unwrap());
        assert!(k.in_tm(2).unwrap());
        assert!(lemma1_den(8, 2, 1).2.is_none());
    }

    #[test]
    fn chain_small() {
        let v = verify_lemma_chain(&[2, 3], 50).unwrap();
        assert!(v.counterexample.is_none());
        assert_eq!(v.max_chain_product, 48);
        assert_eq!(v.survivors_below_scale, 0);
        assert_eq!(v.survivors_outside_bound, 0);
        // First nonzero survivor: 48 * (1/192) = 1/4.
        assert_eq!(v.smallest_survivor, Some(CircleElem::make(-1, 192).unwrap()));
        assert!(v.pass);
    }

    #[test]
    fn chain_premise_filter() {
        assert!(!in_tm(1, 4, 2, 1));
        assert!(in_tm(0, 1, 7, 1000));
        assert!(verify_lemma_chain(&[1, 2], 10).is_err());
        let (count, best) = chain_stats(&[2, 3], 12);
        // 2, 3, 4, 6, 6, 8, 12, 12, 12, 9 (2,2,2; 2,3; 3,2; ...).
        assert_eq!(best, 12);
        assert_eq!(count, 10);
    }

    #[test]
    fn lqc_fixture() {
        let b = parse_dseq("ratios:2,3;repeat growth=bounded").unwrap();
        let spec = GraevSpec::new(&b, IndexSeq::identity());
        for m in [3, 4, 5, 6] {
            let v = verify_lqc_modification(&spec, m, 40).unwrap();
            assert!(v.pass, "window {m}");
            assert_eq!(v.n, 3);
            assert_eq!(v.graev_polar.len(), 12);
            assert_eq!(v.strict_in_window, m > 3);
        }
    }
}
