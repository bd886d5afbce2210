//! Polars, quasi-convex hulls and quasi-convexity tests, all relative to a
//! finite character window `Z(b_M)` and an integer range `[-R, R]`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use crate::chars::{enum_window, Character};
use crate::dseq::DSequence;
use crate::error::{Error, Result};

/// Characters flattened to machine integers when the window allows it.
enum Evaluator<'a> {
    Small(Vec<(i128, i128)>),
    Big(&'a [Character]),
}

impl<'a> Evaluator<'a> {
    fn new(chars: &'a [Character]) -> Self {
        let small: Option<Vec<(i128, i128)>> = chars
            .iter()
            .map(|c| {
                let k = c.k().to_i64()?;
                let m = c.base().term(c.level()).ok()?.to_i64()?;
                Some((i128::from(k), i128::from(m)))
            })
            .collect();
        match small {
            Some(s) => Evaluator::Small(s),
            None => Evaluator::Big(chars),
        }
    }

    fn in_t_plus(&self, i: usize, x: &BigInt, xs: Option<i64>) -> bool {
        let (k, m) = match self {
            Evaluator::Small(v) => v[i],
            Evaluator::Big(c) => return c[i].eval_in_t_plus(x),
        };
        match xs {
            Some(x) => {
                let r = (k * i128::from(x)).rem_euclid(m);
                let r = if 2 * r > m { r - m } else { r };
                4 * r.abs() <= m
            }
            None => {
                let m = BigInt::from(m);
                let r = (BigInt::from(k) * x).mod_floor(&m);
                let r = if &r * 2 > m { r - &m } else { r };
                r.abs() * 4 <= m
            }
        }
    }

    fn len(&self) -> usize {
        match self {
            Evaluator::Small(v) => v.len(),
            Evaluator::Big(c) => c.len(),
        }
    }
}

fn polar_of(window: &[Character], s: &[BigInt]) -> Vec<Character> {
    let eval = Evaluator::new(window);
    let small: Vec<Option<i64>> = s.iter().map(|x| x.to_i64()).collect();
    (0..eval.len())
        .filter(|&i| s.iter().zip(&small).all(|(x, xs)| eval.in_t_plus(i, x, *xs)))
        .map(|i| window[i].clone())
        .collect()
}

/// `{chi in Z(b_M) : chi(s) in T_+ for all s in S}`.
pub fn polar_window(s: &[BigInt], b: &DSequence, window: usize) -> Result<Vec<Character>> {
    Ok(polar_of(&enum_window(b, window)?, s))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Hull {
    pub window: usize,
    pub range: u64,
    #[serde(with = "crate::json::int_vec")]
    pub points: Vec<BigInt>,
}

fn check_range(s: &[BigInt], range: u64) -> Result<()> {
    if range == 0 {
        return Err(Error::Precondition("range must be positive".into()));
    }
    if let Some(x) = s.iter().find(|x| x.abs() > BigInt::from(range)) {
        return Err(Error::Precondition(format!("{x} lies outside [-{range}, {range}]")));
    }
    Ok(())
}

fn range_points(range: u64) -> Vec<BigInt> {
    let r = range as i64;
    (-r..=r).map(BigInt::from).collect()
}

fn hull_of(polar: &[Character], range: u64) -> Vec<BigInt> {
    let eval = Evaluator::new(polar);
    range_points(range)
        .into_iter()
        .filter(|x| {
            let xs = x.to_i64();
            (0..eval.len()).all(|i| eval.in_t_plus(i, x, xs))
        })
        .collect()
}

/// Points of `[-R, R]` mapped into `T_+` by every character of the windowed polar of `S`.
pub fn qc_hull_window(s: &[BigInt], b: &DSequence, window: usize, range: u64) -> Result<Hull> {
    check_range(s, range)?;
    let polar = polar_window(s, b, window)?;
    Ok(Hull {
        window,
        range,
        points: hull_of(&polar, range),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Separation {
    #[serde(with = "crate::json::int")]
    pub x: BigInt,
    pub character: Character,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QcVerdict {
    pub quasiconvex: bool,
    pub window: usize,
    pub range: u64,
    /// First hull point outside `S`, ordered by `(|x|, x)`.
    #[serde(with = "opt_int")]
    pub witness: Option<BigInt>,
    #[serde(with = "crate::json::int_vec")]
    pub extras: Vec<BigInt>,
    /// For a quasi-convex `S`: one separating character for each point of `[-R, R] \ S`.
    pub separators: Vec<Separation>,
}

mod opt_int {
    use num_bigint::BigInt;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) => crate::json::int::serialize(x, s),
            None => s.serialize_none(),
        }
    }
}

pub fn is_quasiconvex_window(s: &[BigInt], b: &DSequence, window: usize, range: u64) -> Result<QcVerdict> {
    check_range(s, range)?;
    let mut set: Vec<BigInt> = s.to_vec();
    set.sort();
    set.dedup();
    let polar = polar_window(&set, b, window)?;
    let hull = hull_of(&polar, range);
    let mut extras: Vec<BigInt> = hull
        .into_iter()
        .filter(|x| set.binary_search(x).is_err())
        .collect();
    let witness = extras
        .iter()
        .min_by(|a, b| a.abs().cmp(&b.abs()).then_with(|| a.cmp(b)))
        .cloned();
    extras.sort();
    let mut separators = Vec::new();
    if extras.is_empty() {
        let eval = Evaluator::new(&polar);
        for x in range_points(range) {
            if set.binary_search(&x).is_ok() {
                continue;
            }
            let xs = x.to_i64();
            let i = (0..eval.len())
                .find(|&i| !eval.in_t_plus(i, &x, xs))
                .expect("x is outside the hull");
            separators.push(Separation {
                x,
                character: polar[i].clone(),
            });
        }
    }
    Ok(QcVerdict {
        quasiconvex: extras.is_empty(),
        window,
        range,
        witness,
        extras,
        separators,
    })
}
