//! Text form of a D-sequence:
//!
//! ```text
//! spec   := base (WS option)*
//! base   := "factorial" | "primorial" | "pow:" INT | "ratios:" INT ("," INT)* [";repeat"]
//! option := "growth=" ("bounded" | "dinf" | "dinf-l:" INT) | "basic"
//! ```

use super::{DSequence, GrowthTag};
use crate::error::{Error, Result};

fn err(pos: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        pos,
        msg: msg.into(),
    }
}

fn parse_uint(s: &str, pos: usize) -> Result<u64> {
    s.parse::<u64>()
        .map_err(|_| err(pos, format!("expected a non-negative integer, found `{s}`")))
}

/// Whitespace-separated tokens with their byte offsets.
fn tokens(s: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in s.char_indices() {
        match (ch.is_whitespace(), start) {
            (true, Some(st)) => {
                out.push((st, &s[st..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(st) = start {
        out.push((st, &s[st..]));
    }
    out
}

fn parse_base(tok: &str, pos: usize) -> Result<DSequence> {
    match tok {
        "factorial" => return Ok(DSequence::factorial()),
        "primorial" => return Ok(DSequence::primorial()),
        _ => {}
    }
    if let Some(k) = tok.strip_prefix("pow:") {
        let k = parse_uint(k, pos + 4)?;
        return DSequence::pow(k);
    }
    if let Some(body) = tok.strip_prefix("ratios:") {
        let body_pos = pos + 7;
        let (list, repeat) = match body.split_once(';') {
            Some((l, "repeat")) => (l, true),
            Some((l, other)) => {
                return Err(err(
                    body_pos + l.len() + 1,
                    format!("expected `repeat`, found `{other}`"),
                ))
            }
            None => (body, false),
        };
        let mut qs = Vec::new();
        let mut off = body_pos;
        for part in list.split(',') {
            if part.is_empty() {
                return Err(err(off, "empty ratio"));
            }
            qs.push(parse_uint(part, off)?);
            off += part.len() + 1;
        }
        return DSequence::ratios(&qs, repeat);
    }
    Err(err(
        pos,
        format!("unknown sequence `{tok}` (expected factorial, primorial, pow:<k> or ratios:<list>)"),
    ))
}

fn parse_growth(v: &str, pos: usize) -> Result<GrowthTag> {
    match v {
        "bounded" => Ok(GrowthTag::Bounded),
        "dinf" => Ok(GrowthTag::RatioToInfinity),
        _ => match v.strip_prefix("dinf-l:") {
            Some(l) => {
                let l = parse_uint(l, pos + 7)?;
                if l == 0 {
                    return Err(err(pos + 7, "block length must be at least 1"));
                }
                Ok(GrowthTag::BlockToInfinity(l as usize))
            }
            None => Err(err(pos, format!("unknown growth class `{v}`"))),
        },
    }
}

/// Parse the D-sequence grammar.
pub fn parse_dseq(spec: &str) -> Result<DSequence> {
    let toks = tokens(spec);
    let Some(&(pos, first)) = toks.first() else {
        return Err(err(0, "empty sequence spec"));
    };
    let mut seq = parse_base(first, pos).map_err(|e| match e {
        // Ratio errors carry a term index; keep them as they are.
        Error::MalformedSequence { .. } | Error::Parse { .. } => e,
        other => err(pos, other.to_string()),
    })?;
    let mut growth = None;
    let mut basic = false;
    for &(pos, tok) in &toks[1..] {
        if tok == "basic" {
            basic = true;
        } else if let Some(v) = tok.strip_prefix("growth=") {
            if growth.is_some() {
                return Err(err(pos, "growth declared twice"));
            }
            growth = Some(parse_growth(v, pos + 7)?);
        } else {
            return Err(err(pos, format!("unexpected token `{tok}`")));
        }
    }
    if let Some(g) = growth {
        seq = seq.with_growth(g)?;
    }
    if basic {
        seq = seq.with_basic()?;
    }
    Ok(seq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn presets() {
        let s = parse_dseq("ratios:2,3;repeat growth=bounded").unwrap();
        assert_eq!(s.term(4).unwrap(), BigInt::from(36));
        assert_eq!(s.declared_growth(), Some(GrowthTag::Bounded));
        assert_eq!(parse_dseq("factorial").unwrap(), DSequence::factorial());
        let b = parse_dseq("  ratios:2,3;repeat   growth=bounded basic ").unwrap();
        assert!(b.basic_declared());
        assert_eq!(b.descriptor(), "ratios:2,3;repeat growth=bounded basic");
        assert_eq!(parse_dseq("pow:3").unwrap().term(3).unwrap(), BigInt::from(27));
        let l = parse_dseq("factorial growth=dinf-l:2").unwrap();
        assert_eq!(l.declared_growth(), Some(GrowthTag::BlockToInfinity(2)));
    }

    #[test]
    fn errors() {
        assert!(matches!(
            parse_dseq("ratios:1,3"),
            Err(Error::MalformedSequence { index: 1, .. })
        ));
        assert_eq!(
            parse_dseq("ratios:2,x").unwrap_err(),
            Error::Parse {
                pos: 9,
                msg: "expected a non-negative integer, found `x`".into()
            }
        );
        assert!(matches!(parse_dseq("fibonacci"), Err(Error::Parse { pos: 0, .. })));
        assert!(matches!(
            parse_dseq("factorial growth=wild"),
            Err(Error::Parse { pos: 17, .. })
        ));
        assert!(matches!(
            parse_dseq("factorial extra"),
            Err(Error::Parse { pos: 10, .. })
        ));
        assert!(matches!(parse_dseq("ratios:2;again"), Err(Error::Parse { pos: 9, .. })));
        assert!(parse_dseq("").is_err());
        assert!(parse_dseq("factorial basic").is_err());
        assert!(parse_dseq("pow:2 growth=dinf").is_err());
    }
}
