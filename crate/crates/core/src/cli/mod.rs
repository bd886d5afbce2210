//! Command-line front end. Every subcommand prints one JSON report on
//! standard output and a one-line summary on standard error.
//!
//! Exit codes: 0 on success or PASS, 1 on FAIL (and on UNKNOWN under
//! `--strict`), 2 on usage or input errors.

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

use crate::analysis::{self, Xs};
use crate::chars::enum_window;
use crate::dseq::{expand, expansion_value, subsequence, DSequence, DigitExpansion, IndexSeq};
use crate::graev::{self, GraevSpec, SearchCaps};
use crate::json::{big, bigs};
use crate::topo::{self, NeighborhoodKind, NeighborhoodSpec};

pub use crate::dseq::parse_dseq;

#[derive(Parser, Debug)]
#[command(name = "dtopo", version, about = "Exact computations for D-sequence topologies on the integers")]
struct Cli {
    /// Base D-sequence, e.g. "factorial" or "ratios:2,3;repeat growth=bounded".
    #[arg(long, global = true)]
    dseq: Option<String>,
    /// Indentation of the JSON report; 0 prints it on one line.
    #[arg(long, global = true, default_value_t = 2)]
    json_indent: usize,
    /// Treat UNKNOWN verdicts as failures.
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Debug)]
struct IntList(Vec<BigInt>);

fn parse_int_list(s: &str) -> Result<IntList, String> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(IntList(Vec::new()));
    }
    s.split(',')
        .map(|p| p.trim().parse::<BigInt>().map_err(|_| format!("`{p}` is not an integer")))
        .collect::<Result<_, _>>()
        .map(IntList)
}

fn parse_index_list(s: &str) -> Result<Vec<usize>, String> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|_| format!("`{p}` is not an index")))
        .collect()
}

fn parse_big(s: &str) -> Result<BigInt, String> {
    s.trim().parse().map_err(|_| format!("`{s}` is not an integer"))
}

#[derive(Args, Debug, Clone)]
struct IndexArgs {
    /// Explicit prefix n_1, n_2, ... of the index sequence.
    #[arg(long, default_value = "")]
    prefix: String,
    /// Rule n_i = a*i + c beyond the prefix, as "a,c"; "none" for a finite sequence.
    #[arg(long, default_value = "1,0", allow_hyphen_values = true)]
    affine: String,
}

impl IndexArgs {
    fn build(&self) -> Result<IndexSeq, String> {
        let prefix = parse_index_list(&self.prefix)?;
        if self.affine.trim() == "none" {
            return Ok(IndexSeq::finite(prefix));
        }
        let (a, c) = self
            .affine
            .split_once(',')
            .ok_or_else(|| format!("--affine expects \"a,c\", found `{}`", self.affine))?;
        let a: usize = a.trim().parse().map_err(|_| format!("`{a}` is not a slope"))?;
        let c: i64 = c.trim().parse().map_err(|_| format!("`{c}` is not an offset"))?;
        IndexSeq::affine(prefix, a, c).map_err(|e| e.to_string())
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Greedy digit expansion of an integer.
    Expand {
        #[arg(long, value_parser = parse_big, allow_hyphen_values = true)]
        value: BigInt,
    },
    /// Integer represented by a digit list.
    Value {
        #[arg(long, value_parser = parse_int_list, allow_hyphen_values = true)]
        digits: IntList,
    },
    /// Term b_n and ratio q_n.
    Term {
        #[arg(long)]
        n: usize,
        /// Also list b_0..b_n.
        #[arg(long)]
        all: bool,
    },
    /// Polar of a finite set inside the window Z(b_M).
    Polar {
        #[arg(long, value_parser = parse_int_list, allow_hyphen_values = true)]
        set: IntList,
        #[arg(long)]
        window: usize,
    },
    /// Quasi-convex hull relative to a window and a range.
    Hull {
        #[arg(long, value_parser = parse_int_list, allow_hyphen_values = true)]
        set: IntList,
        #[arg(long)]
        window: usize,
        #[arg(long)]
        range: u64,
    },
    /// Quasi-convexity test relative to a window and a range.
    QcCheck {
        #[arg(long, value_parser = parse_int_list, allow_hyphen_values = true)]
        set: IntList,
        #[arg(long)]
        window: usize,
        #[arg(long)]
        range: u64,
    },
    /// Membership in the tau_c neighborhood at level m.
    TauMember {
        /// Sequence c; defaults to --dseq.
        #[arg(long)]
        c: Option<String>,
        /// Take c as the subsequence of --dseq at these indices.
        #[arg(long)]
        indices: Option<String>,
        #[arg(long)]
        m: u64,
        #[arg(long, value_parser = parse_big, allow_hyphen_values = true)]
        x: BigInt,
    },
    /// Membership in b_n Z.
    LambdaMember {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = parse_big, allow_hyphen_values = true)]
        x: BigInt,
    },
    /// Membership in an intersection of tau_c neighborhoods.
    GammaMember {
        /// "INDICES@m" (subsequence of --dseq) or "all@m"; repeatable.
        #[arg(long = "member", required = true)]
        members: Vec<String>,
        #[arg(long, value_parser = parse_big, allow_hyphen_values = true)]
        x: BigInt,
    },
    /// Bounded search for membership in a Graev neighborhood.
    GraevMember {
        #[arg(long, value_parser = parse_big, allow_hyphen_values = true)]
        x: BigInt,
        #[command(flatten)]
        index: IndexArgs,
        #[arg(long)]
        max_k: Option<usize>,
        #[arg(long)]
        max_index: Option<usize>,
        #[arg(long, value_parser = parse_big)]
        max_abs: Option<BigInt>,
        #[arg(long)]
        max_states: Option<usize>,
    },
    /// The certified set A inside a Graev neighborhood.
    BuildA {
        #[command(flatten)]
        index: IndexArgs,
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
    /// Polar of A inside the window Z(b_M).
    GraevPolar {
        #[command(flatten)]
        index: IndexArgs,
        #[arg(long)]
        window: usize,
        #[arg(long, default_value_t = 40)]
        count: usize,
    },
    /// Build a subsequence c whose topology keeps a null sequence away from 0.
    Kill {
        /// "terms" for x_n = b_n, or a comma-separated list.
        #[arg(long, default_value = "terms", allow_hyphen_values = true)]
        xs: String,
        #[arg(long, default_value_t = 2)]
        rounds: usize,
        #[arg(long, default_value_t = analysis::killer::DEFAULT_HORIZON)]
        horizon: usize,
    },
    /// Exhaustive lemma checks.
    Verify {
        #[command(subcommand)]
        which: VerifyCommand,
    },
    /// All characters of the window Z(b_n).
    EnumChars {
        #[arg(long)]
        window: usize,
    },
}

#[derive(Subcommand, Debug)]
enum VerifyCommand {
    Lemma1 {
        #[arg(long, default_value_t = 200)]
        max_den: u64,
        #[arg(long, default_value_t = 12)]
        max_m: u64,
        #[arg(long, default_value_t = 8)]
        max_n: u64,
    },
    Chain {
        #[arg(long, default_value = "2,3")]
        alphabet: String,
        #[arg(long, default_value_t = 2000)]
        max_product: u64,
    },
    LqcMod {
        #[command(flatten)]
        index: IndexArgs,
        #[arg(long)]
        window: usize,
        #[arg(long, default_value_t = 40)]
        count: usize,
    },
}

/// The JSON document printed for every successful run.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub params: Value,
    pub result: Value,
    pub provenance: Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Ok,
    Fail,
    Unknown,
}

struct Outcome {
    report: RunReport,
    status: Status,
    summary: String,
}

type CmdResult = Result<Outcome, String>;

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn lib<T>(r: crate::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

struct Ctx {
    dseq: Option<String>,
}

impl Ctx {
    fn base(&self) -> Result<DSequence, String> {
        let spec = self.dseq.as_deref().ok_or("this command needs --dseq")?;
        lib(parse_dseq(spec))
    }

    fn report(&self, command: &str, params: Value, result: Value, provenance: Value) -> RunReport {
        let mut params = params;
        if let (Some(d), Value::Object(map)) = (&self.dseq, &mut params) {
            map.insert("dseq".into(), Value::String(d.clone()));
        }
        let mut provenance = provenance;
        if let Value::Object(map) = &mut provenance {
            map.insert("version".into(), Value::String(env!("CARGO_PKG_VERSION").into()));
        }
        RunReport {
            command: command.into(),
            params,
            result,
            provenance,
        }
    }
}

fn ok(report: RunReport, summary: String) -> CmdResult {
    Ok(Outcome {
        report,
        status: Status::Ok,
        summary,
    })
}

fn verdict(report: RunReport, pass: bool, name: &str) -> CmdResult {
    Ok(Outcome {
        report,
        status: if pass { Status::Ok } else { Status::Fail },
        summary: format!("{name}: {}", if pass { "PASS" } else { "FAIL" }),
    })
}

fn graev_spec(ctx: &Ctx, index: &IndexArgs) -> Result<(GraevSpec, Value), String> {
    let seq = index.build()?;
    let params = json!({"index_seq": seq.to_string()});
    Ok((GraevSpec::new(&ctx.base()?, seq), params))
}

fn expansion_json(d: &DigitExpansion) -> Value {
    to_value(d)
}

fn dispatch(ctx: &Ctx, cmd: &Command) -> CmdResult {
    match cmd {
        Command::Expand { value } => {
            let b = ctx.base()?;
            let d = lib(expand(&b, value))?;
            let violation = lib(d.partial_sum_violation())?;
            let result = json!({
                "expansion": expansion_json(&d),
                "partial_sum_violation": violation.map(|(n, s)| json!({"n": n, "sum": big(&s)})),
            });
            let provenance = json!({"digits_emitted": d.digits().len()});
            let n = d.digits().len();
            ok(
                ctx.report("expand", json!({"value": big(value)}), result, provenance),
                format!("expand: {n} digits"),
            )
        }
        Command::Value { digits } => {
            let b = ctx.base()?;
            let d = DigitExpansion::from_digits(&b, digits.0.clone());
            let v = lib(expansion_value(&d))?;
            ok(
                ctx.report("value", json!({"digits": bigs(&digits.0)}), json!({"value": big(&v)}), json!({})),
                format!("value: {v}"),
            )
        }
        Command::Term { n, all } => {
            let b = ctx.base()?;
            let t = lib(b.term(*n))?;
            let mut result = json!({"n": n, "term": big(&t)});
            if *n >= 1 {
                result["ratio"] = big(&lib(b.ratio(*n))?);
            }
            if *all {
                result["terms"] = bigs(&lib(b.terms(*n))?);
            }
            ok(
                ctx.report("term", json!({"n": n, "all": all}), result, json!({})),
                format!("term: b_{n} = {t}"),
            )
        }
        Command::Polar { set, window } => {
            let b = ctx.base()?;
            let p = lib(analysis::polar_window(&set.0, &b, *window))?;
            let size = lib(b.term(*window))?;
            let n = p.len();
            ok(
                ctx.report(
                    "polar",
                    json!({"set": bigs(&set.0), "window": window}),
                    json!({"characters": to_value(&p), "count": n}),
                    json!({"window_size": big(&size)}),
                ),
                format!("polar: {n} of {size} characters"),
            )
        }
        Command::Hull { set, window, range } => {
            let b = ctx.base()?;
            let h = lib(analysis::qc_hull_window(&set.0, &b, *window, *range))?;
            let n = h.points.len();
            ok(
                ctx.report(
                    "hull",
                    json!({"set": bigs(&set.0), "window": window, "range": range}),
                    to_value(&h),
                    json!({"relative_to": {"window": window, "range": range}}),
                ),
                format!("hull: {n} points (relative to window {window}, range {range})"),
            )
        }
        Command::QcCheck { set, window, range } => {
            let b = ctx.base()?;
            let v = lib(analysis::is_quasiconvex_window(&set.0, &b, *window, *range))?;
            let q = v.quasiconvex;
            ok(
                ctx.report(
                    "qc-check",
                    json!({"set": bigs(&set.0), "window": window, "range": range}),
                    to_value(&v),
                    json!({"relative_to": {"window": window, "range": range}}),
                ),
                format!("qc-check: {}", if q { "quasi-convex" } else { "not quasi-convex" }),
            )
        }
        Command::TauMember { c, indices, m, x } => {
            let seq = match (c, indices) {
                (Some(_), Some(_)) => return Err("give either --c or --indices, not both".into()),
                (Some(spec), None) => lib(parse_dseq(spec))?,
                (None, Some(idx)) => lib(subsequence(&ctx.base()?, &parse_index_list(idx)?))?,
                (None, None) => ctx.base()?,
            };
            if ctx.dseq.is_some() && (c.is_some() || indices.is_some()) {
                lib(NeighborhoodSpec::new(
                    &ctx.base()?,
                    NeighborhoodKind::Tau { c: seq.clone(), m: *m },
                ))?;
            }
            let v = lib(topo::tau_member(&seq, *m, x))?;
            let member = v.member;
            ok(
                ctx.report(
                    "tau-member",
                    json!({"c": seq.descriptor(), "m": m, "x": big(x)}),
                    to_value(&v),
                    json!({"cutoff": v.cutoff}),
                ),
                format!("tau-member: {member}"),
            )
        }
        Command::LambdaMember { n, x } => {
            let b = ctx.base()?;
            let member = lib(topo::lambda_member(&b, *n, x))?;
            let bn = lib(b.term(*n))?;
            ok(
                ctx.report(
                    "lambda-member",
                    json!({"n": n, "x": big(x)}),
                    json!({"member": member, "modulus": big(&bn)}),
                    json!({}),
                ),
                format!("lambda-member: {member}"),
            )
        }
        Command::GammaMember { members, x } => {
            let b = ctx.base()?;
            let mut family = Vec::with_capacity(members.len());
            for spec in members {
                let (idx, m) = spec
                    .rsplit_once('@')
                    .ok_or_else(|| format!("--member expects \"INDICES@m\", found `{spec}`"))?;
                let m: u64 = m.trim().parse().map_err(|_| format!("`{m}` is not a level"))?;
                let c = if idx.trim() == "all" {
                    b.clone()
                } else {
                    lib(subsequence(&b, &parse_index_list(idx)?))?
                };
                family.push((c, m));
            }
            lib(NeighborhoodSpec::new(&b, NeighborhoodKind::Gamma(family.clone())))?;
            let v = lib(topo::gamma_member(&family, x))?;
            let member = v.member;
            let described: Vec<Value> = family
                .iter()
                .map(|(c, m)| json!({"c": c.descriptor(), "m": m}))
                .collect();
            ok(
                ctx.report("gamma-member", json!({"family": described, "x": big(x)}), to_value(&v), json!({})),
                format!("gamma-member: {member}"),
            )
        }
        Command::GraevMember {
            x,
            index,
            max_k,
            max_index,
            max_abs,
            max_states,
        } => {
            let (spec, mut params) = graev_spec(ctx, index)?;
            let caps = SearchCaps {
                max_k: *max_k,
                max_index: *max_index,
                max_abs: max_abs.clone(),
                max_states: *max_states,
            };
            let r = lib(graev::v_member(&spec, x, &caps))?;
            params["x"] = big(x);
            let provenance = json!({"caps": to_value(&r.caps), "depth_searched": r.depth_searched});
            let yes = r.membership.is_yes();
            Ok(Outcome {
                report: ctx.report("graev-member", params, to_value(&r.membership), provenance),
                status: if yes { Status::Ok } else { Status::Unknown },
                summary: format!("graev-member: {}", if yes { "YES" } else { "UNKNOWN" }),
            })
        }
        Command::BuildA { index, count } => {
            let (spec, mut params) = graev_spec(ctx, index)?;
            let a = lib(graev::build_a(&spec, *count))?;
            params["count"] = json!(count);
            let n = a.n;
            ok(
                ctx.report("build-a", params, to_value(&a), json!({"ratio_bound": a.ratio_bound})),
                format!("build-a: N = {n}, {count} elements"),
            )
        }
        Command::GraevPolar { index, window, count } => {
            let (spec, mut params) = graev_spec(ctx, index)?;
            let p = lib(graev::graev_polar_window(&spec, *window, *count))?;
            params["window"] = json!(window);
            params["count"] = json!(count);
            let size = lib(spec.base().term(*window))?;
            let n = p.characters.len();
            ok(
                ctx.report("graev-polar", params, to_value(&p), json!({"window_size": big(&size), "count": count})),
                format!("graev-polar: {n} characters, N = {}", p.n),
            )
        }
        Command::Kill { xs, rounds, horizon } => {
            let b = ctx.base()?;
            let (source, xs_param) = if xs.trim() == "terms" {
                (Xs::Terms, json!("terms"))
            } else {
                let list = parse_int_list(xs)?.0;
                let p = bigs(&list);
                (Xs::List(list), p)
            };
            let k = lib(analysis::kill_sequence(&b, &source, *rounds, *horizon))?;
            let pairs = k.pairs();
            let provenance = json!({"horizon": k.horizon, "null_check_levels": k.null_checks.len()});
            ok(
                ctx.report(
                    "kill",
                    json!({"xs": xs_param, "rounds": rounds, "horizon": horizon}),
                    to_value(&k),
                    provenance,
                ),
                format!("kill: rounds {pairs:?}"),
            )
        }
        Command::Verify { which } => match which {
            VerifyCommand::Lemma1 { max_den, max_m, max_n } => {
                let v = lib(analysis::verify_lemma1(*max_den, *max_m, *max_n))?;
                verdict(
                    ctx.report(
                        "verify lemma1",
                        json!({"max_den": max_den, "max_m": max_m, "max_n": max_n}),
                        to_value(&v),
                        json!({"points": v.points}),
                    ),
                    v.pass,
                    "verify lemma1",
                )
            }
            VerifyCommand::Chain { alphabet, max_product } => {
                let letters: Vec<u64> = parse_index_list(alphabet)?.into_iter().map(|m| m as u64).collect();
                let v = lib(analysis::verify_lemma_chain(&letters, *max_product))?;
                verdict(
                    ctx.report(
                        "verify chain",
                        json!({"alphabet": letters, "max_product": max_product}),
                        to_value(&v),
                        json!({"max_den": v.max_den, "chains": v.chains}),
                    ),
                    v.pass,
                    "verify chain",
                )
            }
            VerifyCommand::LqcMod { index, window, count } => {
                let (spec, mut params) = graev_spec(ctx, index)?;
                let v = lib(analysis::verify_lqc_modification(&spec, *window, *count))?;
                params["window"] = json!(window);
                params["count"] = json!(count);
                let size = lib(spec.base().term(*window))?;
                verdict(
                    ctx.report("verify lqc-mod", params, to_value(&v), json!({"window_size": big(&size)})),
                    v.pass,
                    "verify lqc-mod",
                )
            }
        },
        Command::EnumChars { window } => {
            let b = ctx.base()?;
            let chars = lib(enum_window(&b, *window))?;
            let n = chars.len();
            ok(
                ctx.report(
                    "enum-chars",
                    json!({"window": window}),
                    json!({"characters": to_value(&chars), "count": n}),
                    json!({}),
                ),
                format!("enum-chars: {n} characters"),
            )
        }
    }
}

fn render(v: &RunReport, indent: usize) -> String {
    if indent == 0 {
        return serde_json::to_string(v).expect("reports serialize");
    }
    let pad = vec![b' '; indent];
    let mut buf = Vec::new();
    let fmt = serde_json::ser::PrettyFormatter::with_indent(&pad);
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, fmt);
    v.serialize(&mut ser).expect("reports serialize");
    String::from_utf8(buf).expect("JSON is UTF-8")
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let ctx = Ctx { dseq: cli.dseq.clone() };
    match dispatch(&ctx, &cli.command) {
        Ok(o) => {
            let _ = writeln!(out, "{}", render(&o.report, cli.json_indent));
            let _ = writeln!(err, "{}", o.summary);
            match o.status {
                Status::Ok => 0,
                Status::Fail => 1,
                Status::Unknown if cli.strict => 1,
                Status::Unknown => 0,
            }
        }
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}
