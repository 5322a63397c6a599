//! Command-line front end and JSON formats.
//!
//! Indices are 1-based in every file and report. Exit codes:
//! 0 success, 1 internal error, 2 invalid input or violated precondition,
//! 3 search truncated by a resource cap, 4 Laurent violation.

use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::explorer::{self, Dedup, ExchangeGraph, LaurentReport, Limits, SeedNode, Side};
use crate::lattice::{IntegerMatrix, RationalMatrix};
use crate::seed::{picard_report, FixedData, PicardReport, Seed};
use crate::toric::{self, Rank2Data, Rank2Report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_TRUNCATED: i32 = 3;
pub const EXIT_LAURENT: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "cluster-geom", version, about = "Exact cluster mutations and rank-two toric models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Mutate a seed along a path and print the result.
    Mutate {
        file: String,
        /// Comma-separated 1-based mutation indices.
        #[arg(long, default_value = "")]
        path: String,
    },
    /// Breadth-first search of the exchange graph.
    Explore {
        file: String,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long, value_enum, default_value_t = DedupArg::Labeled)]
        dedup: DedupArg,
        #[arg(long)]
        threads: Option<usize>,
        /// Include every node in the report.
        #[arg(long)]
        emit_nodes: bool,
    },
    /// Check that z^q stays Laurent along all mutation paths.
    LaurentCheck {
        file: String,
        #[arg(long, value_enum, default_value_t = SideArg::A)]
        side: SideArg,
        /// Comma-separated vector, `0`, or `f<i>` / `e<i>` for a basis vector of the seed.
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Invariant factors of the Picard group.
    Picard { file: String },
    /// Rank-two analysis: symmetric form on K and the two classifiers.
    Rank2 {
        file: String,
        /// A mutation path (comma-separated, 1-based) to check invariance on; repeatable.
        /// Defaults to every single mutation.
        #[arg(long = "mutations")]
        mutations: Vec<String>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum DedupArg {
    Labeled,
    Unlabeled,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SideArg {
    #[value(name = "A", alias = "a")]
    A,
    #[value(name = "X", alias = "x")]
    X,
}

/// Result of one CLI invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::LaurentViolation { .. } => EXIT_LAURENT,
        Error::Internal(_) => EXIT_INTERNAL,
        _ => EXIT_INVALID,
    }
}

/// Runs the CLI on `args` (including the program name).
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match dispatch(cli.command) {
        Ok((code, v)) => Outcome {
            code,
            stdout: pretty(&v),
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: exit_code(&e),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn dispatch(cmd: Command) -> Result<(i32, Value)> {
    match cmd {
        Command::Mutate { file, path } => {
            let seed = load_seed(&read(&file)?)?;
            let path = parse_indices(&path)?;
            let s = seed.seed.mutate_path(&path)?;
            Ok((EXIT_OK, seed_to_json(&s, seed.rank2.as_ref())))
        }
        Command::Explore {
            file,
            depth,
            dedup,
            threads,
            emit_nodes,
        } => {
            let seed = load_seed(&read(&file)?)?;
            let dedup = match dedup {
                DedupArg::Labeled => Dedup::Labeled,
                DedupArg::Unlabeled => Dedup::Unlabeled,
            };
            let g = explorer::explore(SeedNode::root(seed.seed), depth, dedup, Limits::from_env()?, threads)?;
            let code = if !g.laurent_ok {
                EXIT_LAURENT
            } else if g.truncated {
                EXIT_TRUNCATED
            } else {
                EXIT_OK
            };
            Ok((code, explore_json(&g, emit_nodes)))
        }
        Command::LaurentCheck {
            file,
            side,
            q,
            depth,
            threads,
        } => {
            let seed = load_seed(&read(&file)?)?.seed;
            let side = match side {
                SideArg::A => Side::A,
                SideArg::X => Side::X,
            };
            let q = parse_q(&seed, &q)?;
            let r = explorer::verify_laurent(&seed, side, &q, depth, Limits::from_env()?, threads)?;
            let code = if !r.laurent_ok {
                EXIT_LAURENT
            } else if r.truncated {
                EXIT_TRUNCATED
            } else {
                EXIT_OK
            };
            Ok((code, laurent_json(&r)))
        }
        Command::Picard { file } => {
            let seed = load_seed(&read(&file)?)?.seed;
            Ok((EXIT_OK, picard_json(&picard_report(&seed)?)))
        }
        Command::Rank2 { file, mutations } => {
            let v = parse_json(&read(&file)?)?;
            let data = load_rank2(&v)?;
            let paths: Vec<Vec<usize>> = if mutations.is_empty() {
                (0..data.len()).map(|k| vec![k]).collect()
            } else {
                mutations.iter().map(|p| parse_indices(p)).collect::<Result<_>>()?
            };
            for p in &paths {
                if let Some(&k) = p.iter().find(|&&k| k >= data.len()) {
                    return Err(Error::IndexOutOfRange(k + 1));
                }
            }
            let r = toric::rank2_report(&data, &paths)?;
            Ok((EXIT_OK, rank2_json(&r)))
        }
    }
}

fn read(path: &str) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {path}: {e}")))
}

fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("invalid JSON: {e}")))
}

/// Parses comma-separated 1-based indices into 0-based ones.
pub fn parse_indices(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            let k: usize = t
                .parse()
                .map_err(|_| Error::Parse(format!("bad index {t:?}")))?;
            k.checked_sub(1)
                .ok_or_else(|| Error::Parse("indices are 1-based".into()))
        })
        .collect()
}

fn parse_q(seed: &Seed, s: &str) -> Result<Vec<BigInt>> {
    let t = s.trim();
    let n = seed.rank();
    if t == "0" {
        return Ok(vec![BigInt::zero(); n]);
    }
    for (prefix, f) in [('f', Seed::f as fn(&Seed, usize) -> Vec<BigInt>), ('e', Seed::e)] {
        if let Some(rest) = t.strip_prefix(prefix) {
            let i: usize = rest
                .parse()
                .map_err(|_| Error::Parse(format!("bad vector {t:?}")))?;
            if i == 0 || i > n {
                return Err(Error::IndexOutOfRange(i));
            }
            return Ok(f(seed, i - 1));
        }
    }
    let v: Vec<BigInt> = t
        .split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad vector entry {x:?}")))
        })
        .collect::<Result<_>>()?;
    if v.len() != n {
        return Err(Error::Dimension(format!("q has length {} for rank {n}", v.len())));
    }
    Ok(v)
}

fn big_json(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

fn big_list(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(big_json).collect())
}

fn matrix_json(m: &IntegerMatrix) -> Value {
    Value::Array(m.to_rows().iter().map(|r| big_list(r)).collect())
}

fn rational_json(r: &BigRational) -> Value {
    if r.is_integer() {
        big_json(&r.to_integer())
    } else {
        json!(format!("{}/{}", r.numer(), r.denom()))
    }
}

fn one_based(v: &[usize]) -> Value {
    json!(v.iter().map(|i| i + 1).collect::<Vec<_>>())
}

fn group_name(inv: &[BigInt]) -> String {
    if inv.is_empty() {
        return "0".into();
    }
    inv.iter()
        .map(|s| if s.is_zero() { "Z".to_string() } else { format!("Z/{s}") })
        .collect::<Vec<_>>()
        .join(" + ")
}

fn parse_big(v: &Value, what: &str) -> Result<BigInt> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| Error::Parse(format!("{what}: {n} is not an integer"))),
        Value::String(s) => s
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("{what}: {s:?} is not an integer"))),
        _ => Err(Error::Parse(format!("{what}: expected an integer"))),
    }
}

fn parse_rational(v: &Value, what: &str) -> Result<BigRational> {
    if let Value::String(s) = v {
        if let Some((p, q)) = s.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|_| Error::Parse(format!("{what}: {s:?}")))?;
            let q: BigInt = q.trim().parse().map_err(|_| Error::Parse(format!("{what}: {s:?}")))?;
            if q.is_zero() {
                return Err(Error::Parse(format!("{what}: zero denominator")));
            }
            return Ok(BigRational::new(p, q));
        }
    }
    parse_big(v, what).map(BigRational::from_integer)
}

fn parse_list<T>(v: &Value, what: &str, f: impl Fn(&Value) -> Result<T>) -> Result<Vec<T>> {
    v.as_array()
        .ok_or_else(|| Error::Parse(format!("{what}: expected an array")))?
        .iter()
        .map(f)
        .collect()
}

fn parse_int_matrix(v: &Value, what: &str) -> Result<IntegerMatrix> {
    let rows = parse_list(v, what, |r| parse_list(r, what, |x| parse_big(x, what)))?;
    IntegerMatrix::try_from_rows(rows)
}

fn parse_index_list(v: &Value, what: &str, n: usize) -> Result<Vec<usize>> {
    parse_list(v, what, |x| {
        let i = x
            .as_u64()
            .ok_or_else(|| Error::Parse(format!("{what}: expected positive integers")))?
            as usize;
        if i == 0 || i > n {
            return Err(Error::Parse(format!("{what}: index {i} out of range 1..{n}")));
        }
        Ok(i - 1)
    })
}

/// A seed read from JSON, with the rank-two block it was built from, if any.
pub struct LoadedSeed {
    pub seed: Seed,
    pub rank2: Option<Rank2Data>,
}

fn parse_rank2_block(v: &Value) -> Result<Rank2Data> {
    let w = parse_list(
        v.get("w").ok_or_else(|| Error::Parse("rank2 data needs \"w\"".into()))?,
        "w",
        |p| {
            let c = parse_list(p, "w", |x| parse_big(x, "w"))?;
            match <[BigInt; 2]>::try_from(c) {
                Ok(a) => Ok(a),
                Err(_) => Err(Error::Parse("w: vectors must have two entries".into())),
            }
        },
    )?;
    let nu = match v.get("nu") {
        Some(x) => parse_list(x, "nu", |y| parse_big(y, "nu"))?,
        None => vec![BigInt::from(1); w.len()],
    };
    Rank2Data::new(w, nu)
}

/// Reads a seed file. The fixed data come from `skew`, else `epsilon`, else
/// the `rank2` block; `basis` and `path` place the seed away from the root.
pub fn load_seed(text: &str) -> Result<LoadedSeed> {
    let v = parse_json(text)?;
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Parse("seed file must be a JSON object".into()))?;
    let rank2 = match obj.get("rank2") {
        Some(r) => Some(parse_rank2_block(r)?),
        None if obj.contains_key("w") && !obj.contains_key("skew") => Some(parse_rank2_block(&v)?),
        None => None,
    };
    let root_from_rank2 = match &rank2 {
        Some(r) => Some(toric::build_seed(r)?),
        None => None,
    };
    let n = match obj.get("rank") {
        Some(r) => r
            .as_u64()
            .ok_or_else(|| Error::Parse("rank must be a nonnegative integer".into()))?
            as usize,
        None => match (&root_from_rank2, obj.get("skew").or(obj.get("epsilon"))) {
            (Some(s), _) => s.rank(),
            (None, Some(m)) => m.as_array().map_or(0, Vec::len),
            (None, None) => return Err(Error::Parse("seed file needs \"rank\"".into())),
        },
    };
    let d = match obj.get("d") {
        Some(x) => parse_list(x, "d", |y| parse_big(y, "d"))?,
        None => match &root_from_rank2 {
            Some(s) => s.d().to_vec(),
            None => vec![BigInt::from(1); n],
        },
    };
    let frozen = match obj.get("frozen") {
        Some(x) => parse_index_list(x, "frozen", n)?,
        None => Vec::new(),
    };
    let fixed = if let Some(skew) = obj.get("skew") {
        let rows = parse_list(skew, "skew", |r| parse_list(r, "skew", |x| parse_rational(x, "skew")))?;
        let m = RationalMatrix::try_from_rows(rows)?;
        if m.rows() != n {
            return Err(Error::Dimension(format!("skew has {} rows for rank {n}", m.rows())));
        }
        FixedData::new(m, d, &frozen)?
    } else if let Some(s) = &root_from_rank2 {
        if !frozen.is_empty() {
            return Err(Error::Parse("rank-two data has no frozen variables".into()));
        }
        if d != s.d() {
            return Err(Error::Parse("d does not match the rank-two data".into()));
        }
        (**s.fixed()).clone()
    } else if let Some(e) = obj.get("epsilon") {
        FixedData::from_epsilon(&parse_int_matrix(e, "epsilon")?, d, &frozen)?
    } else {
        return Err(Error::Parse("seed file needs \"skew\", \"epsilon\" or \"rank2\"".into()));
    };
    if fixed.rank() != n {
        return Err(Error::Dimension(format!("data of rank {} for rank {n}", fixed.rank())));
    }
    let fixed = Arc::new(fixed);
    let path = match obj.get("path") {
        Some(p) => parse_index_list(p, "path", n)?,
        None => Vec::new(),
    };
    let seed = match obj.get("basis") {
        Some(b) => Seed::from_basis(fixed, parse_int_matrix(b, "basis")?, path)?,
        None => Seed::root(fixed).mutate_path(&path)?,
    };
    if let (Some(e), true) = (obj.get("epsilon"), obj.contains_key("skew") || rank2.is_some()) {
        if parse_int_matrix(e, "epsilon")? != *seed.epsilon() {
            return Err(Error::InvalidSeed("epsilon does not match the skew form".into()));
        }
    }
    Ok(LoadedSeed { seed, rank2 })
}

/// Canonical JSON of a seed; reading it back gives the same seed.
pub fn seed_to_json(s: &Seed, rank2: Option<&Rank2Data>) -> Value {
    let fixed = s.fixed();
    let skew: Vec<Value> = fixed
        .skew()
        .to_rows()
        .iter()
        .map(|r| Value::Array(r.iter().map(rational_json).collect()))
        .collect();
    let mut m = Map::new();
    m.insert("rank".into(), json!(s.rank()));
    m.insert("skew".into(), Value::Array(skew));
    m.insert("d".into(), big_list(s.d()));
    m.insert("frozen".into(), one_based(&fixed.frozen_indices()));
    m.insert("basis".into(), matrix_json(s.basis()));
    m.insert("epsilon".into(), matrix_json(s.epsilon()));
    m.insert("path".into(), one_based(s.path()));
    if let Some(r) = rank2 {
        m.insert("rank2".into(), rank2_data_json(r));
    }
    Value::Object(m)
}

fn rank2_data_json(r: &Rank2Data) -> Value {
    json!({
        "w": r.w.iter().map(|u| big_list(u)).collect::<Vec<_>>(),
        "nu": big_list(&r.nu),
    })
}

/// Rank-two data from a JSON value: a bare `{w, nu}`, a seed file with a
/// `rank2` block, or any seed file whose seed has a rank-two realization.
pub fn load_rank2(v: &Value) -> Result<Rank2Data> {
    if let Some(r) = v.get("rank2") {
        return parse_rank2_block(r);
    }
    if v.get("w").is_some() && v.get("skew").is_none() {
        return parse_rank2_block(v);
    }
    let seed = load_seed(&v.to_string())?.seed;
    toric::seed_to_rank2(&seed)
}

fn witnesses_json(w: &[explorer::Witness]) -> Value {
    Value::Array(
        w.iter()
            .map(|w| json!({ "path": one_based(&w.path), "expression": w.expression }))
            .collect(),
    )
}

pub fn explore_json(g: &ExchangeGraph, emit_nodes: bool) -> Value {
    let r = g.report();
    let mut m = Map::new();
    m.insert("depth".into(), json!(r.depth));
    m.insert(
        "dedup".into(),
        json!(match r.dedup {
            Dedup::Labeled => "labeled",
            Dedup::Unlabeled => "unlabeled",
        }),
    );
    m.insert("nodes".into(), json!(r.nodes));
    m.insert("edges".into(), json!(r.edges));
    m.insert("distinct_clusters".into(), json!(r.distinct_clusters));
    m.insert("distinct_cluster_variables".into(), json!(r.distinct_cluster_variables));
    m.insert("laurent_ok".into(), json!(r.laurent_ok));
    m.insert("witnesses".into(), witnesses_json(&r.witnesses));
    m.insert("max_terms".into(), json!(r.max_terms));
    m.insert("max_abs_exponent".into(), json!(r.max_abs_exponent));
    m.insert("positive_coefficients_observed".into(), json!(r.positive_coefficients_observed));
    m.insert("truncated".into(), json!(r.truncated));
    if emit_nodes {
        let nodes: Vec<Value> = g
            .nodes
            .iter()
            .enumerate()
            .map(|(i, nd)| {
                json!({
                    "id": i,
                    "depth": nd.depth,
                    "path": one_based(nd.path()),
                    "epsilon": matrix_json(nd.seed.epsilon()),
                    "cluster_variables": nd.cluster_vars.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
                })
            })
            .collect();
        m.insert("node_list".into(), Value::Array(nodes));
        let edges: Vec<Value> = g
            .edges
            .iter()
            .map(|e| json!({ "from": e.from, "index": e.index + 1, "to": e.to }))
            .collect();
        m.insert("edge_list".into(), Value::Array(edges));
    }
    Value::Object(m)
}

pub fn laurent_json(r: &LaurentReport) -> Value {
    json!({
        "side": match r.side { Side::A => "A", Side::X => "X" },
        "q": big_list(&r.q),
        "depth": r.depth,
        "states": r.states,
        "laurent_ok": r.laurent_ok,
        "witnesses": witnesses_json(&r.witnesses),
        "max_terms": r.max_terms,
        "max_abs_exponent": r.max_abs_exponent,
        "truncated": r.truncated,
    })
}

pub fn picard_json(r: &PicardReport) -> Value {
    json!({
        "invariants": big_list(&r.invariants),
        "group": group_name(&r.invariants),
        "torsion_free": r.torsion_free,
        "factoriality": r.factoriality,
    })
}

pub fn rank2_json(r: &Rank2Report) -> Value {
    let opt = |v: Option<Value>| v.unwrap_or(Value::Null);
    json!({
        "w": rank2_data_json(&r.data)["w"].clone(),
        "nu": big_list(&r.data.nu),
        "epsilon": matrix_json(&r.epsilon),
        "d": big_list(&r.d),
        "K_basis": r.k_basis.iter().map(|k| big_list(k)).collect::<Vec<_>>(),
        "fan": opt(r.fan.as_ref().map(|f| Value::Array(f.iter().map(|u| big_list(u)).collect()))),
        "fan_self_intersections": opt(r.fan_self_intersections.as_ref().map(|v| big_list(v))),
        "gram": opt(r.gram.as_ref().map(matrix_json)),
        "classification": opt(r.fg.as_ref().map(|f| json!(f.classification.as_str()))),
        "inertia": opt(r.fg.as_ref().and_then(|f| f.inertia).map(|i| json!({
            "positive": i.positive, "negative": i.negative, "zero": i.zero
        }))),
        "fg_conjecture_possible": opt(r.fg.as_ref().map(|f| json!(f.fg_conjecture_possible))),
        "fg_rationale": opt(r.fg.as_ref().map(|f| json!(f.rationale))),
        "boundary_self_intersections": opt(r.non_fg.boundary_self_intersections.as_ref().map(|v| big_list(v))),
        "all_minus_two": opt(r.non_fg.all_minus_two.map(|b| json!(b))),
        "non_noetherian_principal": opt(r.non_fg.non_noetherian_principal.map(|b| json!(b))),
        "non_fg_status": r.non_fg.status,
        "invariance_checked_paths": r.invariance_checked_paths.iter().map(|(p, ok)| json!({
            "path": one_based(p), "invariant": ok
        })).collect::<Vec<_>>(),
        "coprime_seed": r.is_coprime_seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indices_are_one_based() {
        assert_eq!(parse_indices("1, 3,2").unwrap(), vec![0, 2, 1]);
        assert_eq!(parse_indices("").unwrap(), Vec::<usize>::new());
        assert!(parse_indices("0").is_err());
    }

    #[test]
    fn seed_json_round_trip() {
        let text = r#"{"rank": 4, "skew": [[0, "1/2", 1, 0], ["-1/2", 0, 2, 0], [-1, -2, 0, 1], [0, 0, -1, 0]], "d": [1, 1, 1, 1], "frozen": [1, 2]}"#;
        let s = load_seed(text).unwrap().seed;
        let t = s.mutate_path(&[2, 3, 2, 3]).unwrap();
        let v = seed_to_json(&t, None);
        let back = load_seed(&v.to_string()).unwrap().seed;
        assert_eq!(back, t);
        assert_eq!(seed_to_json(&back, None), v);
        assert_eq!(v["skew"][0][1], json!("1/2"));
    }

    #[test]
    fn epsilon_is_verified() {
        let bad = r#"{"rank": 2, "skew": [[0, 1], [-1, 0]], "d": [1, 1], "frozen": [], "epsilon": [[0, 2], [-2, 0]]}"#;
        assert!(matches!(load_seed(bad), Err(Error::InvalidSeed(_))));
    }

    #[test]
    fn group_names() {
        assert_eq!(group_name(&[]), "0");
        assert_eq!(
            group_name(&[BigInt::from(2), BigInt::from(2), BigInt::zero()]),
            "Z/2 + Z/2 + Z"
        );
    }
}
