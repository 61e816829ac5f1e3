//! The `hesslab` command line. Every command prints one JSON document on
//! stdout; errors go to stderr as JSON with a nonzero exit code.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cache::{self, Cache, CacheKey};
use crate::census::{
    admissible_prime, auto_mode, census_poincare, count_type, interpolation_cost, verify_heuristic,
    CensusMode, DEFAULT_FLAG_BUDGET,
};
use crate::closedform::{
    irreducible_mmax, poincare_mmax_for_type, top_coefficient_mmax, Irreducibility,
};
use crate::error::{Error, Result};
use crate::ffla::ExactMatrix;
use crate::hesscore::{hfpjf, HessenbergSpec, HessenbergVector, JordanType};
use crate::multipoly::MultiPoly;
use crate::patches::{
    in_sing_candidate, is_smooth_point_mmax, linear_part, patch_determinant, patch_report,
    squarefree_witness,
};
use crate::paving::{euler_characteristic, poincare_tymoczko};
use crate::qpoly::BettiPolynomial;
use crate::symgrp::{ls_singular_maximal, schubert_euler, schubert_poincare, Permutation};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION_FAILURE: i32 = 1;
pub const EXIT_INVALID_INPUT: i32 = 2;
pub const EXIT_INADMISSIBLE_PRIME: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "hesslab",
    version,
    about = "Exact computations with Hessenberg varieties"
)]
pub struct Cli {
    /// Indent output and add human-readable polynomial strings.
    #[arg(long, global = true)]
    pub pretty: bool,
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Neither read nor write the result cache.
    #[arg(long, global = true)]
    pub no_cache: bool,
    /// Cache directory (default: $HESSLAB_CACHE_DIR, then the user cache dir).
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Poincaré polynomial of B(x, H(m)) in t = q^2.
    Poincare {
        /// Jordan type, e.g. "[[2,1],[1]] @ [0,5]".
        #[arg(long = "type")]
        jordan_type: String,
        /// Hessenberg vector "2,3,3" or one of max, sing, full.
        #[arg(long, default_value = "max")]
        m: String,
        #[arg(long, value_enum, default_value_t = PoincareMethod::Tymoczko)]
        method: PoincareMethod,
        /// Run a census interpolation even past the flag budget.
        #[arg(long)]
        force: bool,
    },
    /// Count F_p-points cell by cell.
    Count {
        #[arg(long = "type")]
        jordan_type: String,
        #[arg(long, default_value = "max")]
        m: String,
        #[arg(long)]
        p: u64,
        /// Count even when p is inadmissible.
        #[arg(long)]
        force: bool,
    },
    /// Compare the census with the Poincaré polynomial at t = p.
    Verify {
        #[arg(long = "type")]
        jordan_type: String,
        #[arg(long, default_value = "max")]
        m: String,
        #[arg(long)]
        p: u64,
    },
    /// Euler characteristic: the number of cells in the paving.
    Euler {
        #[arg(long = "type")]
        jordan_type: String,
        #[arg(long, default_value = "max")]
        m: String,
    },
    /// Irreducibility of B(x, H(m_max)) and its singular locus.
    Classify {
        #[arg(long = "type")]
        jordan_type: String,
    },
    /// Schubert variety X_w: Poincaré polynomial, singular locus, or Euler
    /// characteristic.
    Schubert {
        /// One-line notation or an alias such as s2w0@n=5.
        w: String,
        #[arg(value_enum)]
        query: SchubertQuery,
    },
    /// Local equation of B(x, H(m_max)) on the patch around gB.
    Patch {
        /// JSON rows (inline or a file path), diag(a,b,...), or I.
        x: String,
        g: String,
        #[arg(value_enum)]
        query: PatchQuery,
    },
    /// Inspect or clear the result cache.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PoincareMethod {
    Tymoczko,
    Closed,
    CensusInterp,
    CensusCellwise,
    /// Every applicable route, checked for agreement.
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SchubertQuery {
    Poincare,
    Singular,
    Euler,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PatchQuery {
    Det,
    Linear,
    Smooth,
    Witness,
    Report,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum CacheAction {
    /// Print the cache directory.
    Path,
    /// List cached entries.
    List,
    /// Delete every entry.
    Clear,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InadmissiblePrime { .. } => EXIT_INADMISSIBLE_PRIME,
        Error::Inconsistent(_) => EXIT_VERIFICATION_FAILURE,
        _ => EXIT_INVALID_INPUT,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidInput(_) => "invalid-input",
        Error::Parse { .. } => "parse",
        Error::SizeMismatch { .. } => "size-mismatch",
        Error::NotPrime(_) => "not-prime",
        Error::Singular => "singular",
        Error::InadmissiblePrime { .. } => "inadmissible-prime",
        Error::NotInVariety => "not-in-variety",
        Error::Inconsistent(_) => "inconsistent",
        Error::Io(_) => "io",
        Error::Json(_) => "json",
    }
}

/// Parsed arguments in, process exit code out.
pub fn run() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_from(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_from<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID_INPUT
            } else {
                EXIT_OK
            };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let outcome = match cli.jobs {
        Some(jobs) => match rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build()
        {
            Ok(pool) => pool.install(|| execute(&cli)),
            Err(e) => Err(Error::invalid(format!("cannot start {jobs} workers: {e}"))),
        },
        None => execute(&cli),
    };
    match outcome {
        Ok((value, code)) => {
            let text = if cli.pretty {
                serde_json::to_string_pretty(&value)
            } else {
                serde_json::to_string(&value)
            }
            .expect("JSON values serialize");
            let _ = writeln!(out, "{text}");
            code
        }
        Err(e) => {
            let _ = writeln!(
                err,
                "{}",
                json!({"error": error_kind(&e), "message": e.to_string()})
            );
            exit_code(&e)
        }
    }
}

struct Ctx<'a> {
    cli: &'a Cli,
    cache: Option<Cache>,
}

impl Ctx<'_> {
    /// The cached value for `key`, or `compute` on a miss (then stored).
    fn cached(&self, key: CacheKey, compute: impl FnOnce() -> Result<Value>) -> Result<Value> {
        if let Some(hit) = self.cache.as_ref().and_then(|c| c.get(&key)) {
            return Ok(hit);
        }
        let value = compute()?;
        if let Some(c) = &self.cache {
            c.put(&key, &value)?;
        }
        Ok(value)
    }
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

fn poly_value(poly: &BettiPolynomial, pretty: bool) -> Value {
    if pretty {
        json!({"coeffs": poly.coeffs(), "t": poly.to_string(), "q": poly.render_q()})
    } else {
        json!(poly.coeffs())
    }
}

fn multipoly_value(poly: &MultiPoly, pretty: bool) -> Result<Value> {
    let terms = to_value(poly)?;
    Ok(if pretty {
        json!({"terms": terms, "display": poly.to_string()})
    } else {
        terms
    })
}

fn type_and_m(jordan_type: &str, m: &str) -> Result<(JordanType, HessenbergVector)> {
    let t: JordanType = jordan_type.parse()?;
    let m = HessenbergSpec::from_str(m)?.resolve(t.n())?;
    Ok((t, m))
}

fn key(op: &str, t: &JordanType, m: &HessenbergVector, p: Option<u64>) -> CacheKey {
    CacheKey {
        operation: op.into(),
        n: t.n(),
        p,
        jordan_type: t.to_string(),
        m: m.to_string(),
    }
}

fn execute(cli: &Cli) -> Result<(Value, i32)> {
    let cache = (!cli.no_cache)
        .then(|| Cache::new(cli.cache_dir.clone().unwrap_or_else(cache::default_dir)));
    let ctx = Ctx { cli, cache };
    let pretty = cli.pretty;
    match &cli.command {
        Command::Poincare {
            jordan_type,
            m,
            method,
            force,
        } => cmd_poincare(&ctx, jordan_type, m, *method, *force),
        Command::Count {
            jordan_type,
            m,
            p,
            force,
        } => {
            let (t, m) = type_and_m(jordan_type, m)?;
            let adm = admissible_prime(&hfpjf(&t), *p)?;
            if !adm.admissible && !force {
                return Err(Error::InadmissiblePrime {
                    p: *p,
                    reason: "two distinct entries of x are congruent mod p (use --force to count anyway)"
                        .into(),
                });
            }
            let value = ctx.cached(key("count", &t, &m, Some(*p)), || {
                to_value(&count_type(&t, &m, *p)?)
            })?;
            Ok((value, EXIT_OK))
        }
        Command::Verify { jordan_type, m, p } => {
            let (t, m) = type_and_m(jordan_type, m)?;
            let mut value = ctx.cached(key("verify", &t, &m, Some(*p)), || {
                to_value(&verify_heuristic(&t, &m, *p)?)
            })?;
            let pass = value["pass"].as_bool().unwrap_or(false);
            if pretty {
                if let Ok(poly) =
                    serde_json::from_value::<BettiPolynomial>(value["poincare"].clone())
                {
                    value["poincare"] = poly_value(&poly, true);
                }
            }
            Ok((
                value,
                if pass {
                    EXIT_OK
                } else {
                    EXIT_VERIFICATION_FAILURE
                },
            ))
        }
        Command::Euler { jordan_type, m } => {
            let (t, m) = type_and_m(jordan_type, m)?;
            let cells = euler_characteristic(&t, &m);
            let poly = poincare_tymoczko(&t, &m);
            let at_one = poly.sum_of_coeffs();
            let value = json!({
                "jordan_type": t.to_string(),
                "m": m.to_string(),
                "euler": cells,
                "poincare_at_1": at_one,
            });
            let code = if at_one == cells as i64 {
                EXIT_OK
            } else {
                EXIT_VERIFICATION_FAILURE
            };
            Ok((value, code))
        }
        Command::Classify { jordan_type } => cmd_classify(jordan_type, pretty),
        Command::Schubert { w, query } => {
            let w: Permutation = w.parse()?;
            let value = match query {
                SchubertQuery::Poincare => {
                    json!({"w": w.to_string(), "poincare": poly_value(&schubert_poincare(&w), pretty)})
                }
                SchubertQuery::Singular => {
                    let maximal: Vec<String> = ls_singular_maximal(&w)
                        .iter()
                        .map(|v| v.to_string())
                        .collect();
                    json!({"w": w.to_string(), "smooth": maximal.is_empty(), "singular_maximal": maximal})
                }
                SchubertQuery::Euler => json!({"w": w.to_string(), "euler": schubert_euler(&w)}),
            };
            Ok((value, EXIT_OK))
        }
        Command::Patch { x, g, query } => cmd_patch(x, g, *query, pretty),
        Command::Cache { action } => {
            let cache = Cache::new(cli.cache_dir.clone().unwrap_or_else(cache::default_dir));
            let value = match action {
                CacheAction::Path => json!({"path": cache.dir().display().to_string()}),
                CacheAction::List => to_value(&cache.entries()?)?,
                CacheAction::Clear => json!({"removed": cache.clear()?}),
            };
            Ok((value, EXIT_OK))
        }
    }
}

fn cmd_poincare(
    ctx: &Ctx,
    jordan_type: &str,
    m: &str,
    method: PoincareMethod,
    force: bool,
) -> Result<(Value, i32)> {
    let pretty = ctx.cli.pretty;
    let (t, m) = type_and_m(jordan_type, m)?;
    let is_mmax = t.n() >= 2 && m == HessenbergVector::m_max(t.n())?;
    let closed = || -> Result<BettiPolynomial> {
        if !is_mmax {
            return Err(Error::invalid("the closed form covers m = m_max only"));
        }
        poincare_mmax_for_type(&t)
    };
    let census = |mode: CensusMode| -> Result<Value> {
        let x = hfpjf(&t);
        if mode == CensusMode::Interpolation
            && !force
            && interpolation_cost(&x) > DEFAULT_FLAG_BUDGET.into()
        {
            return Err(Error::invalid(format!(
                "interpolation would visit {} flags; use census-cellwise or --force",
                interpolation_cost(&x)
            )));
        }
        let op = match mode {
            CensusMode::Interpolation => "poincare-census-interp",
            CensusMode::Cellwise => "poincare-census-cellwise",
        };
        ctx.cached(key(op, &t, &m, None), || {
            to_value(&census_poincare(&t, &m, mode)?)
        })
    };
    let mut value = json!({"jordan_type": t.to_string(), "m": m.to_string()});
    let single = |poly: BettiPolynomial, name: &str, mut value: Value| {
        value["method"] = json!(name);
        value["polynomial"] = poly_value(&poly, pretty);
        value
    };
    let census_poly = |v: &Value| -> Result<BettiPolynomial> {
        Ok(serde_json::from_value(v["polynomial"].clone())?)
    };
    match method {
        PoincareMethod::Tymoczko => Ok((
            single(poincare_tymoczko(&t, &m), "tymoczko", value),
            EXIT_OK,
        )),
        PoincareMethod::Closed => Ok((single(closed()?, "closed", value), EXIT_OK)),
        PoincareMethod::CensusInterp | PoincareMethod::CensusCellwise => {
            let mode = if method == PoincareMethod::CensusInterp {
                CensusMode::Interpolation
            } else {
                CensusMode::Cellwise
            };
            let c = census(mode)?;
            let name = if mode == CensusMode::Interpolation {
                "census-interp"
            } else {
                "census-cellwise"
            };
            let mut v = single(census_poly(&c)?, name, value);
            v["primes"] = c["primes"].clone();
            v["totals"] = c["totals"].clone();
            Ok((v, EXIT_OK))
        }
        PoincareMethod::All => {
            let mut routes = serde_json::Map::new();
            let tym = poincare_tymoczko(&t, &m);
            routes.insert("tymoczko".into(), poly_value(&tym, pretty));
            let mut agree = true;
            if is_mmax {
                let c = closed()?;
                agree &= c == tym;
                routes.insert("closed".into(), poly_value(&c, pretty));
            }
            let mode = auto_mode(&hfpjf(&t), DEFAULT_FLAG_BUDGET);
            let c = census(mode)?;
            let cp = census_poly(&c)?;
            agree &= cp == tym;
            let name = if mode == CensusMode::Interpolation {
                "census-interp"
            } else {
                "census-cellwise"
            };
            routes.insert(name.into(), poly_value(&cp, pretty));
            value["method"] = json!("all");
            value["routes"] = Value::Object(routes);
            value["agree"] = json!(agree);
            Ok((
                value,
                if agree {
                    EXIT_OK
                } else {
                    EXIT_VERIFICATION_FAILURE
                },
            ))
        }
    }
}

fn cmd_classify(jordan_type: &str, pretty: bool) -> Result<(Value, i32)> {
    let t: JordanType = jordan_type.parse()?;
    let n = t.n();
    if n < 2 {
        return Err(Error::invalid("classification needs n >= 2"));
    }
    let class = irreducible_mmax(&t);
    let mut value = json!({
        "jordan_type": t.to_string(),
        "irreducibility": class,
        "geometric_multiplicities": t.geometric_multiplicities(),
    });
    if class == Irreducibility::DegenerateScalar {
        value["singular_locus"] = json!({"relation": "none"});
        return Ok((value, EXIT_OK));
    }
    let closed = poincare_mmax_for_type(&t)?;
    value["poincare_mmax"] = poly_value(&closed, pretty);
    value["top_coefficient"] = json!(top_coefficient_mmax(&t)?);
    let m_sing = HessenbergVector::m_sing(n)?;
    // With one eigenvalue c, x - cI is nilpotent and defines the same
    // variety, so the singular locus is all of B(x, H(m_sing)).
    let relation = if t.r() == 1 { "equal" } else { "contained" };
    value["singular_locus"] = json!({
        "relation": relation,
        "m": m_sing.to_string(),
        "poincare": poly_value(&poincare_tymoczko(&t, &m_sing), pretty),
        "euler": euler_characteristic(&t, &m_sing),
    });
    Ok((value, EXIT_OK))
}

fn cmd_patch(x: &str, g: &str, query: PatchQuery, pretty: bool) -> Result<(Value, i32)> {
    let x = parse_matrix(x, None)?;
    let g = parse_matrix(g, Some(x.n()))?;
    let value = match query {
        PatchQuery::Det => {
            json!({"determinant": multipoly_value(&patch_determinant(&x, &g)?, pretty)?})
        }
        PatchQuery::Linear => {
            json!({"linear_part": multipoly_value(&linear_part(&x, &g)?, pretty)?})
        }
        PatchQuery::Smooth => json!({
            "smooth": is_smooth_point_mmax(&x, &g)?,
            "in_sing_candidate": in_sing_candidate(&x, &g)?,
        }),
        PatchQuery::Witness => {
            let mut v = to_value(&squarefree_witness(&x, &g)?)?;
            if pretty {
                if let Some(det) = v.get("determinant").cloned() {
                    let poly = MultiPoly::from_json(x.n(), &det)?;
                    v["determinant"] = multipoly_value(&poly, true)?;
                }
            }
            v
        }
        PatchQuery::Report => {
            let r = patch_report(&x, &g)?;
            json!({
                "determinant": multipoly_value(&r.determinant, pretty)?,
                "linear_part": multipoly_value(&r.linear_part, pretty)?,
                "smooth": r.smooth,
                "in_sing_candidate": r.in_sing_candidate,
            })
        }
    };
    Ok((value, EXIT_OK))
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::invalid(format!("bad matrix entry {s:?}"));
    match s.split_once('/') {
        Some((a, b)) => {
            let num: BigInt = a.trim().parse().map_err(|_| bad())?;
            let den: BigInt = b.trim().parse().map_err(|_| bad())?;
            if den.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(num, den))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

fn entry_from_json(v: &Value) -> Result<BigRational> {
    match v {
        Value::Number(num) if num.is_i64() || num.is_u64() => parse_rational(&num.to_string()),
        Value::String(s) => parse_rational(s),
        other => Err(Error::invalid(format!(
            "matrix entries must be integers or rational strings, got {other}"
        ))),
    }
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

fn matrix_from_json_text(text: &str) -> Result<ExactMatrix> {
    let v: Value = serde_json::from_str(text).map_err(json_error)?;
    let rows = match &v {
        Value::Object(o) => o
            .get("rows")
            .cloned()
            .ok_or_else(|| Error::invalid("matrix object needs a \"rows\" field"))?,
        _ => v,
    };
    let rows = rows
        .as_array()
        .ok_or_else(|| Error::invalid("matrix must be a list of rows"))?
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| Error::invalid("each row must be a list"))?
                .iter()
                .map(entry_from_json)
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    ExactMatrix::from_rows(rows)
}

/// A matrix argument: `I` (size from `size_hint`), `I3`, `diag(a,b,..)`,
/// inline JSON rows, or the path of a JSON file holding rows.
pub fn parse_matrix(arg: &str, size_hint: Option<usize>) -> Result<ExactMatrix> {
    let s = arg.trim();
    if let Some(size) = s.strip_prefix('I') {
        if size.is_empty() {
            let n = size_hint.ok_or_else(|| Error::invalid("I needs a size, e.g. I3"))?;
            return Ok(ExactMatrix::identity(n));
        }
        if let Ok(n) = size.trim_matches(|c| c == '(' || c == ')').parse::<usize>() {
            return Ok(ExactMatrix::identity(n));
        }
    }
    if let Some(body) = s.strip_prefix("diag(").and_then(|b| b.strip_suffix(')')) {
        let values = body
            .split(',')
            .map(parse_rational)
            .collect::<Result<Vec<_>>>()?;
        let n = values.len();
        return Ok(ExactMatrix::from_fn(n, |i, j| {
            if i == j {
                values[i].clone()
            } else {
                BigRational::zero()
            }
        }));
    }
    if s.starts_with('[') || s.starts_with('{') {
        return matrix_from_json_text(s);
    }
    let text = std::fs::read_to_string(s)?;
    matrix_from_json_text(&text)
}
