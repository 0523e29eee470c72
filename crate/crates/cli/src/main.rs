//! Command-line front end: field inspection, classification, bounds,
//! construction, verification, exact maxima, Weil diagnostics and sweep
//! tables.
//!
//! Exit codes: 0 success, 1 domain errors, 2 usage errors. All output is a
//! pure function of the arguments (runtimes excepted), regardless of
//! `--threads`.

mod output;
mod table;

use std::str::FromStr;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use fdioph::charsum::weil_check;
use fdioph::construct::{
    build_plan, construct_set, find_witness, heuristic_bound, maximize, theorem_bound_dm,
    SearchMode, Strategy,
};
use fdioph::exact::{greedy_extend, max_diophantine, verify, TupleMode, DEFAULT_NODE_CAP};
use fdioph::poly::{parse_poly, parse_unipoly};
use fdioph::{FieldElement, FieldSpec, MultiPoly};

use output::{emit, Format};

#[derive(Parser)]
#[command(
    name = "fdioph",
    version,
    about = "F-Diophantine sets over odd finite fields"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Plain)]
    format: Format,
    /// Worker threads for scans (default: all cores). Output is identical
    /// for any value.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Node cap for the exhaustive search (0 = default).
    #[arg(long, global = true, default_value_t = 0)]
    cap: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct FieldArgs {
    /// The field F_{p^e} as two integers: p e.
    #[arg(long, num_args = 2, value_names = ["P", "E"], required = true)]
    field: Vec<u64>,
    /// Override the modulus polynomial, low-to-high coefficients.
    #[arg(long, value_delimiter = ',')]
    modulus: Option<Vec<u64>>,
}

impl FieldArgs {
    fn build(&self) -> anyhow::Result<Arc<FieldSpec>> {
        build_field(&self.field, &self.modulus)
    }
}

/// Same shape as FieldArgs but omittable (`bound` can infer the field from
/// its --q argument).
#[derive(Args, Clone)]
struct OptionalFieldArgs {
    /// The field F_{p^e} as two integers: p e.
    #[arg(long, num_args = 2, value_names = ["P", "E"])]
    field: Vec<u64>,
    /// Override the modulus polynomial, low-to-high coefficients.
    #[arg(long, value_delimiter = ',')]
    modulus: Option<Vec<u64>>,
}

fn build_field(field: &[u64], modulus: &Option<Vec<u64>>) -> anyhow::Result<Arc<FieldSpec>> {
    if field.len() != 2 {
        anyhow::bail!("--field takes exactly two integers: p e");
    }
    let (p, e) = (field[0], field[1] as u32);
    let spec = match modulus {
        Some(m) => FieldSpec::with_modulus(p, e, m.clone())?,
        None => FieldSpec::new(p, e)?,
    };
    Ok(Arc::new(spec))
}

#[derive(Args, Clone)]
struct PolyArgs {
    /// Polynomial: inline text (grammar: terms of `c*x1^a*x2^b...` joined
    /// by + and -, `t` for the adjoined root) or @path to canonical JSON.
    #[arg(long)]
    poly: String,
    /// Arity; inferred from the highest variable index when omitted.
    #[arg(long)]
    k: Option<usize>,
}

impl PolyArgs {
    fn parse(&self, spec: &Arc<FieldSpec>) -> anyhow::Result<MultiPoly> {
        if let Some(path) = self.poly.strip_prefix('@') {
            let text = std::fs::read_to_string(path)?;
            let value: Value = serde_json::from_str(&text)?;
            return Ok(MultiPoly::from_json(Arc::clone(spec), &value)?);
        }
        let k = match self.k {
            Some(k) => k,
            None => infer_arity(&self.poly),
        };
        Ok(parse_poly(&self.poly, k, spec)?)
    }
}

/// Highest x-index mentioned in the text (bare `x` counts as x1).
fn infer_arity(text: &str) -> usize {
    let bytes = text.as_bytes();
    let mut max_idx = 0usize;
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'x' {
            let mut j = i + 1;
            let mut idx = 0usize;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                idx = idx * 10 + (bytes[j] - b'0') as usize;
                j += 1;
            }
            max_idx = max_idx.max(if j > i + 1 { idx } else { 1 });
            i = j;
        } else {
            i += 1;
        }
    }
    max_idx.max(1)
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Standard,
    DistinctExponents,
    SquareElements,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Strategy {
        match s {
            StrategyArg::Standard => Strategy::Standard,
            StrategyArg::DistinctExponents => Strategy::DistinctExponents,
            StrategyArg::SquareElements => Strategy::SquareElements,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Field parameters, modulus, group-order factorization, generator.
    FieldInfo {
        #[command(flatten)]
        field: FieldArgs,
    },
    /// Type I / type II classification of a polynomial.
    Classify {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        poly: PolyArgs,
    },
    /// The guaranteed-size bound and the heuristic comparison value.
    Bound {
        #[command(flatten)]
        field: OptionalFieldArgs,
        #[command(flatten)]
        poly: PolyArgs,
        /// Evaluate the bound at this q instead of the field's (the shape
        /// of F still comes from the field parse).
        #[arg(long)]
        q: Option<u128>,
    },
    /// Construct an F-Diophantine set by witness search.
    Construct {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        poly: PolyArgs,
        /// Target size (default: max(theorem bound, 2)).
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, value_enum, default_value_t = StrategyArg::Standard)]
        strategy: StrategyArg,
        /// Find the largest achievable n up to --n-cap instead of a fixed n.
        #[arg(long)]
        maximize: bool,
        #[arg(long, default_value_t = 16)]
        n_cap: u32,
        /// Also run a full witness census and report it.
        #[arg(long)]
        census: bool,
        /// Reserved; the scan is deterministic and ignores it.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Verify that a set is F-Diophantine.
    Verify {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        poly: PolyArgs,
        /// Elements: comma-separated encodings, or @path to a JSON list.
        #[arg(long)]
        set: String,
        /// Also check tuples with repeated elements.
        #[arg(long)]
        strong: bool,
        /// Check one ordering per subset instead of all orderings.
        #[arg(long)]
        single_ordering: bool,
    },
    /// Exact maximum F-Diophantine set size by exhaustive search.
    ExactMax {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        poly: PolyArgs,
        #[arg(long)]
        single_ordering: bool,
        /// Greedily extend this seed set instead of searching exhaustively.
        #[arg(long)]
        greedy_from: Option<String>,
    },
    /// Character sum of a univariate polynomial against the Weil bound.
    WeilCheck {
        #[command(flatten)]
        field: FieldArgs,
        /// Univariate polynomial in x (or x1).
        #[arg(long)]
        g: String,
    },
    /// Sweep a polynomial across fields; one row per field.
    Table(table::TableArgs),
}

fn main() {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .expect("thread pool is built once at startup");
    }
    match run(cli) {
        Ok(()) => {}
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(1);
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let format = cli.format;
    match cli.command {
        Command::FieldInfo { field } => {
            let spec = field.build()?;
            let gen = spec.generator();
            let value = json!({
                "field": spec.to_json(),
                "q": spec.q(),
                "group_order_factors": spec.group_order_factors(),
                "generator": spec.elem_to_json(gen),
            });
            let plain = format!(
                "F_{} = F_{}^{} with modulus {:?}\nq - 1 = {} factors as {:?}\nsmallest generator: {}",
                spec.q(),
                spec.p(),
                spec.e(),
                spec.modulus(),
                spec.q() - 1,
                spec.group_order_factors(),
                gen.encoding(),
            );
            emit(format, &value, &plain)
        }
        Command::Classify { field, poly } => {
            let spec = field.build()?;
            let p = poly.parse(&spec)?;
            let c = p.classify()?;
            let value = json!({
                "type1": c.type1,
                "type2": c.type2,
                "dominant": c.dominant.as_ref().map(|m| m.exps().to_vec()),
            });
            let plain = format!(
                "{}: type I = {}, type II = {}{}",
                p.to_text(),
                c.type1,
                c.type2,
                c.dominant
                    .as_ref()
                    .map(|m| format!(", dominant monomial exponents {:?}", m.exps()))
                    .unwrap_or_default()
            );
            emit(format, &value, &plain)
        }
        Command::Bound { field, poly, q } => {
            // --field may be omitted when --q itself names a usable field
            let spec = if field.field.is_empty() {
                let q = q.ok_or_else(|| anyhow::anyhow!("bound needs --field or --q"))?;
                let q64 = u64::try_from(q)
                    .map_err(|_| anyhow::anyhow!("--q too large to infer a field; pass --field"))?;
                let (p, e) = fdioph::field::as_prime_power(q64).ok_or_else(|| {
                    anyhow::anyhow!("--q {q64} is not a prime power; pass --field")
                })?;
                Arc::new(FieldSpec::new(p, e)?)
            } else {
                build_field(&field.field, &field.modulus)?
            };
            let p = poly.parse(&spec)?;
            let q = q.unwrap_or(spec.q() as u128);
            let d = p.degree().ok_or(fdioph::Error::NoMonomials)?;
            let m = p.num_monomials() as u64;
            let bound = theorem_bound_dm(d, m, q)?;
            let heuristic = if p.k() >= 2 {
                Some(heuristic_bound(p.k() as u64, q)?)
            } else {
                None
            };
            let value = json!({
                "q": q.to_string(),
                "d": d,
                "m": m,
                "value": bound.value,
                "guaranteed": bound.guaranteed,
                "heuristic": heuristic,
            });
            let plain = format!(
                "guaranteed size >= {} at q = {q} (d = {d}, m = {m}{}){}",
                bound.value,
                if bound.guaranteed {
                    ""
                } else {
                    "; q < 257, no guarantee"
                },
                heuristic
                    .map(|h| format!("; heuristic scale {h:.3}"))
                    .unwrap_or_default()
            );
            emit(format, &value, &plain)
        }
        Command::Construct {
            field,
            poly,
            n,
            strategy,
            maximize: do_max,
            n_cap,
            census,
            seed: _,
        } => {
            let spec = field.build()?;
            let p = poly.parse(&spec)?;
            let strategy: Strategy = strategy.into();
            let mut set = if do_max {
                maximize(&p, strategy, n_cap)?
            } else {
                construct_set(&p, n, strategy)?
            };
            let distinct = verify(&p, &set.elements, false, TupleMode::AllOrderings)?;
            let strong = verify(&p, &set.elements, true, TupleMode::AllOrderings)?;
            set.strong = strong.strong_valid.unwrap_or(false);
            if !distinct.valid {
                anyhow::bail!("internal error: constructed set failed verification");
            }
            let mut value = json!({ "set": set.to_json(&spec) });
            if census {
                let plan = build_plan(&p, set.n, strategy)?;
                let report = find_witness(&plan, SearchMode::FullCensus)?;
                value["census"] = report.to_json();
            }
            let plain = format!(
                "|A| = {} from witness y0 = {} over q = {} ({}): A = {:?}{}",
                set.n,
                set.y0.encoding(),
                spec.q(),
                strategy.name(),
                set.elements
                    .iter()
                    .map(|a| a.encoding())
                    .collect::<Vec<_>>(),
                if set.strong { "; strong" } else { "" },
            );
            emit(format, &value, &plain)
        }
        Command::Verify {
            field,
            poly,
            set,
            strong,
            single_ordering,
        } => {
            let spec = field.build()?;
            let p = poly.parse(&spec)?;
            let elements = parse_set(&set, &spec)?;
            let mode = if single_ordering {
                TupleMode::SingleOrdering
            } else {
                TupleMode::AllOrderings
            };
            let result = verify(&p, &elements, strong, mode)?;
            let value = result.to_json(&spec);
            let plain = match (&result.valid, &result.counterexample) {
                (true, _) if result.strong_valid == Some(true) => "valid (strong)".to_string(),
                (true, _) if result.strong_valid == Some(false) => {
                    "valid for distinct arguments; not strong".to_string()
                }
                (true, _) => "valid".to_string(),
                (false, Some((tuple, value))) => format!(
                    "invalid: F{:?} = {} is a non-square",
                    tuple.iter().map(|a| a.encoding()).collect::<Vec<_>>(),
                    value.encoding()
                ),
                (false, None) => "invalid".to_string(),
            };
            emit(format, &value, &plain)
        }
        Command::ExactMax {
            field,
            poly,
            single_ordering,
            greedy_from,
        } => {
            let spec = field.build()?;
            let p = poly.parse(&spec)?;
            let mode = if single_ordering {
                TupleMode::SingleOrdering
            } else {
                TupleMode::AllOrderings
            };
            if let Some(seed) = greedy_from {
                let elements = parse_set(&seed, &spec)?;
                let out = greedy_extend(&p, &elements, mode)?;
                let value = json!({
                    "size": out.len(),
                    "set": out.iter().map(|&a| spec.elem_to_json(a)).collect::<Vec<_>>(),
                });
                let plain = format!(
                    "greedy extension reached size {}: {:?}",
                    out.len(),
                    out.iter().map(|a| a.encoding()).collect::<Vec<_>>()
                );
                return emit(format, &value, &plain);
            }
            let result = max_diophantine(
                &p,
                if cli.cap == 0 {
                    DEFAULT_NODE_CAP
                } else {
                    cli.cap
                },
                mode,
            )?;
            let value = result.to_json(&spec);
            let plain = format!(
                "M = {}{} with witness {:?} ({} nodes)",
                result.max_size,
                if result.exhausted {
                    ""
                } else {
                    " (lower bound, node cap hit)"
                },
                result
                    .witness_set
                    .iter()
                    .map(|a| a.encoding())
                    .collect::<Vec<_>>(),
                result.nodes_explored
            );
            emit(format, &value, &plain)
        }
        Command::WeilCheck { field, g } => {
            let spec = field.build()?;
            let poly = parse_unipoly(&g, &spec)?;
            let report = weil_check(&poly)?;
            let value = report.to_json();
            let plain = if report.applicable {
                format!(
                    "sum = {}, s = {}, bound = {:.4}: {}",
                    report.sum,
                    report.distinct_roots,
                    report.bound,
                    if report.satisfied == Some(true) {
                        "within the Weil bound"
                    } else {
                        "VIOLATION"
                    }
                )
            } else {
                format!(
                    "sum = {} but g is a constant times a square; the bound does not apply",
                    report.sum
                )
            };
            emit(format, &value, &plain)
        }
        Command::Table(args) => table::run(args, format, cli.cap),
    }
}

/// Set input: comma-separated encodings or @path to a JSON array of
/// elements.
fn parse_set(input: &str, spec: &Arc<FieldSpec>) -> anyhow::Result<Vec<FieldElement>> {
    if let Some(path) = input.strip_prefix('@') {
        let text = std::fs::read_to_string(path)?;
        let value: Value = serde_json::from_str(&text)?;
        let arr = value
            .as_array()
            .ok_or_else(|| anyhow::anyhow!("set file must hold a JSON array of elements"))?;
        return Ok(arr
            .iter()
            .map(|v| spec.elem_from_json(v))
            .collect::<Result<Vec<_>, _>>()?);
    }
    input
        .split(',')
        .map(|tok| {
            let enc = u64::from_str(tok.trim())
                .map_err(|_| anyhow::anyhow!("bad element encoding {tok:?}"))?;
            Ok(spec.element(enc)?)
        })
        .collect()
}
