//! The sweep table: one row per field, streamed in q order, demonstrating
//! how the constructed size tracks the guaranteed bound across a range of
//! fields. Per-row failures are recorded in the row; the stream continues.

use std::sync::Arc;
use std::time::Instant;

use clap::Args;
use serde_json::{json, Value};

use fdioph::construct::{construct_set, heuristic_bound, maximize, theorem_bound, Strategy};
use fdioph::exact::{max_diophantine, TupleMode};
use fdioph::field::{as_prime_power, is_prime_u64};
use fdioph::poly::parse_poly;
use fdioph::FieldSpec;

use crate::output::{csv_cell, Format};
use crate::{infer_arity, StrategyArg};

pub const CSV_HEADER: &str =
    "q,p,e,strategy,n_theorem,n_constructed,n_exact,heuristic,construct_ms,exact_ms,error";

#[derive(Args)]
pub struct TableArgs {
    /// Polynomial text (tables re-parse it over every field in the sweep,
    /// so JSON input is not accepted here).
    #[arg(long)]
    poly: String,
    /// Arity; inferred from the text when omitted.
    #[arg(long)]
    k: Option<usize>,
    /// Explicit list of prime powers, e.g. "257,729,1009".
    #[arg(long, value_delimiter = ',')]
    fields: Option<Vec<u64>>,
    /// Prime range "lo:hi" enumerated by sieve.
    #[arg(long)]
    prime_range: Option<String>,
    /// Thin the range to this many log-spaced primes.
    #[arg(long)]
    count: Option<usize>,
    #[arg(long, value_enum, default_value_t = StrategyArg::Standard)]
    strategy: StrategyArg,
    /// Use the largest achievable n (binary search) instead of the default
    /// max(theorem bound, 2).
    #[arg(long)]
    maximize: bool,
    /// Cap for --maximize; 0 picks ceil(log4 q) + 2.
    #[arg(long, default_value_t = 0)]
    n_cap: u32,
    /// Also compute the exact maximum where the exhaustive caps allow.
    #[arg(long)]
    exact: bool,
}

pub fn run(args: TableArgs, format: Format, node_cap: u64) -> anyhow::Result<()> {
    let qs = field_list(&args)?;
    if format == Format::Csv {
        println!("# fdioph-table v1");
        println!("{CSV_HEADER}");
    }
    if format == Format::Plain {
        println!(
            "{:>9} {:>9} {:>3} {:>9} {:>13} {:>7} {:>9} err",
            "q", "p", "e", "n_theorem", "n_constructed", "n_exact", "heuristic"
        );
    }
    for q in qs {
        let row = compute_row(&args, q, node_cap);
        match format {
            Format::Json => println!("{}", serde_json::to_string(&row)?),
            Format::Csv => println!("{}", csv_row(&row)),
            Format::Plain => println!("{}", plain_row(&row)),
        }
    }
    Ok(())
}

fn field_list(args: &TableArgs) -> anyhow::Result<Vec<u64>> {
    let mut qs: Vec<u64> = Vec::new();
    if let Some(fields) = &args.fields {
        qs.extend(fields.iter().copied());
    }
    if let Some(range) = &args.prime_range {
        let (lo, hi) = range
            .split_once(':')
            .ok_or_else(|| anyhow::anyhow!("--prime-range wants lo:hi"))?;
        let lo: u64 = lo.parse()?;
        let hi: u64 = hi.parse()?;
        if hi < lo {
            anyhow::bail!("empty prime range");
        }
        match args.count {
            // log-spaced deterministic selection: next prime at or above
            // each of `count` exponentially spaced targets
            Some(count) if count > 0 => {
                let llo = (lo.max(2) as f64).ln();
                let lhi = (hi as f64).ln();
                for i in 0..count {
                    let t = if count == 1 {
                        llo
                    } else {
                        llo + (lhi - llo) * i as f64 / (count - 1) as f64
                    };
                    let mut p = (t.exp().round() as u64).clamp(lo.max(2), hi);
                    while p <= hi && (!is_prime_u64(p) || qs.contains(&p)) {
                        p += 1;
                    }
                    if p <= hi {
                        qs.push(p);
                    }
                }
            }
            _ => {
                for p in lo..=hi {
                    if is_prime_u64(p) {
                        qs.push(p);
                    }
                }
            }
        }
    }
    if qs.is_empty() {
        anyhow::bail!("no fields selected: pass --fields or --prime-range");
    }
    qs.sort_unstable();
    qs.dedup();
    Ok(qs)
}

fn compute_row(args: &TableArgs, q: u64, node_cap: u64) -> Value {
    let strategy: Strategy = args.strategy.into();
    let mut row = json!({
        "q": q,
        "p": Value::Null,
        "e": Value::Null,
        "strategy": strategy.name(),
        "n_theorem": Value::Null,
        "n_constructed": Value::Null,
        "n_exact": Value::Null,
        "heuristic": Value::Null,
        "runtime_ms": { "construct": Value::Null, "exact": Value::Null },
        "error": Value::Null,
    });
    let fail = |row: &mut Value, err: String| {
        row["error"] = json!(err);
    };

    let Some((p, e)) = as_prime_power(q) else {
        fail(&mut row, format!("{q} is not a prime power"));
        return row;
    };
    row["p"] = json!(p);
    row["e"] = json!(e);
    let spec = match FieldSpec::new(p, e) {
        Ok(s) => Arc::new(s),
        Err(err) => {
            fail(&mut row, err.to_string());
            return row;
        }
    };
    let k = args.k.unwrap_or_else(|| infer_arity(&args.poly));
    let f = match parse_poly(&args.poly, k, &spec) {
        Ok(f) => f,
        Err(err) => {
            fail(&mut row, err.to_string());
            return row;
        }
    };
    if k >= 2 {
        if let Ok(h) = heuristic_bound(k as u64, q as u128) {
            row["heuristic"] = json!(h);
        }
    }
    let n_theorem = match theorem_bound(&f, q as u128) {
        Ok(b) => {
            row["n_theorem"] = json!(b.value);
            Some(b.value)
        }
        Err(fdioph::Error::DomainError(_)) => None, // small q: bound undefined, row continues
        Err(err) => {
            fail(&mut row, err.to_string());
            return row;
        }
    };

    let started = Instant::now();
    let constructed = if args.maximize {
        let cap = if args.n_cap > 0 {
            args.n_cap
        } else {
            ((q as f64).ln() / 4f64.ln()).ceil() as u32 + 2
        };
        maximize(&f, strategy, cap)
    } else {
        construct_set(&f, None, strategy)
    };
    row["runtime_ms"]["construct"] = json!(started.elapsed().as_millis() as u64);
    match constructed {
        Ok(set) => {
            row["n_constructed"] = json!(set.n);
            if let Some(bound) = n_theorem {
                debug_assert!(set.n as u64 >= bound || q < 257);
            }
        }
        Err(err) => {
            fail(&mut row, err.to_string());
            return row;
        }
    }

    if args.exact {
        let started = Instant::now();
        match max_diophantine(&f, node_cap, TupleMode::AllOrderings) {
            Ok(r) => {
                row["n_exact"] = json!(r.max_size);
                if !r.exhausted {
                    fail(
                        &mut row,
                        "exact search hit the node cap; n_exact is a lower bound".into(),
                    );
                }
            }
            Err(fdioph::Error::SizeLimit(_)) => {} // out of exhaustive range: null column
            Err(err) => fail(&mut row, err.to_string()),
        }
        row["runtime_ms"]["exact"] = json!(started.elapsed().as_millis() as u64);
    }
    row
}

fn csv_row(row: &Value) -> String {
    let cols = [
        &row["q"],
        &row["p"],
        &row["e"],
        &row["strategy"],
        &row["n_theorem"],
        &row["n_constructed"],
        &row["n_exact"],
        &row["heuristic"],
        &row["runtime_ms"]["construct"],
        &row["runtime_ms"]["exact"],
        &row["error"],
    ];
    cols.iter()
        .map(|v| csv_cell(v))
        .collect::<Vec<_>>()
        .join(",")
}

fn plain_row(row: &Value) -> String {
    let show = |v: &Value| match v {
        Value::Null => "-".to_string(),
        Value::Number(n) => {
            if let Some(f) = n.as_f64() {
                if n.is_f64() {
                    format!("{f:.3}")
                } else {
                    n.to_string()
                }
            } else {
                n.to_string()
            }
        }
        other => other.to_string(),
    };
    format!(
        "{:>9} {:>9} {:>3} {:>9} {:>13} {:>7} {:>9} {}",
        show(&row["q"]),
        show(&row["p"]),
        show(&row["e"]),
        show(&row["n_theorem"]),
        show(&row["n_constructed"]),
        show(&row["n_exact"]),
        show(&row["heuristic"]),
        show(&row["error"]),
    )
}
