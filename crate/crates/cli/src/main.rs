//! Command-line front end: expand catalog Hauptmoduln, print valuation
//! sequences, and run every checker suite with a machine-readable JSON
//! report.
//!
//! Exit codes: 0 all checks pass, 1 any check fails, 2 unknown catalog
//! symbol, 3 precision exhausted or indeterminate-only results.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use haupt_core::annihilation::{
    check_compression, check_congruence_family, check_lehner, check_rate_bound,
    detect_mod_p_cycle, lehner_data, lehner_datum, lehner_exponent, valuation_sequence,
    CompressionCase,
};
use haupt_core::catalog::{Catalog, BUNDLED_A5_JSON};
use haupt_core::moonshine::{
    check_padic_moonshine, check_weak_annihilation, order_bound_feasible, CharacterTable,
};
use haupt_core::report::{CheckReport, Verdict};
use haupt_core::Rat;
use serde_json::json;

const DEFAULT_WINDOW_COMPRESSION: i64 = 2500;
const DEFAULT_WINDOW_LEHNER: i64 = 600;
const DEFAULT_WINDOW_WEAK: i64 = 3500;
const DEFAULT_WINDOW_GENERAL: i64 = 1000;

#[derive(Parser)]
#[command(name = "haupt", version, about = "Exact q-expansions and p-adic annihilation checks for genus-zero Hauptmoduln")]
struct Cli {
    /// Catalog TSV path; falls back to $HAUPT_CATALOG, then the bundled set.
    #[arg(long, global = true)]
    catalog: Option<PathBuf>,
    /// Worker threads for suite execution (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the normalized Hauptmodul for a symbol in the series text format.
    Expand {
        symbol: String,
        /// Exponent bound: coefficients through q^{prec-1}.
        #[arg(long, default_value_t = 100)]
        prec: i64,
    },
    /// Print v_p(T|U_p^n) for n = 1..=iters.
    Valuations {
        symbol: String,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 3)]
        iters: u32,
        #[arg(long, default_value_t = DEFAULT_WINDOW_GENERAL)]
        window: i64,
        /// Emit TSV rows `symbol p n v` instead of the JSON envelope.
        #[arg(long)]
        tsv: bool,
    },
    /// Run a checker suite and emit one JSON report per sub-check.
    Check {
        #[command(subcommand)]
        suite: Suite,
    },
}

#[derive(Subcommand)]
enum Suite {
    /// Prime-power coefficient congruences of J.
    Congruences {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        alpha_max: u32,
        #[arg(long, default_value_t = 100)]
        window: i64,
    },
    /// Compression identities relating T|U_p across groups.
    Compression {
        /// Run the bundled verified instances.
        #[arg(long, conflicts_with_all = ["case", "gamma", "p"])]
        all: bool,
        #[arg(long, requires = "gamma", requires = "p")]
        case: Option<String>,
        #[arg(long)]
        gamma: Option<String>,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_WINDOW_COMPRESSION)]
        window: i64,
    },
    /// Functional equations and polynomial relations for the bundled rows.
    Lehner {
        #[arg(long, conflicts_with = "symbol")]
        all: bool,
        #[arg(long)]
        symbol: Option<String>,
        #[arg(long, default_value_t = DEFAULT_WINDOW_LEHNER)]
        window: i64,
    },
    /// Rate bounds v_p(T|U_p^n) >= floor(n*alpha).
    Rates {
        #[arg(long, conflicts_with_all = ["symbol", "p", "alpha"])]
        all: bool,
        #[arg(long)]
        symbol: Option<String>,
        #[arg(long)]
        p: Option<u64>,
        /// Rational rate, e.g. 3/2.
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long, default_value_t = 5)]
        n_max: u32,
        #[arg(long, default_value_t = 100)]
        window: i64,
    },
    /// Mod-p residue cycle search (non-annihilation evidence).
    Cycle {
        #[arg(long)]
        symbol: String,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 3)]
        n_max: u32,
        #[arg(long, default_value_t = 50)]
        window: i64,
    },
    /// Full p-adic moonshine check for a group file.
    Moonshine {
        /// Group JSON; defaults to the bundled A5 fixture.
        #[arg(long)]
        group: Option<PathBuf>,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 200)]
        window: i64,
        #[arg(long, default_value_t = 2)]
        n_max: u32,
    },
    /// Least n with T|U_p^n = 0 mod p on the window.
    Weak {
        #[arg(long)]
        symbol: String,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 6)]
        n_max: u32,
        #[arg(long, default_value_t = DEFAULT_WINDOW_WEAK)]
        window: i64,
    },
    /// Feasibility of J + sum a_i T_i = 0 mod q^r over the window.
    Orderbound {
        #[arg(long, value_delimiter = ',', required = true)]
        candidates: Vec<String>,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        r: u32,
        #[arg(long, default_value_t = 500)]
        window: i64,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Catalog(#[from] haupt_core::catalog::Error),
    #[error(transparent)]
    Annihilation(#[from] haupt_core::annihilation::Error),
    #[error(transparent)]
    Moonshine(#[from] haupt_core::moonshine::Error),
    #[error(transparent)]
    Series(#[from] haupt_core::qseries::Error),
    #[error("{0}")]
    Usage(String),
}

fn exit_code_for(err: &CliError) -> u8 {
    use haupt_core::{annihilation, catalog, moonshine};
    fn catalog_code(e: &catalog::Error) -> u8 {
        match e {
            catalog::Error::MissingEntry(_) => 2,
            catalog::Error::PrecisionExhausted { .. } => 3,
            _ => 1,
        }
    }
    fn annihilation_code(e: &annihilation::Error) -> u8 {
        match e {
            annihilation::Error::MissingCatalogEntry(_) => 2,
            annihilation::Error::Catalog(inner) => catalog_code(inner),
            _ => 1,
        }
    }
    match err {
        CliError::Catalog(e) => catalog_code(e),
        CliError::Annihilation(e) => annihilation_code(e),
        CliError::Moonshine(e) => match e {
            moonshine::Error::MissingCatalogEntry(_) => 2,
            moonshine::Error::Catalog(inner) => catalog_code(inner),
            moonshine::Error::Annihilation(inner) => annihilation_code(inner),
            _ => 1,
        },
        CliError::Series(_) => 1,
        CliError::Usage(_) => 2,
    }
}

struct Config {
    catalog_desc: String,
    catalog: Catalog,
    jobs: Option<usize>,
}

fn load_catalog(cli: &Cli) -> Result<Config, CliError> {
    let env_path = std::env::var_os("HAUPT_CATALOG").map(PathBuf::from);
    let path = cli.catalog.clone().or(env_path);
    let (catalog, desc) = match path {
        Some(p) => (Catalog::load(&p)?, p.display().to_string()),
        None => (Catalog::bundled(), "bundled".to_owned()),
    };
    Ok(Config {
        catalog_desc: desc,
        catalog,
        jobs: cli.jobs,
    })
}

fn envelope(config: &Config, checks: &[CheckReport]) -> serde_json::Value {
    json!({
        "tool": "haupt",
        "version": env!("CARGO_PKG_VERSION"),
        "config": {
            "catalog": config.catalog_desc,
            "jobs": config.jobs,
            "default_windows": {
                "compression": DEFAULT_WINDOW_COMPRESSION,
                "lehner": DEFAULT_WINDOW_LEHNER,
                "weak": DEFAULT_WINDOW_WEAK,
                "general": DEFAULT_WINDOW_GENERAL,
            },
        },
        "checks": checks,
    })
}

fn aggregate_exit(checks: &[CheckReport]) -> u8 {
    if checks.iter().any(|c| c.verdict == Verdict::Fail) {
        1
    } else if checks.iter().all(|c| c.verdict == Verdict::Indeterminate) && !checks.is_empty() {
        3
    } else {
        0
    }
}

/// Run independent sub-checks in parallel, preserving input order in the
/// output regardless of completion order.
fn run_parallel<T: Send + Sync>(
    jobs: Option<usize>,
    tasks: Vec<T>,
    f: impl Fn(&T) -> Result<CheckReport, CliError> + Send + Sync,
) -> Result<Vec<CheckReport>, CliError> {
    use rayon::prelude::*;
    let run = || tasks.par_iter().map(|t| f(t)).collect::<Result<Vec<_>, _>>();
    match jobs {
        None => run(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?
            .install(run),
    }
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    let config = load_catalog(cli)?;
    let cat = &config.catalog;
    match &cli.cmd {
        Cmd::Expand { symbol, prec } => {
            let series = cat.hauptmodul(symbol, *prec)?;
            print!("{}", series.to_text());
            Ok(0)
        }
        Cmd::Valuations {
            symbol,
            p,
            iters,
            window,
            tsv,
        } => {
            let seq = valuation_sequence(cat, symbol, *p, *iters, *window)?;
            if *tsv {
                for (idx, term) in seq.iter().enumerate() {
                    let v = term
                        .value
                        .map_or("inf".to_owned(), |v| v.to_string());
                    println!("{symbol}\t{p}\t{}\t{v}", idx + 1);
                }
            } else {
                let report = CheckReport::new(
                    "valuations",
                    json!({ "symbol": symbol, "p": p, "iters": iters }),
                    *window,
                    Verdict::Pass,
                )
                .with_valuations(seq.iter().map(|v| v.value).collect());
                println!("{}", serde_json::to_string_pretty(&envelope(&config, &[report])).unwrap());
            }
            Ok(0)
        }
        Cmd::Check { suite } => {
            let checks = run_suite(&config, suite)?;
            println!("{}", serde_json::to_string_pretty(&envelope(&config, &checks)).unwrap());
            Ok(aggregate_exit(&checks))
        }
    }
}

fn run_suite(config: &Config, suite: &Suite) -> Result<Vec<CheckReport>, CliError> {
    let cat = &config.catalog;
    match suite {
        Suite::Congruences {
            p,
            alpha_max,
            window,
        } => {
            lehner_exponent(*p, 1).ok_or_else(|| {
                CliError::Usage(format!("no congruence family is on record for p = {p}"))
            })?;
            Ok(vec![check_congruence_family(
                cat,
                *p,
                |a| lehner_exponent(*p, a).expect("checked above"),
                *alpha_max,
                *window,
            )?])
        }
        Suite::Compression {
            all,
            case,
            gamma,
            p,
            window,
        } => {
            let instances: Vec<(CompressionCase, String, u64)> = if *all {
                vec![
                    (CompressionCase::A, "2".into(), 2),
                    (CompressionCase::B, "6|3".into(), 2),
                    (CompressionCase::C, "9+".into(), 3),
                    (CompressionCase::D, "9+".into(), 3),
                    (CompressionCase::Conway, "2+".into(), 2),
                ]
            } else {
                let case = case
                    .as_deref()
                    .ok_or_else(|| CliError::Usage("need --all or --case/--gamma/--p".into()))?
                    .parse::<CompressionCase>()?;
                vec![(case, gamma.clone().unwrap(), p.unwrap())]
            };
            run_parallel(config.jobs, instances, |(case, gamma, p)| {
                Ok(check_compression(cat, *case, gamma, *p, *window)?)
            })
        }
        Suite::Lehner {
            all,
            symbol,
            window,
        } => {
            let data = if *all || symbol.is_none() {
                lehner_data()
            } else {
                vec![lehner_datum(symbol.as_deref().unwrap())?]
            };
            run_parallel(config.jobs, data, |datum| {
                Ok(check_lehner(cat, datum, *window)?)
            })
        }
        Suite::Rates {
            all,
            symbol,
            p,
            alpha,
            n_max,
            window,
        } => {
            let rows: Vec<(String, u64, Rat)> = if *all || symbol.is_none() {
                lehner_data()
                    .into_iter()
                    .map(|d| (d.symbol.to_string(), d.p, d.alpha))
                    .collect()
            } else {
                let symbol = symbol.clone().unwrap();
                let p = p.ok_or_else(|| CliError::Usage("--p is required with --symbol".into()))?;
                let alpha = match alpha {
                    Some(text) => text
                        .parse::<Rat>()
                        .map_err(|_| CliError::Usage(format!("bad rational {text:?}")))?,
                    None => lehner_datum(&symbol)?.alpha,
                };
                vec![(symbol, p, alpha)]
            };
            run_parallel(config.jobs, rows, |(symbol, p, alpha)| {
                Ok(check_rate_bound(cat, symbol, *p, alpha, *n_max, *window)?)
            })
        }
        Suite::Cycle {
            symbol,
            p,
            n_max,
            window,
        } => Ok(vec![detect_mod_p_cycle(cat, symbol, *p, *n_max, *window)?]),
        Suite::Moonshine {
            group,
            p,
            window,
            n_max,
        } => {
            let table = match group {
                Some(path) => CharacterTable::load(path)?,
                None => CharacterTable::parse(BUNDLED_A5_JSON)?,
            };
            let assignment = table.assignment.clone().ok_or_else(|| {
                CliError::Usage("group file carries no Hauptmodul assignment".into())
            })?;
            let report = check_padic_moonshine(&table, &assignment, cat, *p, *window, *n_max)?;
            eprintln!("{}", report.conclusion);
            Ok(report.reports().into_iter().cloned().collect())
        }
        Suite::Weak {
            symbol,
            p,
            n_max,
            window,
        } => Ok(vec![check_weak_annihilation(cat, symbol, *p, *n_max, *window)?]),
        Suite::Orderbound {
            candidates,
            q,
            r,
            window,
        } => {
            let refs: Vec<&str> = candidates.iter().map(String::as_str).collect();
            let (feasible, witness) = order_bound_feasible(cat, &refs, *q, *r, *window)?;
            let params = json!({ "candidates": candidates, "q": q, "r": r });
            let report = if feasible {
                CheckReport::new("order-bound", params, *window, Verdict::Pass)
                    .with_note(format!("feasible with a = {:?}", witness.unwrap()))
            } else {
                CheckReport::new("order-bound", params, *window, Verdict::Fail)
                    .with_note("no solution mod q^r on the window")
            };
            Ok(vec![report])
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
