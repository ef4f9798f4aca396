//! ellstat: censuses of elliptic curves over small finite fields, exact
//! Hecke-operator traces on S_k(Gamma(N,M)), subgroup-conditioned moments,
//! verification sweeps, and arithmetic statistics.
//!
//! Exit codes: 0 success, 1 validation error, 2 verification failure.

use clap::{Parser, Subcommand, ValueEnum};
use ellstat::arith::Rat;
use ellstat::census::CensusTable;
use ellstat::classnum::GroupSpec;
use ellstat::moments::{self, Method};
use ellstat::stats;
use ellstat::traceformula::{self, TraceRequest};
use ellstat::verify::{self, CensusStore};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "ellstat", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Build (or load from cache) the census of curves over F_q
    Census {
        #[arg(long)]
        q: u64,
        /// Write the census JSON to this path instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact trace of <d> T_q on S_k(Gamma(N,M))
    Trace {
        #[arg(long)]
        q: u64,
        #[arg(long = "N")]
        n: u64,
        #[arg(long = "M")]
        m: u64,
        #[arg(long, default_value_t = 1)]
        d: u64,
        #[arg(long)]
        k: u32,
    },
    /// Moment of the Frobenius trace over curves containing Z/n1 x Z/n2
    Moment {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n1: u64,
        #[arg(long)]
        n2: u64,
        /// Chebyshev index: computes E_q(U_{k-2}(t,q) Phi_A)
        #[arg(long, conflicts_with = "power")]
        k: Option<u32>,
        /// Power moment: computes E_q(t^R Phi_A)
        #[arg(long)]
        power: Option<u32>,
        #[arg(long, value_enum, default_value_t = MethodArg::Both)]
        method: MethodArg,
    },
    /// Run a verification suite; exits 2 on any mismatch
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 25)]
        qmax: u64,
    },
    /// Statistics of invariant factors over the census
    Stats {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        what: String,
        /// Fixed second invariant factor (sigmrq)
        #[arg(long)]
        m: Option<u64>,
        /// Prime for the l-part statistics
        #[arg(long)]
        ell: Option<u64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Census,
    Formula,
    Both,
}

fn cache_dir() -> PathBuf {
    std::env::var_os("ELLSTAT_CACHE")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(".ellstat-cache"))
}

/// Rows of (key, value) rendered in the requested format.
fn emit(format: Format, rows: &[(String, String)]) {
    match format {
        Format::Json => {
            let map: serde_json::Map<String, serde_json::Value> = rows
                .iter()
                .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
                .collect();
            println!("{}", serde_json::Value::Object(map));
        }
        Format::Csv => {
            for (k, v) in rows {
                println!("{k},{v}");
            }
        }
        Format::Table => {
            let w = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            for (k, v) in rows {
                println!("{k:w$}  {v}");
            }
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Census { q, out } => {
            let table = CensusTable::load_or_build(q, Some(&cache_dir()))
                .map_err(|e| format!("census: {e}"))?;
            let json = table.to_json();
            match out {
                Some(path) => {
                    std::fs::write(&path, &json).map_err(|e| format!("write {path:?}: {e}"))?;
                    let rows = vec![
                        ("q".to_string(), q.to_string()),
                        ("classes".to_string(), table.classes.len().to_string()),
                        ("out".to_string(), path.display().to_string()),
                    ];
                    emit(cli.format, &rows);
                }
                None => println!("{json}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Trace { q, n, m, d, k } => {
            let res = traceformula::trace_gamma_nm(&TraceRequest {
                q,
                level_n: n,
                level_m: m,
                d,
                k,
            })
            .map_err(|e| format!("trace: {e}"))?;
            let rows = vec![
                ("total".to_string(), res.total.to_string()),
                ("identity".to_string(), res.identity_term.to_string()),
                ("elliptic".to_string(), res.elliptic_term.to_string()),
                ("hyperbolic".to_string(), res.hyperbolic_term.to_string()),
                ("dual".to_string(), res.dual_term.to_string()),
            ];
            emit(cli.format, &rows);
            Ok(ExitCode::SUCCESS)
        }
        Command::Moment { q, n1, n2, k, power, method } => {
            let a = GroupSpec::new(n1, n2).map_err(|e| format!("moment: {e}"))?;
            let method = match method {
                MethodArg::Census => Method::Census,
                MethodArg::Formula => Method::Formula,
                MethodArg::Both => Method::Both,
            };
            let needs_census = !matches!(method, Method::Formula);
            let table = if needs_census {
                Some(
                    CensusTable::load_or_build(q, Some(&cache_dir()))
                        .map_err(|e| format!("census: {e}"))?,
                )
            } else {
                None
            };
            let (label, value): (String, Rat) = match (k, power) {
                (Some(k), None) => {
                    let v = match method {
                        Method::Formula => {
                            moments::moment_mt(q, &a, k).map_err(|e| format!("moment: {e}"))?
                        }
                        Method::Census => table.as_ref().unwrap().moment_u(&a, k),
                        Method::Both => {
                            let f =
                                moments::moment_mt(q, &a, k).map_err(|e| format!("moment: {e}"))?;
                            let c = table.as_ref().unwrap().moment_u(&a, k);
                            if f != c {
                                return Err(format!("census {c} != formula {f}"));
                            }
                            f
                        }
                    };
                    (format!("E_{q}(U_{}(t,q) Phi_({n1},{n2}))", k - 2), v)
                }
                (None, Some(r)) => {
                    let v = moments::moment_power(q, &a, r, method, table.as_ref())
                        .map_err(|e| format!("moment: {e}"))?;
                    (format!("E_{q}(t^{r} Phi_({n1},{n2}))"), v)
                }
                _ => return Err("exactly one of --k or --power is required".to_string()),
            };
            emit(cli.format, &[(label, value.to_string())]);
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { suite, qmax } => {
            let mut store = CensusStore::new(Some(cache_dir()));
            let reports = verify::run_suite(&suite, qmax, &mut store)
                .ok_or_else(|| format!("unknown suite: {suite}"))?;
            let mut all_pass = true;
            let mut counterexamples = Vec::new();
            for rep in &reports {
                println!("{}", rep.summary());
                for c in rep.failures() {
                    all_pass = false;
                    if counterexamples.len() < 10 {
                        counterexamples.push(serde_json::json!({
                            "suite": rep.suite,
                            "check": c.label,
                            "detail": c.detail,
                        }));
                    }
                }
            }
            if all_pass {
                Ok(ExitCode::SUCCESS)
            } else {
                println!(
                    "{}",
                    serde_json::json!({ "failures": counterexamples })
                );
                Ok(ExitCode::from(2))
            }
        }
        Command::Stats { q, what, m, ell } => {
            let table = CensusTable::load_or_build(q, Some(&cache_dir()))
                .map_err(|e| format!("census: {e}"))?;
            let mut rows: Vec<(String, String)> = Vec::new();
            match what.as_str() {
                "n1" | "n2" => {
                    let (r1, r2) = stats::invariant_averages(&table);
                    let r = if what == "n1" { r1 } else { r2 };
                    rows.push(("statistic".into(), r.statistic));
                    rows.push(("census".into(), r.census_value.to_string()));
                    rows.push(("main_term".into(), r.formula_main_term.to_string()));
                    rows.push(("gap".into(), r.gap.to_string()));
                }
                "cyclic" => {
                    let r = stats::sigmrq(&table, 1, 2);
                    rows.push(("statistic".into(), "P(E(F_q) cyclic)".into()));
                    rows.push(("census".into(), r.census_value.to_string()));
                    rows.push(("main_term".into(), r.formula_main_term.to_string()));
                    rows.push(("gap".into(), r.gap.to_string()));
                }
                "sigmrq" => {
                    let m = m.ok_or("sigmrq needs --m")?;
                    let r = stats::sigmrq(&table, m, 2);
                    rows.push(("statistic".into(), r.statistic));
                    rows.push(("census".into(), r.census_value.to_string()));
                    rows.push(("main_term".into(), r.formula_main_term.to_string()));
                    rows.push(("gap".into(), r.gap.to_string()));
                }
                "gekeler" => {
                    let l = ell.ok_or("gekeler needs --ell")?;
                    let cap = ((q as f64).ln() / (l as f64).ln()) as u32 + 2;
                    for alpha in 0..=cap {
                        for beta in 0..=alpha {
                            let p = stats::gekeler_ellpart(&table, l, alpha, beta)
                                .map_err(|e| format!("gekeler: {e}"))?;
                            if !p.is_zero() {
                                rows.push((format!("P(l-part = ({alpha},{beta}))"), p.to_string()));
                            }
                        }
                    }
                }
                other => return Err(format!("unknown statistic: {other}")),
            }
            emit(cli.format, &rows);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
