//! `stabrank` — command-line workbench for exact stabilizer-rank and
//! polynomial-phase experiments.
//!
//! Every run emits a machine-readable report (JSON or flattened CSV with
//! identical numeric content) embedding the configuration, the seed, the
//! crate version and the wall time. Exit status: 0 when every assertion
//! holds, 1 when a mathematical assertion fails (a bug certificate), 2 for
//! usage or budget errors.

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;
use stabrank_core::fourier::{magic_correlation_bound, root_order, PhaseTable};
use stabrank_core::poly::NonclassicalPoly;
use stabrank_core::rank::{
    exact_rank2, frank_exact, frank_exact_over, magic_rank_pipeline, nor_rank_theorem_check,
    stab_rank_exact, verify_certificate, Decomposition, RankCertificate, SearchOutcome,
};
use stabrank_core::stab::{expected_count, magic_state, Catalog, StateVector};
use stabrank_core::subspace::{pigeonhole_subspace, AffineSubspace};
use stabrank_core::suites;
use stabrank_core::{Error, FpVector};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "stabrank",
    version,
    about = "Exact workbench for stabilizer rank, nonclassical polynomial phases and their correlation bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Prime qudit dimension / field characteristic.
    #[arg(long, global = true, default_value_t = 2)]
    p: u64,

    /// Number of qudits / variables.
    #[arg(long, global = true, default_value_t = 1)]
    n: usize,

    /// Degree parameter where applicable.
    #[arg(long, global = true)]
    d: Option<usize>,

    /// Search ceiling for minimal-decomposition searches.
    #[arg(long, global = true)]
    rmax: Option<usize>,

    /// Target: `magic`, `plus`, or `file:<path>`.
    #[arg(long, global = true)]
    state: Option<String>,

    /// Cubic coefficients `a,b,c` for the magic phase when p > 3.
    #[arg(long, global = true)]
    cubic: Option<String>,

    /// Custom dictionary file (one polynomial text record per line).
    #[arg(long, global = true)]
    dict: Option<PathBuf>,

    /// Write the report (or catalog, for stab-enum) to this path.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Seed for randomized suites; recorded in every report.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,

    /// Worker-thread cap (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Starting precision for certified interval comparisons.
    #[arg(long = "precision-bits", global = true, default_value_t = 128)]
    precision_bits: u32,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the full stabilizer catalog and cross-check the count.
    StabEnum,
    /// Exact stabilizer rank of the target state with certificate.
    StabRank,
    /// Exhaustive quadratic-correlation bound for the magic phase.
    CorrScan,
    /// Exact 2-rank of a degree-<=2 polynomial with certificate.
    Rank2,
    /// Exact degree-d Fourier rank of a phase function.
    Frank,
    /// Common-root mechanism behind the NOR lower bound.
    NorCheck,
    /// Constant-membership-pattern subspace on random subspaces.
    Claim1,
    /// Full magic-state rank pipeline on a decomposition.
    Pipeline,
    /// Run verification suites.
    Verify {
        /// identities | degree-depth | parseval | lovett | corr-bound |
        /// corr-decay-odd | fourier-support | catalogs | stab-rank |
        /// claim | pipeline | bridges | cw-nor | all
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Re-verify a certificate file produced by another run.
    VerifyCertificate {
        /// Path to the certificate JSON.
        cert: PathBuf,
    },
}

#[derive(Serialize)]
struct ConfigEcho {
    p: u64,
    n: usize,
    d: Option<usize>,
    rmax: Option<usize>,
    state: Option<String>,
    cubic: Option<String>,
    seed: u64,
    threads: Option<usize>,
    precision_bits: u32,
    cache_dir: String,
}

#[derive(Serialize)]
struct Envelope {
    command: String,
    version: &'static str,
    wall_ms: u128,
    config: ConfigEcho,
    report: serde_json::Value,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match run(&cli) {
        Ok(all_hold) => {
            if all_hold {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = err.downcast_ref::<Error>().map_or(2, |e| match e {
                Error::SelfCheck(_) | Error::Indeterminate(_) => 1,
                _ => 2,
            });
            ExitCode::from(code)
        }
    }
}

fn cache_dir() -> PathBuf {
    std::env::var_os("STABRANK_CACHE_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("stabrank-catalogs"))
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    let start = Instant::now();
    let cache = cache_dir();
    let command_name = match &cli.command {
        Command::StabEnum => "stab-enum",
        Command::StabRank => "stab-rank",
        Command::CorrScan => "corr-scan",
        Command::Rank2 => "rank2",
        Command::Frank => "frank",
        Command::NorCheck => "nor-check",
        Command::Claim1 => "claim1",
        Command::Pipeline => "pipeline",
        Command::Verify { .. } => "verify",
        Command::VerifyCertificate { .. } => "verify-certificate",
    };
    let (report, all_hold) = dispatch(cli, &cache)?;
    let envelope = Envelope {
        command: command_name.to_string(),
        version: env!("CARGO_PKG_VERSION"),
        wall_ms: start.elapsed().as_millis(),
        config: ConfigEcho {
            p: cli.p,
            n: cli.n,
            d: cli.d,
            rmax: cli.rmax,
            state: cli.state.clone(),
            cubic: cli.cubic.clone(),
            seed: cli.seed,
            threads: cli.threads,
            precision_bits: cli.precision_bits,
            cache_dir: cache.display().to_string(),
        },
        report,
    };
    emit(cli, &envelope)?;
    Ok(all_hold)
}

fn emit(cli: &Cli, envelope: &Envelope) -> anyhow::Result<()> {
    let value = serde_json::to_value(envelope)?;
    let rendered = match cli.format {
        Format::Json => serde_json::to_string_pretty(&value)? + "\n",
        Format::Csv => to_csv(&value),
    };
    // stab-enum uses --out for the catalog file itself, so its report
    // always goes to stdout.
    let report_path = match cli.command {
        Command::StabEnum => None,
        _ => cli.out.as_deref(),
    };
    match report_path {
        Some(path) => {
            std::fs::write(path, &rendered)
                .with_context(|| format!("writing report to {}", path.display()))?;
            println!("report written to {}", path.display());
        }
        None => print!("{rendered}"),
    }
    Ok(())
}

/// Flatten a JSON value into `key,value` rows; scalars only, identical
/// numeric content to the JSON rendering.
fn to_csv(value: &serde_json::Value) -> String {
    fn quote(s: &str) -> String {
        if s.contains([',', '"', '\n']) {
            format!("\"{}\"", s.replace('"', "\"\""))
        } else {
            s.to_string()
        }
    }
    fn walk(prefix: &str, value: &serde_json::Value, rows: &mut Vec<(String, String)>) {
        match value {
            serde_json::Value::Object(map) => {
                for (k, v) in map {
                    let key = if prefix.is_empty() {
                        k.clone()
                    } else {
                        format!("{prefix}.{k}")
                    };
                    walk(&key, v, rows);
                }
            }
            serde_json::Value::Array(items) => {
                for (i, v) in items.iter().enumerate() {
                    walk(&format!("{prefix}[{i}]"), v, rows);
                }
            }
            serde_json::Value::Null => rows.push((prefix.to_string(), String::new())),
            serde_json::Value::Bool(b) => rows.push((prefix.to_string(), b.to_string())),
            serde_json::Value::Number(n) => rows.push((prefix.to_string(), n.to_string())),
            serde_json::Value::String(s) => rows.push((prefix.to_string(), s.clone())),
        }
    }
    let mut rows = Vec::new();
    walk("", value, &mut rows);
    let mut out = String::from("key,value\n");
    for (k, v) in rows {
        out.push_str(&format!("{},{}\n", quote(&k), quote(&v)));
    }
    out
}

fn parse_cubic(cli: &Cli) -> anyhow::Result<Option<(u64, u64, u64)>> {
    match &cli.cubic {
        None => Ok(None),
        Some(text) => {
            let parts: Vec<u64> = text
                .split(',')
                .map(|t| t.trim().parse::<u64>())
                .collect::<std::result::Result<_, _>>()
                .with_context(|| format!("parsing --cubic '{text}' as a,b,c"))?;
            anyhow::ensure!(parts.len() == 3, "--cubic needs exactly three coefficients");
            Ok(Some((parts[0], parts[1], parts[2])))
        }
    }
}

fn target_state(cli: &Cli) -> anyhow::Result<StateVector> {
    let spec = cli.state.as_deref().unwrap_or("magic");
    match spec {
        "magic" => Ok(magic_state(cli.p, cli.n, parse_cubic(cli)?)?),
        "plus" => Ok(StateVector::plus_state(cli.p, cli.n)?),
        other => {
            let path = other.strip_prefix("file:").ok_or_else(|| {
                anyhow::anyhow!("--state must be magic, plus, or file:<path>, got '{other}'")
            })?;
            let data = std::fs::read_to_string(path)
                .with_context(|| format!("reading state file {path}"))?;
            Ok(serde_json::from_str(&data)?)
        }
    }
}

fn target_poly(cli: &Cli) -> anyhow::Result<NonclassicalPoly> {
    let spec = cli.state.as_deref().unwrap_or("magic");
    match spec {
        "magic" => Ok(NonclassicalPoly::magic_phase(
            cli.p,
            cli.n,
            parse_cubic(cli)?,
        )?),
        other => {
            let path = other.strip_prefix("file:").ok_or_else(|| {
                anyhow::anyhow!("--state must be magic or file:<poly text>, got '{other}'")
            })?;
            let data = std::fs::read_to_string(path)
                .with_context(|| format!("reading polynomial file {path}"))?;
            Ok(NonclassicalPoly::from_text(data.trim())?)
        }
    }
}

fn dispatch(cli: &Cli, cache: &Path) -> anyhow::Result<(serde_json::Value, bool)> {
    match &cli.command {
        Command::StabEnum => {
            let catalog = Catalog::load_or_build(cli.p, cli.n, Some(cache))?;
            if let Some(out) = &cli.out {
                catalog.save(out)?;
            }
            let expected = expected_count(cli.p, cli.n);
            let matches = catalog.len() as u64 == expected;
            let report = json!({
                "count": catalog.len(),
                "formula_count": expected,
                "count_matches_formula": matches,
                "catalog_file": cli.out.as_ref().map(|p| p.display().to_string()),
            });
            Ok((report, matches))
        }
        Command::StabRank => {
            let target = target_state(cli)?;
            let catalog = Catalog::load_or_build(cli.p, cli.n, Some(cache))?;
            let r_max = cli.rmax.unwrap_or(4);
            match stab_rank_exact(&target, &catalog, r_max)? {
                SearchOutcome::Found { rank, certificate } => {
                    let reverified = verify_certificate(&certificate, cli.precision_bits)?;
                    let report = json!({
                        "rank": rank,
                        "witness_reverified": reverified.ok,
                        "certificate": serde_json::to_value(&certificate)?,
                    });
                    Ok((report, reverified.ok))
                }
                SearchOutcome::Exhausted {
                    r_max,
                    subsets_checked,
                } => {
                    let report = json!({
                        "rank": null,
                        "exhausted_at_rmax": r_max,
                        "subsets_checked": subsets_checked,
                    });
                    Ok((report, true))
                }
            }
        }
        Command::CorrScan => {
            let bound = magic_correlation_bound(cli.p, cli.n, cli.precision_bits)?;
            let holds = bound.holds;
            Ok((serde_json::to_value(&bound)?, holds))
        }
        Command::Rank2 => {
            let poly = target_poly(cli)?;
            let (rank, certificate) = exact_rank2(&poly)?;
            let reverified = verify_certificate(&certificate, cli.precision_bits)?;
            let report = json!({
                "rank": rank,
                "witness_reverified": reverified.ok,
                "certificate": serde_json::to_value(&certificate)?,
            });
            Ok((report, reverified.ok))
        }
        Command::Frank => {
            let poly = target_poly(cli)?;
            let d = cli.d.unwrap_or(3);
            let table = PhaseTable::from_poly(&poly, root_order(cli.p))?;
            let outcome = match &cli.dict {
                None => frank_exact(&table, d, cli.rmax.unwrap_or(8))?,
                Some(path) => {
                    let data = std::fs::read_to_string(path)
                        .with_context(|| format!("reading dictionary {}", path.display()))?;
                    let dictionary: Vec<NonclassicalPoly> = data
                        .lines()
                        .filter(|l| !l.trim().is_empty())
                        .map(NonclassicalPoly::from_text)
                        .collect::<stabrank_core::Result<_>>()?;
                    frank_exact_over(&table, &dictionary, d, cli.rmax.unwrap_or(8))?
                }
            };
            match outcome {
                SearchOutcome::Found { rank, certificate } => {
                    let reverified = verify_certificate(&certificate, cli.precision_bits)?;
                    let report = json!({
                        "rank": rank,
                        "witness_reverified": reverified.ok,
                        "certificate": serde_json::to_value(&certificate)?,
                    });
                    Ok((report, reverified.ok))
                }
                SearchOutcome::Exhausted {
                    r_max,
                    subsets_checked,
                } => Ok((
                    json!({"rank": null, "exhausted_at_rmax": r_max, "subsets_checked": subsets_checked}),
                    true,
                )),
            }
        }
        Command::NorCheck => {
            let d = cli.d.unwrap_or(3);
            let r = cli.rmax.unwrap_or(1);
            let report = match nor_rank_theorem_check(cli.n, d, r, None) {
                Ok(rep) => rep,
                Err(Error::BudgetExceeded(_)) => {
                    nor_rank_theorem_check(cli.n, d, r, Some((10_000, cli.seed)))?
                }
                Err(e) => return Err(e.into()),
            };
            let ok = report.all_have_second_root;
            Ok((serde_json::to_value(&report)?, ok))
        }
        Command::Claim1 => {
            let r = cli.rmax.unwrap_or_else(|| (cli.n / 2).max(1));
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let subspaces: Vec<AffineSubspace> = (0..r)
                .map(|_| {
                    let k = rng.random_range(0..=cli.n);
                    let spans: Vec<FpVector> = (0..k)
                        .map(|_| {
                            FpVector::new(
                                cli.p,
                                (0..cli.n).map(|_| rng.random_range(0..cli.p)).collect(),
                            )
                        })
                        .collect::<stabrank_core::Result<_>>()?;
                    let offset = FpVector::new(
                        cli.p,
                        (0..cli.n).map(|_| rng.random_range(0..cli.p)).collect(),
                    )?;
                    AffineSubspace::from_span(offset, &spans)
                })
                .collect::<stabrank_core::Result<_>>()?;
            let outcome = pigeonhole_subspace(&subspaces)?;
            let dim_ok = outcome.subspace.dim() as i64 >= cli.n as i64 - 2 * r as i64;
            let report = json!({
                "r": r,
                "inputs": subspaces.iter().map(AffineSubspace::to_text).collect::<Vec<_>>(),
                "subspace": outcome.subspace.to_text(),
                "dim": outcome.subspace.dim(),
                "n_minus_2r": cli.n as i64 - 2 * r as i64,
                "members": outcome.members,
                "base_point": outcome.base_point.to_string(),
                "pattern_count": outcome.pattern_count,
                "dim_bound_holds": dim_ok,
            });
            Ok((report, dim_ok))
        }
        Command::Pipeline => {
            let decomp = match cli.state.as_deref() {
                None | Some("magic") => {
                    let target = magic_state(cli.p, cli.n, parse_cubic(cli)?)?;
                    let catalog = Catalog::load_or_build(cli.p, cli.n, Some(cache))?;
                    let outcome = stab_rank_exact(&target, &catalog, cli.rmax.unwrap_or(4))?;
                    match outcome {
                        SearchOutcome::Found { certificate, .. } => {
                            Decomposition::from_certificate(&certificate)?
                        }
                        SearchOutcome::Exhausted { r_max, .. } => {
                            anyhow::bail!("no decomposition found within rmax = {r_max}")
                        }
                    }
                }
                Some(other) => {
                    let path = other.strip_prefix("file:").ok_or_else(|| {
                        anyhow::anyhow!("--state must be magic or file:<decomposition json>")
                    })?;
                    let data = std::fs::read_to_string(path)
                        .with_context(|| format!("reading decomposition {path}"))?;
                    serde_json::from_str(&data)?
                }
            };
            let report = magic_rank_pipeline(&decomp, cli.precision_bits)?;
            let ok = report.restricted_identity_ok && report.chain_consistent;
            Ok((serde_json::to_value(&report)?, ok))
        }
        Command::Verify { suite } => {
            let reports = suites::run_named(suite, cli.seed, cli.precision_bits, Some(cache))?;
            let mut all = true;
            let mut stderr = std::io::stderr().lock();
            for r in &reports {
                let _ = writeln!(
                    stderr,
                    "{:<18} {} ({} cases, {} ms)",
                    r.name,
                    if r.passed { "PASS" } else { "FAIL" },
                    r.cases,
                    r.millis
                );
                all &= r.passed;
            }
            Ok((serde_json::to_value(&reports)?, all))
        }
        Command::VerifyCertificate { cert } => {
            let data = std::fs::read_to_string(cert)
                .with_context(|| format!("reading certificate {}", cert.display()))?;
            let parsed: RankCertificate = serde_json::from_str(&data)?;
            let outcome = verify_certificate(&parsed, cli.precision_bits)?;
            let ok = outcome.ok;
            Ok((serde_json::to_value(&outcome)?, ok))
        }
    }
}
