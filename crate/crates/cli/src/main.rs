mod manifest;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use davlab_core::construction::{
    construct_with, make_params, make_params_relaxed, params_with_radius, verify_document,
    ConstructOptions, CoverCertificate, CoverConfig, CoverMode, Tier, Verdict,
};
use davlab_core::extremal::{default_size_cap, lower_bound};
use davlab_core::parse::{parse_k_spec, parse_prime_spec, parse_weight_list};
use davlab_core::{davenport_constant, fd_exact, Error, ExtremalResult, Modulus, WeightSet};
use serde::Serialize;
use serde_json::json;

use manifest::{digest, now_ms, RunManifest};

const EXIT_USAGE: u8 = 2;
const EXIT_VERIFY: u8 = 3;
const EXIT_SEARCH: u8 = 4;
/// Largest n accepted by `davenport`; residue sets are dense bit vectors.
const MAX_N: u64 = 1 << 24;

#[derive(Parser)]
#[command(name = "davlab", version, about = "Weighted Davenport constants of cyclic groups")]
struct Cli {
    /// Worker threads for the parallel searches.
    #[arg(long, global = true, env = "DAVLAB_THREADS")]
    threads: Option<usize>,
    /// Where to write the run manifest (default: stderr; `construct --out F` uses F.manifest.json).
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact A-weighted Davenport constant of Z_n.
    Davenport(DavenportArgs),
    /// Exact f(p, k) for small primes.
    FdExact(FdArgs),
    /// Build a weight set with a certificate.
    Construct(ConstructArgs),
    /// Re-check a certificate file.
    Verify(VerifyArgs),
    /// f(p, k) over a grid of primes and targets.
    Scan(ScanArgs),
}

#[derive(Args)]
#[group(id = "weight_source", required = true, multiple = false)]
struct WeightSource {
    /// Comma-separated weights in [1, n−1].
    #[arg(long)]
    weights: Option<String>,
    /// A = Z_n \ {0}.
    #[arg(long)]
    weights_all: bool,
    /// A = {1, n−1}.
    #[arg(long)]
    weights_pm1: bool,
}

#[derive(Args)]
struct DavenportArgs {
    #[arg(long)]
    n: u64,
    #[command(flatten)]
    source: WeightSource,
    /// Longest sequence to search for; defaults to n (always exact).
    #[arg(long)]
    cap: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct FdArgs {
    /// A prime, or a range `lo..hi` whose primes are used.
    #[arg(long)]
    p: String,
    #[arg(long)]
    k: u64,
    /// Largest |A| tried; defaults to ceil(4·(p ln p)^(1/k)).
    #[arg(long)]
    size_cap: Option<u64>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Add per-row wall times to JSON output (makes it nondeterministic).
    #[arg(long)]
    timings: bool,
}

#[derive(Args)]
struct ScanArgs {
    /// A prime or a range `lo..hi`.
    #[arg(long)]
    p: String,
    /// A target or a range `lo..hi`.
    #[arg(long)]
    k: String,
    #[arg(long)]
    size_cap: Option<u64>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum CoverModeArg {
    Greedy,
    PaperFaithful,
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    k: u32,
    #[arg(long = "C", default_value_t = 9.0)]
    c: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// auto, exact, goodness-full, goodness-sampled or condition-exact.
    #[arg(long, default_value = "auto")]
    tier: String,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "greedy")]
    cover_mode: CoverModeArg,
    #[arg(long, default_value_t = 64)]
    max_rounds: u32,
    /// Test mode: allow C ≤ 8 and skip the 8·k·L < p guard.
    #[arg(long)]
    relaxed: bool,
    /// Test mode: use this L directly (implies --relaxed).
    #[arg(long)]
    radius: Option<u64>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    cert: PathBuf,
    /// Tier to re-check at; defaults to the recorded one.
    #[arg(long)]
    tier: Option<String>,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::CoverFailure { .. } => EXIT_SEARCH,
            Error::Certificate(_) => EXIT_VERIFY,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

/// What a subcommand produced.
struct Outcome {
    code: u8,
    output: Option<(String, Option<PathBuf>)>,
    wall_time_ms: Option<Vec<u128>>,
}

fn canonical_pretty<T: Serialize>(value: &T) -> String {
    let value = serde_json::to_value(value).expect("serializable");
    let mut s = serde_json::to_string_pretty(&value).expect("serializable");
    s.push('\n');
    s
}

fn write_output(text: &str, path: Option<&Path>) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text)
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure::usage(format!("cannot write output: {e}")))
        }
    }
}

fn parse_tier(s: &str) -> Result<Option<Tier>, Failure> {
    if s == "auto" {
        return Ok(None);
    }
    s.parse().map(Some).map_err(|e: Error| Failure::usage(e.to_string()))
}

fn cmd_davenport(args: &DavenportArgs) -> Result<Outcome, Failure> {
    if args.n > MAX_N {
        return Err(Failure::usage(format!("n must be at most {MAX_N}")));
    }
    let modulus = Modulus::new(args.n)?;
    let weights = match (&args.source.weights, args.source.weights_all) {
        (Some(list), _) => parse_weight_list(list, args.n)?,
        (None, true) => WeightSet::all(modulus),
        (None, false) => WeightSet::plus_minus_one(modulus),
    };
    let result = davenport_constant(&weights, args.cap.unwrap_or(args.n));
    Ok(Outcome {
        code: 0,
        output: Some((canonical_pretty(&result), None)),
        wall_time_ms: None,
    })
}

#[derive(Serialize)]
struct FdRow {
    #[serde(flatten)]
    result: ExtremalResult,
    lower_bound: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_time_ms: Option<u128>,
}

fn fd_rows(primes: &[u64], ks: &[u64], size_cap: Option<u64>) -> Result<(Vec<FdRow>, Vec<u128>), Failure> {
    let mut rows = Vec::new();
    let mut times = Vec::new();
    for &p in primes {
        for &k in ks {
            let start = Instant::now();
            let result = fd_exact(p, k, size_cap.unwrap_or_else(|| default_size_cap(p, k)))?;
            times.push(start.elapsed().as_millis());
            rows.push(FdRow {
                lower_bound: lower_bound(p, k),
                result,
                wall_time_ms: None,
            });
        }
    }
    Ok((rows, times))
}

pub const CSV_HEADER: [&str; 6] = ["p", "k", "value", "lower_bound", "orbits_tested", "witness"];

fn rows_csv(rows: &[FdRow]) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Failure::usage(e.to_string());
    w.write_record(CSV_HEADER).map_err(io)?;
    for row in rows {
        let r = &row.result;
        let witness = r
            .witness
            .as_ref()
            .map(|a| {
                a.iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .unwrap_or_default();
        w.write_record([
            r.p.to_string(),
            r.k.to_string(),
            r.value.to_string(),
            row.lower_bound.to_string(),
            r.orbits_tested.to_string(),
            witness,
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::usage(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("utf-8"))
}

fn render_rows(mut rows: Vec<FdRow>, times: &[u128], format: Format, timings: bool) -> Result<String, Failure> {
    match format {
        Format::Csv => rows_csv(&rows),
        Format::Json => {
            if timings {
                for (row, &t) in rows.iter_mut().zip(times) {
                    row.wall_time_ms = Some(t);
                }
            }
            Ok(canonical_pretty(&rows))
        }
    }
}

fn cmd_fd_exact(args: &FdArgs) -> Result<Outcome, Failure> {
    let primes = parse_prime_spec(&args.p)?;
    if args.k == 0 {
        return Err(Failure::usage("k must be at least 1"));
    }
    let (rows, times) = fd_rows(&primes, &[args.k], args.size_cap)?;
    Ok(Outcome {
        code: 0,
        output: Some((render_rows(rows, &times, args.format, args.timings)?, None)),
        wall_time_ms: Some(times),
    })
}

fn cmd_scan(args: &ScanArgs) -> Result<Outcome, Failure> {
    let primes = parse_prime_spec(&args.p)?;
    let ks: Vec<u64> = parse_k_spec(&args.k)?.into_iter().map(u64::from).collect();
    let (rows, times) = fd_rows(&primes, &ks, args.size_cap)?;
    Ok(Outcome {
        code: 0,
        output: Some((render_rows(rows, &times, args.format, false)?, None)),
        wall_time_ms: Some(times),
    })
}

fn cmd_construct(args: &ConstructArgs) -> Result<Outcome, Failure> {
    let tier = parse_tier(&args.tier)?;
    let params = match (args.radius, args.relaxed) {
        (Some(radius), _) => params_with_radius(args.p, args.k, radius, args.seed)?,
        (None, true) => make_params_relaxed(args.p, args.k, args.c, args.seed)?,
        (None, false) => make_params(args.p, args.k, args.c, args.seed)?,
    };
    let options = ConstructOptions {
        cover: CoverConfig {
            mode: match args.cover_mode {
                CoverModeArg::Greedy => CoverMode::Greedy,
                CoverModeArg::PaperFaithful => CoverMode::PaperFaithful,
            },
            max_rounds: args.max_rounds,
            ..CoverConfig::default()
        },
        tier,
    };
    let cert = construct_with(&params, &options)?;
    let v = &cert.verification;
    eprintln!(
        "tier={} verdict={} |A|={} N={} coverage={}",
        v.tier,
        if cert.passed() { "pass" } else { "fail" },
        cert.sizes.weight_count,
        cert.n_total,
        v.coverage
    );
    Ok(Outcome {
        code: if cert.passed() { 0 } else { EXIT_VERIFY },
        output: Some((cert.to_json(), args.out.clone())),
        wall_time_ms: None,
    })
}

fn cmd_verify(args: &VerifyArgs) -> Result<Outcome, Failure> {
    let tier = match &args.tier {
        Some(t) => parse_tier(t)?,
        None => None,
    };
    let text = fs::read_to_string(&args.cert)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", args.cert.display())))?;
    let cert = CoverCertificate::from_json(&text)?;
    let report = verify_document(&cert, tier)?;
    let pass = report.verdict == Verdict::Pass;
    let line = format!(
        "tier={} verdict={} coverage={} checked={}/{}\n",
        report.tier,
        if pass { "pass" } else { "fail" },
        report.coverage,
        report.checked_count,
        report.total_count
    );
    Ok(Outcome {
        code: if pass { 0 } else { EXIT_VERIFY },
        output: Some((line, None)),
        wall_time_ms: None,
    })
}

fn params_json(command: &Command) -> (&'static str, serde_json::Value) {
    match command {
        Command::Davenport(a) => (
            "davenport",
            json!({
                "n": a.n,
                "weights": a.source.weights,
                "weights_all": a.source.weights_all,
                "weights_pm1": a.source.weights_pm1,
                "cap": a.cap,
            }),
        ),
        Command::FdExact(a) => (
            "fd-exact",
            json!({"p": a.p, "k": a.k, "size_cap": a.size_cap}),
        ),
        Command::Scan(a) => ("scan", json!({"p": a.p, "k": a.k, "size_cap": a.size_cap})),
        Command::Construct(a) => (
            "construct",
            json!({
                "p": a.p,
                "k": a.k,
                "C": format!("{:.12}", a.c),
                "seed": a.seed,
                "tier": a.tier,
                "max_rounds": a.max_rounds,
                "relaxed": a.relaxed || a.radius.is_some(),
                "radius": a.radius,
            }),
        ),
        Command::Verify(a) => (
            "verify",
            json!({"cert": a.cert.display().to_string(), "tier": a.tier}),
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let (name, params) = params_json(&cli.command);
    let mut run = RunManifest::start(name, params);
    let result = match &cli.command {
        Command::Davenport(a) => cmd_davenport(a),
        Command::FdExact(a) => cmd_fd_exact(a),
        Command::Scan(a) => cmd_scan(a),
        Command::Construct(a) => cmd_construct(a),
        Command::Verify(a) => cmd_verify(a),
    };
    let code = match result {
        Ok(outcome) => {
            let mut code = outcome.code;
            if let Some((text, path)) = outcome.output {
                if let Err(f) = write_output(&text, path.as_deref()) {
                    eprintln!("error: {}", f.message);
                    code = f.code;
                } else {
                    run.result_digest = Some(digest(text.as_bytes()));
                    run.output = Some(
                        path.as_ref()
                            .map_or("stdout".into(), |p| p.display().to_string()),
                    );
                }
            }
            run.wall_time_ms = outcome.wall_time_ms;
            code
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    };
    run.exit_code = code as i32;
    run.finished_unix_ms = now_ms();
    let manifest_path = cli.manifest.clone().or_else(|| match &cli.command {
        Command::Construct(ConstructArgs { out: Some(out), .. }) => {
            let mut s = out.clone().into_os_string();
            s.push(".manifest.json");
            Some(PathBuf::from(s))
        }
        _ => None,
    });
    let text = run.to_json();
    match manifest_path {
        Some(p) => {
            if let Err(e) = fs::write(&p, text) {
                eprintln!("error: cannot write manifest {}: {e}", p.display());
            }
        }
        None => {
            let _ = std::io::stderr().write_all(text.as_bytes());
        }
    }
    ExitCode::from(code)
}
