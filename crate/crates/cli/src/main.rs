//! Operator harness for the 1-mean coreset library: dataset generation,
//! coreset construction, verification, benchmark matrices and a streaming
//! merge-reduce mode.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 guarantee violation
//! (`verify`/`bench` under `--strict`).

mod bench;
mod gen;
mod io;
mod pipeline;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use meancore::accurate::stats_coreset;
use meancore::stream::{merge_reduce, strong_reducer, StreamAlgo};
use meancore::verify::{empirical_strong_error, moment_check, weak_error, worst_case_strong_error};
use meancore::{CoresetMode, RngSeed, WeightedSet};

use bench::{run_bench, strict_violations, BenchConfig};
use gen::{DatasetSpec, Dist};
use pipeline::{build_coreset, normalized_frame, Algo, BuildParams};
use report::{BuildSummary, StreamLevelLog, StreamLog, VerifyReport};

#[derive(Parser)]
#[command(
    name = "meancore",
    version,
    about = "Build, verify and benchmark coresets for the weighted 1-mean problem"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a synthetic dataset CSV.
    Gen(GenArgs),
    /// Build a coreset from a points file.
    Build(BuildArgs),
    /// Verify a coreset against its source points.
    Verify(VerifyArgs),
    /// Run a benchmark matrix of builders against their guarantees.
    Bench(BenchArgs),
    /// Chunked merge-reduce build over a points file.
    Stream(StreamArgs),
}

#[derive(Args)]
struct InputOpts {
    /// Points CSV file.
    #[arg(long)]
    input: PathBuf,
    /// The input file carries a trailing weight column.
    #[arg(long)]
    weighted: bool,
    /// Skip the first data row of the input file.
    #[arg(long)]
    header: bool,
}

#[derive(Args)]
struct GenArgs {
    /// gaussian | uniform-cube | student-t | clustered
    #[arg(long, default_value = "gaussian")]
    dist: String,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Also generate a weight column (uniform in [0.5, 2)).
    #[arg(long)]
    weighted: bool,
    /// Cluster count for the clustered distribution.
    #[arg(long, default_value_t = 3)]
    clusters: usize,
    /// Degrees of freedom for the student-t distribution.
    #[arg(long, default_value_t = 3.0)]
    nu: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    input: InputOpts,
    /// stats | cara | signed | sens | bern | fw | uniform | mom
    #[arg(long)]
    algo: String,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// strong | weak
    #[arg(long, default_value = "strong")]
    mode: String,
    #[arg(long)]
    seed: Option<u64>,
    /// The sampling-guarantee constant of the sensitivity bound.
    #[arg(long = "c-const", default_value_t = 1.0)]
    c_const: f64,
    /// Logarithm base in the median-of-means group-count formula ("e" or a number).
    #[arg(long = "log-base", default_value = "e")]
    log_base: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    input: InputOpts,
    /// Coreset CSV file (`index,weight`, 1-based).
    #[arg(long)]
    coreset: PathBuf,
    /// Comma-separated subset of worst,empirical,weak,moments.
    #[arg(long, value_delimiter = ',', default_value = "worst,empirical,weak,moments")]
    checks: Vec<String>,
    #[arg(long, default_value_t = 1000)]
    queries: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Exit 3 when a computed error exceeds --eps.
    #[arg(long)]
    strict: bool,
    /// Error target for --strict.
    #[arg(long)]
    eps: Option<f64>,
    /// Also write the JSON report here (it always goes to stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Points CSV file; omit to generate with --dist/--n/--d.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    weighted: bool,
    #[arg(long)]
    header: bool,
    #[arg(long, default_value = "gaussian")]
    dist: String,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    d: usize,
    #[arg(long, default_value_t = 3)]
    clusters: usize,
    #[arg(long, default_value_t = 3.0)]
    nu: f64,
    /// Comma-separated algorithm list.
    #[arg(long, value_delimiter = ',', required = true)]
    algo: Vec<String>,
    /// Comma-separated eps grid.
    #[arg(long, value_delimiter = ',', default_value = "0.2")]
    eps: Vec<f64>,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// strong | weak
    #[arg(long, default_value = "strong")]
    mode: String,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 1000)]
    queries: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "c-const", default_value_t = 1.0)]
    c_const: f64,
    #[arg(long = "log-base", default_value = "e")]
    log_base: String,
    /// Exit 3 when any cell falls below its expected success rate.
    #[arg(long)]
    strict: bool,
    /// Output prefix; writes <out>.json and <out>.csv. Prints both without it.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StreamArgs {
    #[command(flatten)]
    input: InputOpts,
    /// Points per chunk.
    #[arg(long)]
    chunk: usize,
    /// cara | signed | fw | bern (strong reducers only).
    #[arg(long)]
    algo: String,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

/// Failures carry the exit code they map to.
enum Failure {
    Usage(anyhow::Error),
    Data(anyhow::Error),
    Guarantee(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
            Failure::Guarantee(_) => 3,
        }
    }
}

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

fn data(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Data(e.into())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.cmd {
        Cmd::Gen(args) => cmd_gen(args),
        Cmd::Build(args) => cmd_build(args),
        Cmd::Verify(args) => cmd_verify(args),
        Cmd::Bench(args) => cmd_bench(args),
        Cmd::Stream(args) => cmd_stream(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(e) => eprintln!("usage error: {e:#}"),
                Failure::Data(e) => eprintln!("data error: {e:#}"),
                Failure::Guarantee(msg) => eprintln!("guarantee violation: {msg}"),
            }
            ExitCode::from(f.code())
        }
    }
}

/// Default seed: the MEANCORE_SEED environment variable, else zero; an
/// explicit --seed always wins.
fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("MEANCORE_SEED") {
        Ok(v) => v
            .parse()
            .map_err(|_| anyhow!("MEANCORE_SEED is not a valid u64: {v:?}")),
        Err(_) => Ok(0),
    }
}

fn parse_mode(s: &str) -> Result<CoresetMode> {
    match s {
        "strong" => Ok(CoresetMode::Strong),
        "weak" => Ok(CoresetMode::Weak),
        other => Err(anyhow!("unknown mode {other:?} (expected strong|weak)")),
    }
}

fn parse_log_base(s: &str) -> Result<f64> {
    if s == "e" {
        return Ok(std::f64::consts::E);
    }
    let b: f64 = s
        .parse()
        .map_err(|_| anyhow!("log base must be \"e\" or a number, got {s:?}"))?;
    if b <= 1.0 {
        return Err(anyhow!("log base must exceed 1"));
    }
    Ok(b)
}

fn read_input(opts: &InputOpts) -> Result<WeightedSet> {
    io::read_points(&opts.input, opts.weighted, opts.header)
}

fn cmd_gen(args: GenArgs) -> Result<(), Failure> {
    let dist: Dist = args.dist.parse().map_err(usage)?;
    let seed = resolve_seed(args.seed).map_err(usage)?;
    let spec = DatasetSpec {
        dist,
        n: args.n,
        d: args.d,
        seed,
        weighted: args.weighted,
        clusters: args.clusters,
        nu: args.nu,
    };
    let set = gen::generate(&spec).map_err(usage)?;
    io::write_points(&args.out, &set, args.weighted).map_err(data)?;
    // Full-pass moment summary of what was written, for quick sanity checks.
    let m = set.moments();
    let mu = set.weighted_mean().map_err(|e| data(anyhow!("{e}")))?;
    let var = set.cost(&mu).map_err(|e| data(anyhow!("{e}")))? / m.s0;
    println!(
        "{}",
        serde_json::json!({
            "path": args.out.display().to_string(),
            "n": set.len(),
            "d": set.dim(),
            "total_weight": m.s0,
            "variance": var,
        })
    );
    Ok(())
}

fn cmd_build(args: BuildArgs) -> Result<(), Failure> {
    let algo: Algo = args.algo.parse().map_err(usage)?;
    let mode = parse_mode(&args.mode).map_err(usage)?;
    let log_base = parse_log_base(&args.log_base).map_err(usage)?;
    let seed = resolve_seed(args.seed).map_err(usage)?;
    if algo.needs_eps() && args.eps.is_none() {
        return Err(usage(anyhow!("--eps is required for algo {}", algo.name())));
    }
    let set = read_input(&args.input).map_err(data)?;

    if algo == Algo::Stats {
        let start = Instant::now();
        let summary = stats_coreset(&set);
        let build_ms = start.elapsed().as_secs_f64() * 1e3;
        io::write_summary(&args.out, &summary).map_err(data)?;
        print_summary_line(&BuildSummary {
            algo: algo.name(),
            nnz: set.dim() + 2,
            build_ms,
        });
        return Ok(());
    }

    let params = BuildParams {
        eps: args.eps.unwrap_or(0.0),
        delta: args.delta,
        mode,
        c: args.c_const,
        log_base,
        seed: RngSeed(seed),
    };
    let start = Instant::now();
    let u = build_coreset(&set, algo, &params).map_err(data)?;
    let build_ms = start.elapsed().as_secs_f64() * 1e3;
    io::write_coreset(&args.out, &u).map_err(data)?;
    print_summary_line(&BuildSummary {
        algo: algo.name(),
        nnz: u.cardinality(),
        build_ms,
    });
    Ok(())
}

fn print_summary_line(s: &BuildSummary) {
    println!("{}", serde_json::to_string(s).expect("summary serializes"));
}

fn cmd_verify(args: VerifyArgs) -> Result<(), Failure> {
    if args.strict && args.eps.is_none() {
        return Err(usage(anyhow!("--strict needs an --eps target")));
    }
    for c in &args.checks {
        if !matches!(c.as_str(), "worst" | "empirical" | "weak" | "moments") {
            return Err(usage(anyhow!(
                "unknown check {c:?} (expected worst|empirical|weak|moments)"
            )));
        }
    }
    let seed = resolve_seed(args.seed).map_err(usage)?;
    let set = read_input(&args.input).map_err(data)?;
    let u = io::read_coreset(&args.coreset, set.len()).map_err(data)?;

    let wants = |name: &str| args.checks.iter().any(|c| c == name);
    let mut report = VerifyReport::default();

    // worst/weak/moments evaluate in the normalized frame; empirical runs on
    // the raw input directly.
    let frame = if wants("worst") || wants("weak") || wants("moments") {
        Some(normalized_frame(&set, &u).map_err(data)?)
    } else {
        None
    };
    if let Some((norm, u_norm)) = &frame {
        if wants("worst") {
            report.worst_case =
                Some(worst_case_strong_error(norm, u_norm).map_err(|e| data(anyhow!("{e}")))?);
        }
        if wants("weak") {
            let e = weak_error(norm, u_norm).map_err(|e| data(anyhow!("{e}")))?;
            report.weak_mean_norm_sq = Some(e.mean_norm_sq);
            report.weak_cost_ratio = Some(e.cost_ratio);
        }
        if wants("moments") {
            let m = moment_check(norm, u_norm).map_err(|e| data(anyhow!("{e}")))?;
            report.moment_mean_drift = Some(m.mean_drift);
            report.moment_mass_drift = Some(m.mass_drift);
            report.moment_variance_drift = Some(m.variance_drift);
            report.certified_eps = Some(m.certified_eps());
        }
    }
    if wants("empirical") {
        report.empirical = Some(
            empirical_strong_error(&set, &u, args.queries, RngSeed(seed))
                .map_err(|e| data(anyhow!("{e}")))?,
        );
    }

    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    println!("{json}");
    if let Some(path) = &args.out {
        std::fs::write(path, json + "\n")
            .with_context(|| format!("cannot write {}", path.display()))
            .map_err(data)?;
    }

    if args.strict {
        let eps = args.eps.expect("checked above");
        let mut bad = Vec::new();
        if let Some(w) = report.worst_case {
            if w > eps {
                bad.push(format!("worst-case error {w} > {eps}"));
            }
        }
        if let Some(e) = report.empirical {
            if e > eps {
                bad.push(format!("empirical error {e} > {eps}"));
            }
        }
        if let Some(r) = report.weak_cost_ratio {
            if r > eps {
                bad.push(format!("weak cost ratio {r} > {eps}"));
            }
        }
        if !bad.is_empty() {
            return Err(Failure::Guarantee(bad.join("; ")));
        }
    }
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<(), Failure> {
    let mode = parse_mode(&args.mode).map_err(usage)?;
    let log_base = parse_log_base(&args.log_base).map_err(usage)?;
    let seed = resolve_seed(args.seed).map_err(usage)?;
    if args.trials == 0 {
        return Err(usage(anyhow!("--trials must be at least 1")));
    }
    let algos: Vec<Algo> = args
        .algo
        .iter()
        .map(|s| s.parse())
        .collect::<Result<_>>()
        .map_err(usage)?;
    if algos.iter().any(|a| a.needs_eps()) && args.eps.is_empty() {
        return Err(usage(anyhow!("--eps grid is required for these algorithms")));
    }

    let (set, input_name) = match &args.input {
        Some(path) => (
            io::read_points(path, args.weighted, args.header).map_err(data)?,
            path.display().to_string(),
        ),
        None => {
            let dist: Dist = args.dist.parse().map_err(usage)?;
            let spec = DatasetSpec {
                dist,
                n: args.n,
                d: args.d,
                seed,
                weighted: args.weighted,
                clusters: args.clusters,
                nu: args.nu,
            };
            (
                gen::generate(&spec).map_err(usage)?,
                format!("{}:n={}:d={}:seed={}", args.dist, args.n, args.d, seed),
            )
        }
    };

    let cfg = BenchConfig {
        algos: algos.clone(),
        eps_grid: args.eps.clone(),
        delta: args.delta,
        mode,
        trials: args.trials,
        queries: args.queries,
        seed,
        c: args.c_const,
        log_base,
    };
    let report = run_bench(&set, &input_name, &cfg).map_err(data)?;

    let json = report.to_json();
    let table = report.to_table();
    match &args.out {
        Some(prefix) => {
            let json_path = prefix.with_extension("json");
            let csv_path = prefix.with_extension("csv");
            std::fs::write(&json_path, json + "\n")
                .with_context(|| format!("cannot write {}", json_path.display()))
                .map_err(data)?;
            std::fs::write(&csv_path, &table)
                .with_context(|| format!("cannot write {}", csv_path.display()))
                .map_err(data)?;
            println!("{table}");
        }
        None => {
            println!("{json}");
            println!("{table}");
        }
    }

    if args.strict {
        let bad = strict_violations(&report, &algos);
        if !bad.is_empty() {
            return Err(Failure::Guarantee(bad.join("; ")));
        }
    }
    Ok(())
}

fn cmd_stream(args: StreamArgs) -> Result<(), Failure> {
    if args.chunk < 2 {
        return Err(usage(anyhow!("--chunk must be at least 2")));
    }
    let seed = resolve_seed(args.seed).map_err(usage)?;
    let (algo, eps) = match args.algo.as_str() {
        "cara" => (StreamAlgo::Caratheodory, 0.0),
        "signed" => (StreamAlgo::SignedSubset, 0.0),
        "fw" => {
            let eps = args
                .eps
                .ok_or_else(|| usage(anyhow!("--eps is required for fw")))?;
            (StreamAlgo::FrankWolfe { eps }, eps)
        }
        "bern" => {
            let eps = args
                .eps
                .ok_or_else(|| usage(anyhow!("--eps is required for bern")))?;
            (
                StreamAlgo::Bernstein {
                    eps,
                    delta: args.delta,
                },
                eps,
            )
        }
        other => {
            return Err(usage(anyhow!(
                "algo {other:?} cannot be streamed (need a strong reducer: cara|signed|fw|bern)"
            )))
        }
    };
    let set = read_input(&args.input).map_err(data)?;
    let out = merge_reduce(&set, args.chunk, strong_reducer(algo, RngSeed(seed)))
        .map_err(|e| data(anyhow!("stream build failed: {e}")))?;
    io::write_coreset(&args.out, &out.weights).map_err(data)?;

    let worst = worst_case_strong_error(&set, &out.weights)
        .map_err(|e| data(anyhow!("final verification failed: {e}")))?;
    let log = StreamLog {
        chunks: set.len().div_ceil(args.chunk),
        depth: out.depth,
        levels: out
            .levels
            .iter()
            .map(|l| StreamLevelLog {
                level: l.level,
                coresets: l.coresets,
                total_entries: l.total_entries,
            })
            .collect(),
        nnz: out.weights.cardinality(),
        worst_error: worst,
        error_bound: out.error_bound(eps),
    };
    println!("{}", serde_json::to_string(&log).expect("log serializes"));
    Ok(())
}
