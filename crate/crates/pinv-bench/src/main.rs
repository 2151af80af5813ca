//! Benchmark CLI: run a solver and emit a residual trace, certify theoretical
//! rates for a sketch distribution, or compare several methods on one matrix.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pinv_bench::clock::WallClock;
use pinv_bench::gen::load_matrix;
use pinv_bench::trace;
use pinv_core::pinv::{pinv_exact, DEFAULT_REL_TOL};
use pinv_core::rate::{
    satax_rate_bound, satax_rate_exact, saxas_rate_bound, DEFAULT_KRON_CAP, DEFAULT_RATE_CAP,
};
use pinv_core::sketch::DiscreteSketchDistribution;
use pinv_core::solver::run;
use pinv_core::{Method, SolverConfig};

const TIMING_NOTE: &str = "Wall time (time_s) covers solver steps only; residual evaluation and \
I/O are excluded. The flops column comes from a closed-form per-iteration \
model (see `run --explain-flops`), never from timers.";

#[derive(Parser)]
#[command(name = "pinv-bench", version, about = "Benchmark driver for randomized pseudoinverse solvers", long_about = None, after_help = TIMING_NOTE)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one method and emit a CSV residual trace.
    Run(RunArgs),
    /// Evaluate theoretical convergence rates for a sketch distribution.
    Certify(CertifyArgs),
    /// Run several methods on the same matrix; long-format CSV.
    Compare(CompareArgs),
}

#[derive(Args)]
struct MatrixSource {
    /// Matrix Market file to read.
    #[arg(long, conflicts_with = "gen")]
    matrix: Option<String>,
    /// Generator spec: gaussian:m=M,n=N,r=R | sym:n=N,r=R | gram:PATH.
    #[arg(long)]
    gen: Option<String>,
}

#[derive(Args)]
struct RunArgs {
    /// satax_uni|satax_ada|saxas_uni|saxas_ada|saxas_rep|project|sax|xa|ns|ns-satax
    #[arg(long, default_value = "satax_uni")]
    method: String,
    /// Sketch width.
    #[arg(long, default_value_t = 1)]
    tau: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    max_iters: usize,
    /// Relative residual tolerance: stop at ||AXA-A||_F <= tol * ||A||_F.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[command(flatten)]
    source: MatrixSource,
    /// on|off: also report ||X_k - pinv(A)||_F per traced iteration.
    #[arg(long, default_value = "off")]
    oracle: String,
    /// Trace cadence in iterations (default: one effective pass).
    #[arg(long)]
    trace_every: Option<usize>,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the flop counting model and exit.
    #[arg(long)]
    explain_flops: bool,
}

#[derive(Args)]
struct CertifyArgs {
    #[command(flatten)]
    source: MatrixSource,
    /// uniform:tau=K | rep:tau=K | singletons
    #[arg(long, default_value = "singletons")]
    dist: String,
    /// satax | saxas
    #[arg(long, default_value = "satax")]
    rate: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Machine-readable output.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CompareArgs {
    /// Comma-separated method list.
    #[arg(long)]
    methods: String,
    #[arg(long, default_value_t = 1)]
    tau: usize,
    /// Base seed; method i runs with splitmix64(seed + i + 1).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[command(flatten)]
    source: MatrixSource,
    #[arg(long, default_value = "off")]
    oracle: String,
    #[arg(long)]
    trace_every: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_method(name: &str) -> Result<Method, String> {
    Ok(match name {
        "satax_uni" => Method::SataxUni,
        "satax_ada" => Method::SataxAda,
        "saxas_uni" => Method::SaxasUni,
        "saxas_ada" => Method::SaxasAda,
        "saxas_rep" => Method::SaxasRep,
        "project" => Method::ProjectUni,
        "sax" => Method::SaxFullRowRank,
        "xa" => Method::XaFullColRank,
        "ns" => Method::NewtonSchulz,
        "ns-satax" => Method::NsSatax,
        other => return Err(format!("unknown method '{other}'")),
    })
}

fn parse_on_off(value: &str, flag: &str) -> Result<bool, String> {
    match value {
        "on" => Ok(true),
        "off" => Ok(false),
        other => Err(format!("--{flag} takes on|off, got '{other}'")),
    }
}

fn analysis_cap(default: usize) -> usize {
    std::env::var("PINV_ANALYSIS_CAP")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(default)
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

fn output_writer(out: Option<&PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(io::stdout()),
    })
}

fn cmd_run(args: &RunArgs) -> Result<u8, Box<dyn std::error::Error>> {
    if args.explain_flops {
        println!("{}", pinv_core::flops::EXPLANATION);
        return Ok(0);
    }
    let method = parse_method(&args.method)?;
    let with_oracle = parse_on_off(&args.oracle, "oracle")?;
    let a = load_matrix(args.source.matrix.as_deref(), args.source.gen.as_deref(), args.seed)?;
    let oracle = if with_oracle {
        Some(pinv_exact(&a, DEFAULT_REL_TOL)?)
    } else {
        None
    };
    let mut cfg = SolverConfig::new(method, args.tau);
    cfg.seed = args.seed;
    cfg.max_iters = args.max_iters;
    cfg.tol_residual = args.tol;
    cfg.trace_every = args.trace_every;
    let clock = WallClock::new();
    let outcome = run(&a, &cfg, oracle.as_ref(), &clock)?;
    let mut w = output_writer(args.out.as_ref())?;
    trace::write_trace(&mut w, None, &outcome.trace, with_oracle)?;
    Ok(if outcome.converged { 0 } else { 2 })
}

fn build_distribution(
    spec: &str,
    ambient: usize,
) -> Result<DiscreteSketchDistribution, Box<dyn std::error::Error>> {
    if spec == "singletons" {
        return Ok(DiscreteSketchDistribution::singletons(ambient)?);
    }
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| format!("bad distribution spec '{spec}'"))?;
    let tau: usize = rest
        .strip_prefix("tau=")
        .ok_or_else(|| format!("bad distribution spec '{spec}'"))?
        .parse()
        .map_err(|_| format!("bad tau in '{spec}'"))?;
    Ok(match kind {
        "uniform" => DiscreteSketchDistribution::enumerate_subsets(ambient, tau)?,
        "rep" => DiscreteSketchDistribution::enumerate_multisets(ambient, tau)?,
        other => return Err(format!("unknown distribution kind '{other}'").into()),
    })
}

fn json_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn cmd_certify(args: &CertifyArgs) -> Result<u8, Box<dyn std::error::Error>> {
    let a = load_matrix(args.source.matrix.as_deref(), args.source.gen.as_deref(), args.seed)?;
    let report = match args.rate.as_str() {
        "satax" => {
            let cap = analysis_cap(DEFAULT_RATE_CAP);
            let dist = build_distribution(&args.dist, a.cols())?;
            let mut report = satax_rate_exact(&a, &dist, cap)?;
            // trace upper bound over the stacked sketches; tight only under
            // trace-proportional probabilities
            report.rho_bound = satax_rate_bound(&a, &dist.stack(a.cols())).ok();
            report
        }
        "saxas" => {
            let cap = analysis_cap(DEFAULT_KRON_CAP);
            let dist = build_distribution(&args.dist, a.rows())?;
            saxas_rate_bound(&a, &dist, cap)?
        }
        other => return Err(format!("--rate takes satax|saxas, got '{other}'").into()),
    };
    if args.json {
        let bound = report
            .rho_bound
            .map(|b| b.to_string())
            .unwrap_or_else(|| "null".into());
        println!(
            "{{\"rho_exact\":{},\"rho_bound\":{},\"certified\":{},\"spectrum_note\":\"{}\"}}",
            report.rho_exact,
            bound,
            report.certified,
            json_escape(&report.spectrum_note)
        );
    } else {
        println!("rho_exact: {}", report.rho_exact);
        match report.rho_bound {
            Some(b) => println!("rho_bound: {b}"),
            None => println!("rho_bound: n/a"),
        }
        println!("certified: {}", report.certified);
        println!("note: {}", report.spectrum_note);
    }
    Ok(0)
}

fn cmd_compare(args: &CompareArgs) -> Result<u8, Box<dyn std::error::Error>> {
    let methods: Vec<(String, Method)> = args
        .methods
        .split(',')
        .map(|name| parse_method(name.trim()).map(|m| (name.trim().to_string(), m)))
        .collect::<Result<_, _>>()?;
    if methods.is_empty() {
        return Err("--methods must list at least one method".into());
    }
    let with_oracle = parse_on_off(&args.oracle, "oracle")?;
    let a = load_matrix(args.source.matrix.as_deref(), args.source.gen.as_deref(), args.seed)?;
    let oracle = if with_oracle {
        Some(pinv_exact(&a, DEFAULT_REL_TOL)?)
    } else {
        None
    };
    let mut w = output_writer(args.out.as_ref())?;
    trace::write_header(&mut w, true, with_oracle)?;
    let mut all_converged = true;
    for (i, (name, method)) in methods.iter().enumerate() {
        let mut cfg = SolverConfig::new(*method, args.tau);
        cfg.seed = splitmix64(args.seed.wrapping_add(i as u64 + 1));
        cfg.max_iters = args.max_iters;
        cfg.tol_residual = args.tol;
        cfg.trace_every = args.trace_every;
        let clock = WallClock::new();
        let outcome = run(&a, &cfg, oracle.as_ref(), &clock)?;
        for row in &outcome.trace {
            trace::write_row(&mut w, Some(name), row, with_oracle)?;
        }
        all_converged &= outcome.converged;
    }
    Ok(if all_converged { 0 } else { 2 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Certify(args) => cmd_certify(args),
        Command::Compare(args) => cmd_compare(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
