use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use orbitmln_cli::{
    run_bench, run_describe, run_infer, run_validate, AppError, BenchConfig, EnginePref, Format,
    InferConfig, Mode, ValidateConfig,
};

/// Lifted marginal and MPE inference for Markov logic networks, with an
/// exhaustive oracle for exact verification.
#[derive(Parser)]
#[command(name = "orbitmln", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Answer a marginal or MPE query.
    Infer(InferArgs),
    /// Compare the lifted engine against the exhaustive oracle on a seeded
    /// random query battery.
    Validate(ValidateArgs),
    /// Sweep domain sizes, reporting statistics visited and wall time (CSV).
    Bench(BenchArgs),
    /// Report the model's fragment, decomposition, and statistic-space size.
    Describe(DescribeArgs),
}

#[derive(Args)]
struct InferArgs {
    /// Model file.
    #[arg(long)]
    model: PathBuf,
    /// Evidence file (`Atom = 0|1` per line).
    #[arg(long)]
    evidence: Option<PathBuf>,
    /// Query atoms, e.g. "Smokes(A)=1,Friends(A,B)=0". In marginal mode the
    /// result is P(query | evidence); in MPE mode the query joins the evidence.
    #[arg(long)]
    query: Option<String>,
    #[arg(long, value_enum, default_value = "marginal")]
    mode: Mode,
    #[arg(long, value_enum, default_value = "auto")]
    engine: EnginePref,
    /// Most constants a query's off-diagonal binary atoms may span.
    #[arg(long = "k-bound", default_value_t = 2)]
    k_bound: usize,
    /// Disable pair-sum memoization (pure optimization; results unchanged).
    #[arg(long = "no-memo")]
    no_memo: bool,
    /// Worker threads for the statistic sweep.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Most ground atoms the exhaustive oracle will enumerate (2^n worlds).
    #[arg(long = "oracle-cap", default_value_t = 25)]
    oracle_cap: u32,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Number of random conditional queries to check.
    #[arg(long, default_value_t = 200)]
    trials: u32,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long = "k-bound", default_value_t = 2)]
    k_bound: usize,
    #[arg(long = "no-memo")]
    no_memo: bool,
    #[arg(long = "oracle-cap", default_value_t = 25)]
    oracle_cap: u32,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    model: PathBuf,
    /// Comma-separated domain sizes, e.g. "25,50,100,200".
    #[arg(long = "k-list", default_value = "25,50,100,200", value_parser = parse_k_list)]
    k_list: std::vec::Vec<u16>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long = "no-memo")]
    no_memo: bool,
    #[arg(long = "oracle-cap", default_value_t = 25)]
    oracle_cap: u32,
}

#[derive(Args)]
struct DescribeArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[arg(long = "oracle-cap", default_value_t = 25)]
    oracle_cap: u32,
}

fn parse_k_list(s: &str) -> Result<Vec<u16>, String> {
    s.split(',')
        .map(|p| p.trim().parse::<u16>().map_err(|e| format!("bad domain size `{p}`: {e}")))
        .collect()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result: Result<(String, i32), AppError> = match cli.cmd {
        Cmd::Infer(a) => {
            let cfg = InferConfig {
                model: a.model,
                evidence: a.evidence,
                query: a.query,
                mode: a.mode,
                engine: a.engine,
                k_bound: a.k_bound,
                memo: !a.no_memo,
                jobs: a.jobs,
                format: a.format,
                oracle_cap: a.oracle_cap,
            };
            run_infer(&cfg).map(|report| (report.render(cfg.format), 0))
        }
        Cmd::Validate(a) => {
            let cfg = ValidateConfig {
                model: a.model,
                seed: a.seed,
                trials: a.trials,
                jobs: a.jobs,
                k_bound: a.k_bound,
                memo: !a.no_memo,
                oracle_cap: a.oracle_cap,
                format: a.format,
            };
            run_validate(&cfg, 0.0).map(|out| (out.report, if out.ok { 0 } else { 1 }))
        }
        Cmd::Bench(a) => {
            let cfg = BenchConfig {
                model: a.model,
                k_list: a.k_list,
                jobs: a.jobs,
                memo: !a.no_memo,
                oracle_cap: a.oracle_cap,
            };
            run_bench(&cfg).map(|(_, csv)| (csv, 0))
        }
        Cmd::Describe(a) => {
            run_describe(&a.model, a.oracle_cap, a.format).map(|report| (report, 0))
        }
    };
    match result {
        Ok((output, code)) => {
            print!("{output}");
            ExitCode::from(code as u8)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.code as u8)
        }
    }
}
