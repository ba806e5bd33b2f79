//! Command-line driver for the steering augmented-Lagrangian solver.
//!
//! Four subcommands cover the benchmark workflow:
//!
//! * `solve` — run one registry problem under one variant and print a report;
//! * `bench` — run the registry under several variants, writing a records CSV
//!   and a JSON summary;
//! * `profile` — turn a records file into performance-profile curves;
//! * `report` — turn a records file into penalty histograms, per-variant
//!   aggregates, and optional pairwise comparison factors.
//!
//! Exit codes: 0 when a solve reached either convergence test, 2 on
//! iteration or time limits, 3 on errors, 64 on usage problems.

use std::fs::{self, File};
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use steer_al::solver::write_trace_csv;
use steer_al::{check, suite, Metric, SolveStatus, SolverConfig, VARIANT_NAMES};

#[derive(Parser)]
#[command(
    name = "steer-al",
    version,
    about = "Augmented Lagrangian solver with adaptive penalty steering"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one built-in problem and print the outcome.
    Solve(SolveArgs),
    /// Solve the registry under several variants and write records.
    Bench(BenchArgs),
    /// Build performance profiles from a records file.
    Profile(ProfileArgs),
    /// Summarize a records file: penalty histograms and per-variant totals.
    Report(ReportArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Registry problem name; `--list` prints the available names.
    #[arg(long)]
    problem: Option<String>,
    /// Print the registry problem names and exit.
    #[arg(long)]
    list: bool,
    /// Solver variant: balls, baltr, aalls, aaltr, aalls-safe, or aaltr-safe.
    /// Defaults to the config file's choice, or aalls without one.
    #[arg(long)]
    variant: Option<String>,
    /// TOML file with solver constants; command-line switches win over it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the per-iteration trace to this CSV file.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Comma-separated start point overriding the registry default.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x0: Option<Vec<f64>>,
    /// Verify the derivative callbacks at the start point before solving.
    #[arg(long)]
    check: bool,
    /// Seed for the randomized derivative checks.
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated variant names.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "balls,baltr,aalls,aaltr,aalls-safe,aaltr-safe"
    )]
    variants: Vec<String>,
    /// Restrict to these problems (comma-separated); default: whole registry.
    #[arg(long, value_delimiter = ',')]
    problems: Option<Vec<String>>,
    /// TOML file with solver constants shared by every run.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for records.csv and summary.json.
    #[arg(long, default_value = "bench-out")]
    out: PathBuf,
}

#[derive(Args)]
struct ProfileArgs {
    /// Records CSV produced by `bench`.
    #[arg(long)]
    records: PathBuf,
    /// Cost measure: iters, funcs, grads, or time.
    #[arg(long, default_value = "funcs")]
    metric: String,
    /// Restrict to these variants (comma-separated); default: all present.
    #[arg(long, value_delimiter = ',')]
    variants: Option<Vec<String>>,
    /// Output directory for profile_<variant>.csv files.
    #[arg(long, default_value = "bench-out")]
    out: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    /// Records CSV produced by `bench`.
    #[arg(long)]
    records: PathBuf,
    /// Also write pairwise outperforming factors for two variants `A,B`.
    #[arg(long, value_delimiter = ',')]
    pair: Option<Vec<String>>,
    /// Cost measure for `--pair`: iters, funcs, grads, or time.
    #[arg(long, default_value = "funcs")]
    metric: String,
    /// Output directory.
    #[arg(long, default_value = "bench-out")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Profile(args) => cmd_profile(args),
        Command::Report(args) => cmd_report(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(3)
        }
    }
}

/// Prints a usage-class complaint and returns the usage exit code.
fn usage_exit(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(64)
}

/// Exit code from the solve status: success, limit, or error class.
fn exit_for(status: SolveStatus) -> ExitCode {
    match status.flag() {
        "opt" | "inf" => ExitCode::SUCCESS,
        "itr" | "time" => ExitCode::from(2),
        _ => ExitCode::from(3),
    }
}

fn status_phrase(status: SolveStatus) -> &'static str {
    match status {
        SolveStatus::FirstOrderStationary => "first-order stationary",
        SolveStatus::InfeasibleStationary => "infeasible stationary",
        SolveStatus::IterationLimit => "iteration limit",
        SolveStatus::TimeLimit => "time limit",
        SolveStatus::EvaluationError => "evaluation error",
    }
}

fn load_config(path: Option<&Path>) -> anyhow::Result<SolverConfig> {
    match path {
        Some(p) => SolverConfig::from_file(p)
            .with_context(|| format!("cannot load config {}", p.display())),
        None => Ok(SolverConfig::default()),
    }
}

fn cmd_solve(args: SolveArgs) -> anyhow::Result<ExitCode> {
    if args.list {
        for name in suite::names() {
            println!("{name}");
        }
        return Ok(ExitCode::SUCCESS);
    }
    let Some(name) = args.problem.as_deref() else {
        return Ok(usage_exit("--problem is required (or use --list)"));
    };
    let problem = match suite::problem(name) {
        Ok(p) => p,
        Err(e) => return Ok(usage_exit(&e.to_string())),
    };
    let mut cfg = load_config(args.config.as_deref())?;
    if let Some(variant) = args.variant.as_deref() {
        if let Err(e) = cfg.apply_variant_name(variant) {
            return Ok(usage_exit(&e.to_string()));
        }
    }
    if args.trace.is_some() {
        cfg.trace = true;
    }
    let x0 = args.x0.clone().unwrap_or_else(|| problem.x0.clone());
    if x0.len() != problem.n {
        return Ok(usage_exit(&format!(
            "--x0 needs {} components for {name}, got {}",
            problem.n,
            x0.len()
        )));
    }

    if args.check {
        let rep = check::certify(&problem, &x0, &problem.y0, args.seed);
        println!(
            "derivative check: adjoint {:.2e}, hessian symmetry {:.2e}, gradient {:.2e}",
            rep.adjoint, rep.hessian_symmetry, rep.gradient
        );
        if !rep.passed() {
            anyhow::bail!("derivative checks failed at the start point");
        }
    }

    let report = steer_al::solve(&problem, &cfg, &x0, &problem.y0)?;
    println!("problem:     {name}");
    println!("variant:     {}", cfg.variant_name());
    println!(
        "status:      {} ({})",
        status_phrase(report.status),
        report.status.flag()
    );
    println!("iterations:  {}", report.iterations);
    println!("func evals:  {}", report.function_evals);
    println!("grad evals:  {}", report.gradient_evals);
    println!("mu final:    {:.3e}", report.mu_final);
    println!("f:           {:.10e}", report.f);
    println!("||c||_inf:   {:.3e}", report.c_inf);
    println!("||F_L||_inf: {:.3e}", report.fl_inf);
    println!("time:        {:.3} s", report.wall_time_s);
    if report.x.len() <= 10 {
        println!("x:           {:?}", report.x);
        println!("y:           {:?}", report.y_unscaled());
    }
    if let Some(msg) = &report.message {
        println!("note:        {msg}");
    }

    if let Some(path) = &args.trace {
        let rows = report.trace.as_deref().unwrap_or(&[]);
        let mut file = File::create(path)
            .with_context(|| format!("cannot create trace file {}", path.display()))?;
        write_trace_csv(rows, &mut file)?;
        println!("trace:       {} rows -> {}", rows.len(), path.display());
    }

    Ok(exit_for(report.status))
}

fn cmd_bench(args: BenchArgs) -> anyhow::Result<ExitCode> {
    let variants: Vec<&str> = args
        .variants
        .iter()
        .map(String::as_str)
        .filter(|v| !v.is_empty())
        .collect();
    if variants.is_empty() {
        return Ok(usage_exit("at least one variant is required"));
    }
    for v in &variants {
        if !VARIANT_NAMES.contains(v) {
            return Ok(usage_exit(&format!(
                "unknown variant `{v}` (expected one of {})",
                VARIANT_NAMES.join(", ")
            )));
        }
    }
    let mut sorted = variants.clone();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Ok(usage_exit("duplicate variant names"));
    }

    let cfg = load_config(args.config.as_deref())?;
    let problems = match &args.problems {
        None => suite::registry(),
        Some(names) => {
            let mut picked = Vec::with_capacity(names.len());
            for n in names {
                match suite::problem(n) {
                    Ok(p) => picked.push(p),
                    Err(e) => return Ok(usage_exit(&e.to_string())),
                }
            }
            picked
        }
    };

    fs::create_dir_all(&args.out)
        .with_context(|| format!("cannot create output directory {}", args.out.display()))?;
    let records = steer_al::run_suite(&problems, &variants, &cfg)?;

    let csv_path = args.out.join("records.csv");
    steer_al::write_records_csv(&records, File::create(&csv_path)?)?;
    let json_path = args.out.join("summary.json");
    steer_al::write_summary_json(&records, File::create(&json_path)?)?;

    for s in steer_al::summarize(&records) {
        println!(
            "{:<12} solved {:>2}/{:<2}  (opt {}, inf {}, itr {}, time {}, err {})",
            s.variant, s.solved, s.total, s.opt, s.inf, s.itr, s.time, s.err
        );
    }
    println!("records: {}", csv_path.display());
    println!("summary: {}", json_path.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_profile(args: ProfileArgs) -> anyhow::Result<ExitCode> {
    let metric = match Metric::parse(&args.metric) {
        Ok(m) => m,
        Err(e) => return Ok(usage_exit(&e.to_string())),
    };
    let file = File::open(&args.records)
        .with_context(|| format!("cannot open records file {}", args.records.display()))?;
    let records = steer_al::read_records_csv(file)?;
    let variants: Vec<String> = match args.variants {
        Some(v) => v,
        None => {
            let mut v: Vec<String> = records.iter().map(|r| r.variant.clone()).collect();
            v.sort();
            v.dedup();
            v
        }
    };
    if variants.is_empty() {
        return Ok(usage_exit("no variants found in the records file"));
    }
    let refs: Vec<&str> = variants.iter().map(String::as_str).collect();
    let profiles = steer_al::performance_profile(&records, &refs, metric)?;

    fs::create_dir_all(&args.out)?;
    for profile in &profiles {
        let path = args.out.join(format!("profile_{}.csv", profile.variant));
        let mut file = File::create(&path)?;
        steer_al::write_profile_csv(profile, &mut file)?;
        println!("{:<12} {} points -> {}", profile.variant, profile.points.len(), path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_report(args: ReportArgs) -> anyhow::Result<ExitCode> {
    let file = File::open(&args.records)
        .with_context(|| format!("cannot open records file {}", args.records.display()))?;
    let records = steer_al::read_records_csv(file)?;
    fs::create_dir_all(&args.out)?;

    let json_path = args.out.join("summary.json");
    steer_al::write_summary_json(&records, File::create(&json_path)?)?;
    println!("summary: {}", json_path.display());

    let mut variants: Vec<String> = records.iter().map(|r| r.variant.clone()).collect();
    variants.sort();
    variants.dedup();
    for v in &variants {
        let bins = steer_al::penalty_histogram(&records, v);
        let path = args.out.join(format!("penalty_{v}.csv"));
        let mut file = File::create(&path)?;
        writeln!(file, "bin,count")?;
        for (label, count) in steer_al::PENALTY_BIN_LABELS.iter().zip(bins) {
            writeln!(file, "\"{label}\",{count}")?;
        }
        println!("penalty histogram for {v}: {}", path.display());
    }

    if let Some(pair) = &args.pair {
        let [a, b] = pair.as_slice() else {
            return Ok(usage_exit("--pair needs exactly two variant names"));
        };
        let metric = match Metric::parse(&args.metric) {
            Ok(m) => m,
            Err(e) => return Ok(usage_exit(&e.to_string())),
        };
        let entries = steer_al::outperforming_factors(&records, a, b, metric)?;
        let path = args.out.join(format!("factors_{a}_vs_{b}.csv"));
        let mut file = File::create(&path)?;
        writeln!(file, "problem,factor,raw,a_solved,b_solved,degenerate")?;
        for e in &entries {
            writeln!(
                file,
                "{},{},{},{},{},{}",
                e.problem, e.factor, e.raw, e.a_solved, e.b_solved, e.degenerate
            )?;
        }
        println!("factors {a} vs {b}: {}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}
