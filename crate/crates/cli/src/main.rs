//! `maxkcut` command-line tool: solve, bench, check and oracle.
//!
//! Exit codes: 0 success, 1 input error or failed check, 2 internal error.

mod bench;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use maxkcut::{
    check_solution, exact_max_kcut_guarded, parse_instance, parse_solution, run_moh,
    DescentStrategy, EdgeSampling, Graph, SearchParams, SolutionFile,
};

#[derive(Parser)]
#[command(
    name = "maxkcut",
    version,
    about = "Max-k-cut local search, checker and exact oracle"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the search once on an instance.
    Solve(SolveArgs),
    /// Run seeded repetitions over a set of instances and report statistics.
    Bench(bench::BenchArgs),
    /// Recompute the objective of a solution file.
    Check(CheckArgs),
    /// Exact optimum by enumeration, for tiny graphs.
    Oracle(OracleArgs),
}

/// Search parameters shared by `solve` and `bench`.
#[derive(Args, Clone, Debug)]
pub struct SearchFlags {
    /// Maximum diversified moves per phase.
    #[arg(long, default_value_t = 500)]
    pub omega: u64,
    /// Non-improving rounds before perturbation.
    #[arg(long, default_value_t = 1000)]
    pub xi: u64,
    /// Probability of the tabu operator in the diversified phase.
    #[arg(long, default_value_t = 0.5)]
    pub rho: f64,
    /// Let the double-transfer diversification move ignore the tabu list.
    #[arg(long)]
    pub o4_unrestricted: bool,
    /// Perturbation strength as a fraction of n.
    #[arg(long, default_value_t = 0.1)]
    pub gamma: f64,
    /// Fraction of edges sampled by the double-transfer operator [default: 0.1 / max degree].
    #[arg(long, conflicts_with = "all_edges")]
    pub phi: Option<f64>,
    /// Scan every edge in the double-transfer operator.
    #[arg(long)]
    pub all_edges: bool,
    /// Tabu tenure bounds as MIN,MAX [default: 3,max(3,n/10)].
    #[arg(long, value_parser = parse_tenure)]
    pub tenure: Option<(u64, u64)>,
    /// Descent strategy: sequential, o1_only, union or random_mix.
    #[arg(long, default_value = "sequential", value_parser = parse_descent)]
    pub descent: DescentStrategy,
    /// Stop after this many applied transfers.
    #[arg(long)]
    pub max_iterations: Option<u64>,
}

impl SearchFlags {
    pub fn params(&self, k: usize, seed: u64, time_limit: Duration) -> SearchParams {
        SearchParams {
            k,
            omega: self.omega,
            xi: self.xi,
            rho: self.rho,
            o4_tabu: !self.o4_unrestricted,
            gamma_fraction: self.gamma,
            phi: match (self.all_edges, self.phi) {
                (true, _) => EdgeSampling::All,
                (false, Some(f)) => EdgeSampling::Fraction(f),
                (false, None) => EdgeSampling::InverseMaxDegree,
            },
            tenure: self.tenure,
            time_limit,
            max_iterations: self.max_iterations,
            target_objective: None,
            seed,
            descent: self.descent,
            record_trace: false,
        }
    }
}

fn parse_descent(s: &str) -> Result<DescentStrategy, String> {
    s.parse().map_err(|e: maxkcut::Error| e.to_string())
}

fn parse_tenure(s: &str) -> Result<(u64, u64), String> {
    let (a, b) = s.split_once(',').ok_or("expected MIN,MAX")?;
    let a = a
        .trim()
        .parse()
        .map_err(|_| format!("invalid tenure bound '{a}'"))?;
    let b = b
        .trim()
        .parse()
        .map_err(|_| format!("invalid tenure bound '{b}'"))?;
    Ok((a, b))
}

/// Time budget choice shared by `solve` and `bench`.
#[derive(Args, Clone, Debug)]
pub struct BudgetFlags {
    /// Wall-clock budget per run in seconds [default: 1800, 7200 or 14400 by n].
    #[arg(long, conflicts_with = "quick")]
    pub time_limit: Option<f64>,
    /// Use a 60 s budget.
    #[arg(long)]
    pub quick: bool,
}

impl BudgetFlags {
    pub fn budget(&self, n: usize) -> Result<Duration> {
        match (self.quick, self.time_limit) {
            (true, _) => Ok(Duration::from_secs(60)),
            (false, Some(t)) if t.is_finite() && t >= 0.0 => Ok(Duration::from_secs_f64(t)),
            (false, Some(t)) => Err(InputError(format!("invalid time limit {t}")).into()),
            (false, None) => Ok(Duration::from_secs(default_budget(n))),
        }
    }
}

/// Default seconds per run by graph order.
pub fn default_budget(n: usize) -> u64 {
    match n {
        0..5000 => 1800,
        5000..=10000 => 7200,
        _ => 14400,
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    budget: BudgetFlags,
    #[command(flatten)]
    search: SearchFlags,
    /// Stop as soon as this objective is reached.
    #[arg(long)]
    target: Option<i64>,
    /// Write the best solution as JSON.
    #[arg(long)]
    solution_out: Option<PathBuf>,
    /// Write improvements as CSV (elapsed_seconds,f_best).
    #[arg(long)]
    trace_out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    solution: PathBuf,
    /// Number of subsets; defaults to the value stored in the solution.
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Lift the n <= 16, k <= 4 guard.
    #[arg(long)]
    force: bool,
}

/// Bad input from the user, as opposed to a failure of the tool itself.
#[derive(Debug)]
pub struct InputError(pub String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

fn is_input_error(e: &anyhow::Error) -> bool {
    e.chain()
        .any(|c| c.is::<InputError>() || c.is::<maxkcut::Error>() || c.is::<std::io::Error>())
}

pub fn read_instance(path: &Path) -> Result<Graph> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_instance(&text).with_context(|| format!("invalid instance {}", path.display()))
}

pub fn instance_name(path: &Path) -> String {
    path.file_name().map_or_else(
        || path.display().to_string(),
        |s| s.to_string_lossy().into_owned(),
    )
}

fn solve(args: SolveArgs) -> Result<ExitCode> {
    let g = read_instance(&args.instance)?;
    let mut params = args
        .search
        .params(args.k, args.seed, args.budget.budget(g.n())?);
    params.target_objective = args.target;
    params.record_trace = args.trace_out.is_some();
    let result = run_moh(&g, &params)?;

    let name = instance_name(&args.instance);
    println!("instance {name}");
    println!("n {} m {} k {}", g.n(), g.m(), args.k);
    println!("f_best {}", result.f_best);
    println!("time_to_best {:.3}", result.time_to_best);
    println!("iterations_to_best {}", result.iterations_to_best);
    println!("iterations {}", result.total_iterations);
    println!(
        "rounds {} perturbations {}",
        result.rounds, result.perturbations
    );
    println!("elapsed {:.3}", result.elapsed);

    if let Some(path) = &args.solution_out {
        let file = SolutionFile::new(name, &g, &result.best_partition);
        fs::write(path, file.to_json())
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    if let Some(path) = &args.trace_out {
        let mut out = String::from("elapsed_seconds,f_best\n");
        for t in &result.trace {
            out.push_str(&format!("{:.6},{}\n", t.elapsed, t.f_best));
        }
        fs::write(path, out).with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn check(args: CheckArgs) -> Result<ExitCode> {
    let g = read_instance(&args.instance)?;
    let text = fs::read_to_string(&args.solution)
        .with_context(|| format!("cannot read {}", args.solution.display()))?;
    let sol = parse_solution(&text)?;
    let report = check_solution(&g, &sol, args.k)?;
    let mut out = std::io::stdout().lock();
    if report.passed() {
        writeln!(
            out,
            "PASS objective {} (k = {})",
            report.recomputed, report.k
        )?;
    } else {
        writeln!(
            out,
            "FAIL claimed {} recomputed {} (k = {})",
            report.claimed.unwrap_or_default(),
            report.recomputed,
            report.k
        )?;
    }
    for w in &report.warnings {
        writeln!(out, "warning: {w}")?;
    }
    Ok(if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn oracle(args: OracleArgs) -> Result<ExitCode> {
    let g = read_instance(&args.instance)?;
    let (max_n, max_k) = if args.force {
        (usize::MAX, usize::MAX)
    } else {
        (
            maxkcut::oracle::DEFAULT_MAX_N,
            maxkcut::oracle::DEFAULT_MAX_K,
        )
    };
    let sol = exact_max_kcut_guarded(&g, args.k, max_n, max_k)?;
    println!("optimum {}", sol.objective);
    let assign: Vec<String> = sol
        .partition
        .assignment()
        .iter()
        .map(|a| a.to_string())
        .collect();
    println!("assign {}", assign.join(" "));
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match cli.command {
        Command::Solve(a) => solve(a),
        Command::Bench(a) => bench::run(a),
        Command::Check(a) => check(a),
        Command::Oracle(a) => oracle(a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_input_error(&e) { 1 } else { 2 })
        }
    }
}
