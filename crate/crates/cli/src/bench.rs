//! Seeded benchmark harness.
//!
//! Every cell (instance, k, strategy, rho) is solved `runs` times; run `r`
//! uses seed `seed + r`, so any single run can be repeated on its own with
//! `solve --seed`. Runs execute on up to `--jobs` threads and are reported
//! in a fixed order.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};
use maxkcut::{run_moh, DescentStrategy, Graph, SolutionFile};
use rayon::prelude::*;
use serde::Serialize;

use crate::{instance_name, read_instance, BudgetFlags, InputError, SearchFlags};

#[derive(Args)]
pub struct BenchArgs {
    /// Directory of instance files; every regular file is used unless --instances is given.
    #[arg(long)]
    dir: Option<PathBuf>,
    /// Comma-separated instance names (resolved inside --dir) or paths.
    #[arg(long, value_delimiter = ',')]
    instances: Vec<String>,
    /// Comma-separated subset counts.
    #[arg(long, value_delimiter = ',', default_value = "2")]
    k: Vec<usize>,
    /// Runs per cell [default: 20 for k = 2, 10 otherwise].
    #[arg(long)]
    runs: Option<u64>,
    /// Base seed; run r uses seed + r.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    budget: BudgetFlags,
    #[command(flatten)]
    search: SearchFlags,
    /// Vary one component: every descent strategy, or the rho values in --rho-values.
    #[arg(long, value_enum)]
    ablate: Option<Ablation>,
    #[arg(long, value_delimiter = ',', default_value = "0,0.5,1")]
    rho_values: Vec<f64>,
    /// Concurrent runs.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write every run's best solution as JSON into this directory.
    #[arg(long)]
    solutions_dir: Option<PathBuf>,
    /// Leave the timing column empty so repeated reports compare equal.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Ablation {
    Descent,
    Rho,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub instance: String,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub strategy: String,
    pub rho: f64,
    pub runs: u64,
    pub f_best: i64,
    pub f_avg: f64,
    pub std: f64,
    pub avg_time_to_best_seconds: Option<f64>,
}

pub const CSV_HEADER: &str =
    "instance,n,m,k,strategy,rho,runs,f_best,f_avg,std,avg_time_to_best_seconds";

struct Cell<'a> {
    name: String,
    graph: &'a Graph,
    k: usize,
    descent: DescentStrategy,
    rho: f64,
    runs: u64,
}

fn resolve_instances(args: &BenchArgs) -> Result<Vec<PathBuf>> {
    if args.instances.is_empty() {
        let dir = args
            .dir
            .as_ref()
            .ok_or_else(|| InputError("either --dir or --instances is required".into()))?;
        let mut files: Vec<PathBuf> = fs::read_dir(dir)
            .with_context(|| format!("cannot read directory {}", dir.display()))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file())
            .collect();
        files.sort();
        return Ok(files);
    }
    Ok(args
        .instances
        .iter()
        .map(|name| match &args.dir {
            Some(dir) => {
                let plain = dir.join(name);
                let txt = dir.join(format!("{name}.txt"));
                if !plain.is_file() && txt.is_file() {
                    txt
                } else {
                    plain
                }
            }
            None => PathBuf::from(name),
        })
        .collect())
}

fn variants(args: &BenchArgs) -> Vec<(DescentStrategy, f64)> {
    match args.ablate {
        None => vec![(args.search.descent, args.search.rho)],
        Some(Ablation::Descent) => DescentStrategy::ALL
            .iter()
            .map(|&d| (d, args.search.rho))
            .collect(),
        Some(Ablation::Rho) => args
            .rho_values
            .iter()
            .map(|&r| (args.search.descent, r))
            .collect(),
    }
}

/// Mean and population standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

pub fn run(args: BenchArgs) -> Result<ExitCode> {
    if args.jobs == 0 {
        return Err(InputError("--jobs must be at least 1".into()).into());
    }
    if args.runs == Some(0) {
        return Err(InputError("--runs must be at least 1".into()).into());
    }
    let mut failures = 0;
    let mut graphs = Vec::new();
    for path in resolve_instances(&args)? {
        match read_instance(&path) {
            Ok(g) => graphs.push((instance_name(&path), g)),
            Err(e) => {
                eprintln!("error: {e:#}");
                failures += 1;
            }
        }
    }

    let mut cells = Vec::new();
    for (name, g) in &graphs {
        for &k in &args.k {
            for (descent, rho) in variants(&args) {
                cells.push(Cell {
                    name: name.clone(),
                    graph: g,
                    k,
                    descent,
                    rho,
                    runs: args.runs.unwrap_or(if k == 2 { 20 } else { 10 }),
                });
            }
        }
    }
    if let Some(dir) = &args.solutions_dir {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }

    let jobs: Vec<(usize, u64)> = cells
        .iter()
        .enumerate()
        .flat_map(|(c, cell)| (0..cell.runs).map(move |r| (c, r)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .context("cannot start worker threads")?;
    let outcomes: Vec<Result<(i64, f64)>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(c, r)| run_one(&args, &cells[c], r))
            .collect()
    });

    let mut rows = Vec::new();
    let mut outcomes = outcomes.into_iter();
    for cell in &cells {
        let results: Vec<Result<(i64, f64)>> = outcomes.by_ref().take(cell.runs as usize).collect();
        let ok: Vec<(i64, f64)> = results
            .into_iter()
            .filter_map(|r| r.map_err(|e| eprintln!("error: {e:#}")).ok())
            .collect();
        if ok.len() as u64 != cell.runs {
            eprintln!(
                "error: {} k={} {} rho={}: {} of {} runs failed",
                cell.name,
                cell.k,
                cell.descent.name(),
                cell.rho,
                cell.runs - ok.len() as u64,
                cell.runs
            );
            failures += 1;
            continue;
        }
        let fs_: Vec<f64> = ok.iter().map(|&(f, _)| f as f64).collect();
        let times: Vec<f64> = ok.iter().map(|&(_, t)| t).collect();
        let (f_avg, std) = mean_std(&fs_);
        rows.push(Row {
            instance: cell.name.clone(),
            n: cell.graph.n(),
            m: cell.graph.m(),
            k: cell.k,
            strategy: cell.descent.name().to_string(),
            rho: cell.rho,
            runs: cell.runs,
            f_best: ok.iter().map(|&(f, _)| f).max().unwrap_or_default(),
            f_avg,
            std,
            avg_time_to_best_seconds: (!args.no_timing).then(|| mean_std(&times).0),
        });
    }

    let report = match args.format {
        Format::Csv => to_csv(&rows),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&rows).context("cannot serialize report")?;
            s.push('\n');
            s
        }
    };
    match &args.out {
        Some(path) => {
            fs::write(path, report).with_context(|| format!("cannot write {}", path.display()))?
        }
        None => print!("{report}"),
    }
    Ok(if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn run_one(args: &BenchArgs, cell: &Cell<'_>, r: u64) -> Result<(i64, f64)> {
    let seed = args.seed + r;
    let mut params = args
        .search
        .params(cell.k, seed, args.budget.budget(cell.graph.n())?);
    params.descent = cell.descent;
    params.rho = cell.rho;
    let result =
        run_moh(cell.graph, &params).with_context(|| format!("{} k={}", cell.name, cell.k))?;
    if let Some(dir) = &args.solutions_dir {
        let path = solution_path(dir, cell, seed);
        let file = SolutionFile::new(cell.name.clone(), cell.graph, &result.best_partition);
        fs::write(&path, file.to_json())
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok((result.f_best, result.time_to_best))
}

fn solution_path(dir: &Path, cell: &Cell<'_>, seed: u64) -> PathBuf {
    dir.join(format!(
        "{}_k{}_{}_rho{}_seed{}.json",
        cell.name,
        cell.k,
        cell.descent.name(),
        cell.rho,
        seed
    ))
}

pub fn to_csv(rows: &[Row]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        let time = r
            .avg_time_to_best_seconds
            .map(|t| format!("{t:.3}"))
            .unwrap_or_default();
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{:.2},{:.2},{}\n",
            r.instance, r.n, r.m, r.k, r.strategy, r.rho, r.runs, r.f_best, r.f_avg, r.std, time
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn population_std() {
        let (m, s) = mean_std(&[2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]);
        assert_eq!((m, s), (5.0, 2.0));
        assert_eq!(mean_std(&[3.0]), (3.0, 0.0));
    }

    #[test]
    fn csv_layout() {
        let row = Row {
            instance: "tri".into(),
            n: 3,
            m: 3,
            k: 2,
            strategy: "sequential".into(),
            rho: 0.5,
            runs: 2,
            f_best: 5,
            f_avg: 5.0,
            std: 0.0,
            avg_time_to_best_seconds: None,
        };
        assert_eq!(
            to_csv(&[row]),
            format!("{CSV_HEADER}\ntri,3,3,2,sequential,0.5,2,5,5.00,0.00,\n")
        );
    }

    #[test]
    fn budget_tiers() {
        assert_eq!(crate::default_budget(2000), 1800);
        assert_eq!(crate::default_budget(5000), 7200);
        assert_eq!(crate::default_budget(10000), 7200);
        assert_eq!(crate::default_budget(20000), 14400);
    }
}
