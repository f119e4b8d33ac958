//! Command-line front end.
//!
//! ```text
//! tdcover solve <hamcycle|hampath|longcycle|longpath|mincyclecover|pcc>
//!     --graph FILE [--forest FILE] [-k INT] [-l INT]
//!     [--seed U64] [--repeat INT] [--stats FILE]
//! tdcover forest --graph FILE
//! tdcover oracle <pcc|cw|mw> --graph FILE ...
//! ```
//!
//! `solve` prints exactly `YES` or `NO` and exits 0 on a successful decision
//! (either answer); input and validation problems exit 2. With `--stats FILE`
//! a JSON object is written whose call counts come from the heaviest counting
//! run (every individual run obeys the `2 n 5^d` bound; `elapsed_ms` is the
//! whole invocation's wall time and is the one field that varies between
//! identical invocations).

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::counter::call_bound;
use crate::driver::{self, ProblemKind, RunStats, SolveConfig, WeightFn};
use crate::graph::Graph;
use crate::oracle;
use crate::treedepth::EliminationForest;

#[derive(Parser)]
#[command(
    name = "tdcover",
    version,
    about = "Cycle and path problems on graphs with shallow elimination forests"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide a problem (randomized; YES answers are always correct).
    Solve {
        #[command(subcommand)]
        problem: Problem,
    },
    /// Emit a DFS elimination forest for a graph.
    Forest {
        #[arg(long, value_name = "FILE")]
        graph: PathBuf,
    },
    /// Brute-force cross-checks; desk-scale instances only.
    Oracle {
        #[command(subcommand)]
        check: OracleCheck,
    },
}

#[derive(Subcommand)]
enum Problem {
    /// Is there a cycle through every vertex?
    Hamcycle(SolveArgs),
    /// Is there a path through every vertex?
    Hampath(SolveArgs),
    /// Is there a cycle on exactly -l vertices?
    Longcycle(SolveArgs),
    /// Is there a path on exactly -l vertices?
    Longpath(SolveArgs),
    /// Can at most -k disjoint cycles cover all vertices?
    Mincyclecover(SolveArgs),
    /// Can at most -k disjoint cycles cover exactly -l vertices?
    Pcc(SolveArgs),
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, value_name = "FILE")]
    graph: PathBuf,
    /// Elimination forest file; a DFS forest is built when omitted.
    #[arg(long, value_name = "FILE")]
    forest: Option<PathBuf>,
    /// Cycle budget.
    #[arg(short = 'k', long = "k", value_name = "INT")]
    budget: Option<usize>,
    /// Target vertex count.
    #[arg(short = 'l', long = "l", value_name = "INT")]
    target: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Repetitions; the false-negative probability is at most 2^-repeat.
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u32).range(1..))]
    repeat: u32,
    /// Write a JSON run report to this file.
    #[arg(long, value_name = "FILE")]
    stats: Option<PathBuf>,
}

#[derive(Subcommand)]
enum OracleCheck {
    /// Exact partial-cycle-cover decision by enumeration.
    Pcc {
        #[arg(long, value_name = "FILE")]
        graph: PathBuf,
        #[arg(short = 'k', long = "k", value_name = "INT")]
        budget: usize,
        #[arg(short = 'l', long = "l", value_name = "INT")]
        target: usize,
    },
    /// Count (cycle family, consistent cut) pairs at weight -w with -l
    /// covered vertices. Weights default to 1 per edge.
    Cw {
        #[arg(long, value_name = "FILE")]
        graph: PathBuf,
        #[arg(short = 'w', long = "w", value_name = "INT")]
        weight: u64,
        #[arg(short = 'l', long = "l", value_name = "INT")]
        target: usize,
        #[arg(long, value_name = "FILE")]
        weights: Option<PathBuf>,
    },
    /// Count (simple perfect matching, consistent cut) pairs of the doubled
    /// graph at weight -w with -l base edges. Weights default to 1 per edge.
    Mw {
        #[arg(long, value_name = "FILE")]
        graph: PathBuf,
        #[arg(short = 'w', long = "w", value_name = "INT")]
        weight: u64,
        #[arg(short = 'l', long = "l", value_name = "INT")]
        target: usize,
        #[arg(long, value_name = "FILE")]
        weights: Option<PathBuf>,
    },
}

/// Stats report; field order is the serialized key order.
#[derive(Serialize)]
struct RunReport {
    answer: String,
    seed: u64,
    repetitions: u32,
    depth: usize,
    exclusive_calls: u64,
    inclusive_calls: u64,
    bound: u64,
    elapsed_ms: u64,
    peak_polys: u32,
}

/// Parses `argv` (program name included) and runs; returns the exit status.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(msg) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

fn read_file(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn load_graph(path: &Path) -> Result<Graph, String> {
    let text = read_file(path)?;
    Graph::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_forest(g: &Graph, path: &Path) -> Result<EliminationForest, String> {
    let text = read_file(path)?;
    let parents = EliminationForest::parse_parents(&text)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    EliminationForest::from_parents(g, &parents).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_weights(g: &Graph, path: Option<&PathBuf>) -> Result<WeightFn, String> {
    match path {
        None => WeightFn::constant(g, 1).map_err(|e| e.to_string()),
        Some(p) => {
            let text = read_file(p)?;
            let values: Result<Vec<u64>, _> =
                text.split_ascii_whitespace().map(str::parse).collect();
            let values = values.map_err(|e| format!("{}: bad weight: {e}", p.display()))?;
            if values.len() != g.edge_count() {
                return Err(format!(
                    "{}: expected {} weights, found {}",
                    p.display(),
                    g.edge_count(),
                    values.len()
                ));
            }
            let limit = values.iter().copied().max().unwrap_or(1).max(2 * g.edge_count() as u64);
            WeightFn::from_values(values, limit).map_err(|e| e.to_string())
        }
    }
}

fn problem_kind(problem: &Problem) -> Result<ProblemKind, String> {
    let check = |args: &SolveArgs, name: &str, takes_k: bool, takes_l: bool| -> Result<(), String> {
        if args.budget.is_some() && !takes_k {
            return Err(format!("{name} does not take -k"));
        }
        if args.target.is_some() && !takes_l {
            return Err(format!("{name} does not take -l"));
        }
        Ok(())
    };
    match problem {
        Problem::Hamcycle(a) => {
            check(a, "hamcycle", false, false)?;
            Ok(ProblemKind::HamiltonianCycle)
        }
        Problem::Hampath(a) => {
            check(a, "hampath", false, false)?;
            Ok(ProblemKind::HamiltonianPath)
        }
        Problem::Longcycle(a) => {
            check(a, "longcycle", false, true)?;
            let target = a.target.ok_or("longcycle requires -l")?;
            Ok(ProblemKind::LongCycle { target })
        }
        Problem::Longpath(a) => {
            check(a, "longpath", false, true)?;
            let target = a.target.ok_or("longpath requires -l")?;
            Ok(ProblemKind::LongPath { target })
        }
        Problem::Mincyclecover(a) => {
            check(a, "mincyclecover", true, false)?;
            let budget = a.budget.ok_or("mincyclecover requires -k")?;
            Ok(ProblemKind::MinCycleCover { budget })
        }
        Problem::Pcc(a) => {
            let budget = a.budget.ok_or("pcc requires -k")?;
            let target = a.target.ok_or("pcc requires -l")?;
            Ok(ProblemKind::PartialCycleCover { budget, target })
        }
    }
}

fn heaviest_run(runs: &[RunStats]) -> Option<&RunStats> {
    runs.iter()
        .max_by_key(|r| r.exclusive_calls + r.inclusive_calls)
}

fn dispatch(cli: Cli) -> Result<(), String> {
    match cli.cmd {
        Cmd::Solve { problem } => {
            let started = Instant::now();
            let kind = problem_kind(&problem)?;
            let args = match &problem {
                Problem::Hamcycle(a)
                | Problem::Hampath(a)
                | Problem::Longcycle(a)
                | Problem::Longpath(a)
                | Problem::Mincyclecover(a)
                | Problem::Pcc(a) => a,
            };
            let g = load_graph(&args.graph)?;
            let forest = match &args.forest {
                Some(path) => load_forest(&g, path)?,
                None => {
                    let t = EliminationForest::dfs_forest(&g);
                    eprintln!("no forest supplied; using a DFS elimination forest of depth {}", t.depth());
                    t
                }
            };
            let config = SolveConfig {
                seed: args.seed,
                repetitions: args.repeat,
                stats: true,
            };
            let (answer, runs) =
                driver::solve_with_stats(kind, &g, Some(&forest), config).map_err(|e| e.to_string())?;
            println!("{}", if answer { "YES" } else { "NO" });
            if let Some(stats_path) = &args.stats {
                let elapsed_ms = started.elapsed().as_millis() as u64;
                let report = match heaviest_run(&runs) {
                    Some(r) => RunReport {
                        answer: if answer { "YES" } else { "NO" }.to_string(),
                        seed: args.seed,
                        repetitions: args.repeat,
                        depth: r.depth,
                        exclusive_calls: r.exclusive_calls,
                        inclusive_calls: r.inclusive_calls,
                        bound: r.call_bound,
                        elapsed_ms,
                        peak_polys: runs.iter().map(|r| r.peak_polys).max().unwrap_or(0),
                    },
                    None => RunReport {
                        answer: if answer { "YES" } else { "NO" }.to_string(),
                        seed: args.seed,
                        repetitions: args.repeat,
                        depth: forest.depth(),
                        exclusive_calls: 0,
                        inclusive_calls: 0,
                        bound: call_bound(g.vertex_count(), forest.depth()),
                        elapsed_ms,
                        peak_polys: 0,
                    },
                };
                let json = serde_json::to_string(&report).expect("report serializes");
                fs::write(stats_path, json + "\n")
                    .map_err(|e| format!("cannot write {}: {e}", stats_path.display()))?;
            }
            Ok(())
        }
        Cmd::Forest { graph } => {
            let g = load_graph(&graph)?;
            let t = EliminationForest::dfs_forest(&g);
            print!("{}", t.parents_to_text());
            Ok(())
        }
        Cmd::Oracle { check } => match check {
            OracleCheck::Pcc { graph, budget, target } => {
                let g = load_graph(&graph)?;
                let answer = oracle::brute_pcc(&g, budget, target).map_err(|e| e.to_string())?;
                println!("{}", if answer { "YES" } else { "NO" });
                Ok(())
            }
            OracleCheck::Cw { graph, weight, target, weights } => {
                let g = load_graph(&graph)?;
                let w = load_weights(&g, weights.as_ref())?;
                let count = oracle::brute_count_cw(&g, w.values(), weight, target)
                    .map_err(|e| e.to_string())?;
                println!("{count}");
                Ok(())
            }
            OracleCheck::Mw { graph, weight, target, weights } => {
                let g = load_graph(&graph)?;
                let w = load_weights(&g, weights.as_ref())?;
                let count = oracle::brute_count_mw(&g, w.values(), weight, target)
                    .map_err(|e| e.to_string())?;
                println!("{count}");
                Ok(())
            }
        },
    }
}
