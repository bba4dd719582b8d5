mod commands;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use sigmarot::mapfile::parse_map;
use sigmarot::par::Execution;
use sigmarot::PAMap;

use commands::{Outcome, Settings};

/// Rotation sets and periodic points of degree-one maps on the lifted sigma graph.
///
/// Exit status: 0 when every reported quantity is exact, 2 when some part
/// is an estimate, 1 on error.
#[derive(Parser, Debug)]
#[command(name = "sigmarot", version)]
struct Cli {
    /// Rounds allowed for the reach of the line region to stabilize.
    #[arg(long, global = true, default_value_t = 64)]
    reach_cap: usize,
    /// Iterations per orbit (rho and sweep; sampled estimates in analyze).
    #[arg(long, global = true)]
    iters: Option<usize>,
    /// Largest denominator realized by periodic points in analyze.
    #[arg(long, global = true, default_value_t = 6)]
    max_den: i64,
    /// Print the machine-readable report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Run batch work on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Full pipeline: reach, partition, Markov graph, rotation set, periodic points.
    Analyze { map: PathBuf },
    /// Rotation number of one point, e.g. "B 0 1" or "L 1/3".
    Rho { map: PathBuf, point: String },
    /// Periodic (mod 1) point with rotation number p/q.
    Periodic { map: PathBuf, rho: String },
    /// Markov graph in Graphviz format.
    Graph {
        map: PathBuf,
        /// Write the DOT file here instead of standard output.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Rotation-number bounds over a grid of starting points.
    Sweep {
        map: PathBuf,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Compare the cycle-mean range with brute-force enumeration.
    Oracle {
        map: PathBuf,
        #[arg(long, default_value_t = 6)]
        max_cycle_len: usize,
    },
}

fn load(path: &Path) -> Result<PAMap> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_map(&text).with_context(|| format!("parsing {}", path.display()))
}

fn print(body: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(body.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn print_json(v: &serde_json::Value) -> Result<()> {
    print(&(serde_json::to_string_pretty(v)? + "\n"))
}

fn emit(out: &Outcome, json: bool) -> Result<ExitCode> {
    if json {
        print_json(&out.json)?;
    } else {
        print(&out.text)?;
    }
    Ok(if out.exact { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn write_or_print(path: Option<&Path>, body: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, body).with_context(|| format!("writing {}", p.display())),
        None => print(body),
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let settings = Settings {
        reach_cap: cli.reach_cap,
        iters: cli.iters,
        max_den: cli.max_den,
        exec: if cli.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        },
    };
    match cli.command {
        Command::Analyze { map } => emit(&commands::analyze_cmd(load(&map)?, &settings)?, cli.json),
        Command::Rho { map, point } => emit(&commands::rho_cmd(&load(&map)?, &point, &settings)?, cli.json),
        Command::Periodic { map, rho } => emit(&commands::periodic_cmd(load(&map)?, &rho, &settings)?, cli.json),
        Command::Graph { map, dot } => {
            let (text, json) = commands::graph_cmd(load(&map)?, &settings)?;
            if cli.json && dot.is_none() {
                print_json(&json)?;
            } else {
                write_or_print(dot.as_deref(), &text)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep { map, samples, csv } => {
            let (table, out) = commands::sweep_cmd(load(&map)?, samples, &settings)?;
            match csv {
                Some(p) => {
                    write_or_print(Some(&p), &table)?;
                    emit(&out, cli.json)
                }
                None if cli.json => emit(&out, true),
                None => {
                    print(&table)?;
                    eprint!("{}", out.text);
                    Ok(if out.exact { ExitCode::SUCCESS } else { ExitCode::from(2) })
                }
            }
        }
        Command::Oracle { map, max_cycle_len } => {
            emit(&commands::oracle_cmd(load(&map)?, max_cycle_len, &settings)?, cli.json)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
