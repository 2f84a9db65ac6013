use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use boundslab::cli::{self, CmdOutput, EXIT_ERROR};
use boundslab::search::Limits;
use boundslab::Notion;
use clap::{Parser, Subcommand};

/// Domain and bounds consistency checking, propagation and search over
/// finite integer domains.
#[derive(Parser)]
#[command(name = "boundslab", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check each constraint of a model against its declared domains.
    Check {
        /// Model file; standard input when omitted or `-`.
        file: Option<PathBuf>,
        /// Only check this constraint id.
        #[arg(long)]
        constraint: Option<String>,
        /// Override every constraint's notion.
        #[arg(long)]
        notion: Option<Notion>,
        #[arg(long)]
        json: bool,
    },
    /// Propagate all constraints to a common fixpoint.
    Propagate {
        file: Option<PathBuf>,
        #[arg(long)]
        notion: Option<Notion>,
        #[arg(long)]
        json: bool,
        /// Write one line per propagation event to this file.
        #[arg(long, value_name = "FILE")]
        trace: Option<PathBuf>,
    },
    /// Enumerate solutions.
    Solve {
        file: Option<PathBuf>,
        #[arg(long)]
        notion: Option<Notion>,
        /// Stop after this many solutions.
        #[arg(long)]
        limit: Option<u64>,
        /// Stop after visiting this many search nodes.
        #[arg(long)]
        node_limit: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Print the linear model deciding a subset-sum instance.
    ReduceSubsetsum {
        /// Positive item values.
        #[arg(required = true, num_args = 1.., allow_negative_numbers = true)]
        items: Vec<i64>,
        #[arg(long, allow_negative_numbers = true)]
        target: i64,
    },
    /// Solve a corpus under several notions and write CSV.
    Bench {
        /// Directory of `*.model` files; a seeded subset-sum family when omitted.
        dir: Option<PathBuf>,
        /// Notions to run (repeatable); all four by default.
        #[arg(long)]
        notion: Vec<Notion>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        node_limit: u64,
    },
    /// Report per-variable monotonicity of each constraint.
    AnalyzeMonotone {
        file: Option<PathBuf>,
        #[arg(long)]
        constraint: Option<String>,
        #[arg(long)]
        json: bool,
    },
}

fn read_input(file: &Option<PathBuf>) -> Result<String, String> {
    match file {
        Some(p) if p.as_os_str() != "-" => std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display())),
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| format!("stdin: {e}"))?;
            Ok(s)
        }
    }
}

fn run(cmd: Cmd) -> Result<(CmdOutput, Option<PathBuf>), String> {
    Ok(match cmd {
        Cmd::Check { file, constraint, notion, json } => {
            (cli::cmd_check(&read_input(&file)?, constraint.as_deref(), notion, json), None)
        }
        Cmd::Propagate { file, notion, json, trace } => {
            let out = cli::cmd_propagate(&read_input(&file)?, notion, json, trace.is_some());
            (out, trace)
        }
        Cmd::Solve { file, notion, limit, node_limit, json } => {
            let limits = Limits { max_solutions: limit, max_nodes: node_limit };
            (cli::cmd_solve(&read_input(&file)?, notion, limits, json), None)
        }
        Cmd::ReduceSubsetsum { items, target } => (cli::cmd_reduce_subsetsum(&items, target), None),
        Cmd::Bench { dir, notion, seed, node_limit } => {
            (cli::cmd_bench(dir.as_deref(), &notion, seed, node_limit), None)
        }
        Cmd::AnalyzeMonotone { file, constraint, json } => {
            (cli::cmd_analyze_monotone(&read_input(&file)?, constraint.as_deref(), json), None)
        }
    })
}

fn main() -> ExitCode {
    let args = match Cli::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR as u8 } else { 0 });
        }
    };
    let (out, trace_path) = match run(args.cmd) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_ERROR as u8);
        }
    };
    if let (Some(path), Some(text)) = (trace_path, &out.trace) {
        if let Err(e) = std::fs::write(&path, text) {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(EXIT_ERROR as u8);
        }
    }
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    ExitCode::from(out.code as u8)
}
