use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use goa_core::enumeration::{enumerate_trees, rows_to_csv, verify_theorem_with, VerifyOptions};
use goa_core::family::{
    decompose, random_trace, replay, ConstructionTrace, FTree, RecognitionResult,
};
use goa_core::graph::{parse_edge_list, Tree};
use goa_core::solver::{analyze, min_goa_bruteforce_capped, BRUTE_FORCE_CAP};
use serde::Serialize;
use sha2::{Digest, Sha256};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(
    name = "goa",
    version,
    about = "Minimum global offensive alliances in trees"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Minimum alliance size, a witness, and whether it is unique.
    Solve {
        /// Edge-list file, or `-` for stdin.
        path: String,
        /// Cross-check against exhaustive search up to this many vertices.
        #[arg(long, default_value_t = BRUTE_FORCE_CAP)]
        brute_force_cap: usize,
        #[arg(long)]
        json: bool,
    },
    /// Decide membership in the family and print a construction trace.
    Recognize {
        path: String,
        /// Write the trace, one record per line, to this file.
        #[arg(long)]
        trace_out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Build a random member, or replay a given trace.
    Generate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        ops: usize,
        /// Replay this trace (text, or JSON from `recognize --json`) instead.
        #[arg(long)]
        from_trace: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Print every tree of order `n` up to isomorphism.
    Enumerate { n: usize },
    /// Check uniqueness against recognition on every tree up to `max_n`.
    Verify {
        #[arg(long, default_value_t = 10)]
        max_n: usize,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Write the per-order table, with timings, to this file.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

/// Why a command did not succeed, mapped onto the exit code.
enum Failure {
    /// A computed check disagreed.
    Mismatch(String),
    /// Unreadable or invalid input.
    Input(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

type Outcome = Result<(), Failure>;

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    command: &'a str,
    input_digest: String,
    result: T,
    version: &'a str,
    schema_version: u32,
}

fn print_envelope<T: Serialize>(command: &str, input: &[u8], result: T) -> anyhow::Result<()> {
    let envelope = Envelope {
        command,
        input_digest: digest(input),
        result,
        version: env!("CARGO_PKG_VERSION"),
        schema_version: SCHEMA_VERSION,
    };
    let text = serde_json::to_string_pretty(&envelope)?;
    writeln!(io::stdout().lock(), "{text}").context("writing output")
}

fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn read_input(path: &str) -> anyhow::Result<String> {
    if path == "-" {
        let mut text = String::new();
        io::stdin()
            .read_to_string(&mut text)
            .context("reading stdin")?;
        Ok(text)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {path}"))
    }
}

fn read_tree(path: &str) -> anyhow::Result<(String, Tree)> {
    let text = read_input(path)?;
    let tree = parse_edge_list(&text).with_context(|| format!("parsing {path}"))?;
    Ok((text, tree))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve {
            path,
            brute_force_cap,
            json,
        } => solve(&path, brute_force_cap, json),
        Command::Recognize {
            path,
            trace_out,
            json,
        } => recognize(&path, trace_out.as_deref(), json),
        Command::Generate {
            seed,
            ops,
            from_trace,
            json,
        } => generate(seed, ops, from_trace.as_deref(), json),
        Command::Enumerate { n } => enumerate(n),
        Command::Verify { max_n, jobs, csv } => verify(max_n, jobs, csv.as_deref()),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Mismatch(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

#[derive(Serialize)]
struct SolveResult {
    n: usize,
    gamma: usize,
    unique: bool,
    witness: Vec<usize>,
    brute_force_checked: bool,
}

fn solve(path: &str, cap: usize, json: bool) -> Outcome {
    let (text, tree) = read_tree(path)?;
    let report = analyze(&tree);
    let checked = tree.n() <= cap.min(63);
    if checked {
        let brute = min_goa_bruteforce_capped(&tree, cap).map_err(|e| anyhow!(e))?;
        let unique = brute.all_min_sets.len() == 1;
        if brute.gamma != report.gamma || unique != report.unique {
            return Err(Failure::Mismatch(format!(
                "solver disagrees with exhaustive search: dp gamma={} unique={}, brute gamma={} unique={}\n{}",
                report.gamma,
                report.unique,
                brute.gamma,
                unique,
                tree.to_edge_list()
            )));
        }
    }
    if json {
        let result = SolveResult {
            n: tree.n(),
            gamma: report.gamma,
            unique: report.unique,
            witness: report.witness.to_vec(),
            brute_force_checked: checked,
        };
        print_envelope("solve", text.as_bytes(), result)?;
    } else {
        let key = if report.unique { "set" } else { "witness" };
        println!(
            "gamma={} unique={} {key}={}",
            report.gamma, report.unique, report.witness
        );
    }
    Ok(())
}

#[derive(Serialize)]
#[serde(tag = "status")]
enum RecognizeResult {
    #[serde(rename = "K1")]
    K1,
    #[serde(rename = "IN_FAMILY")]
    InFamily {
        trace: ConstructionTrace,
        trace_text: String,
        a_set: Vec<usize>,
        embedding: Vec<usize>,
    },
    #[serde(rename = "NOT_IN_FAMILY")]
    NotInFamily { reason: String },
}

fn recognize(path: &str, trace_out: Option<&Path>, json: bool) -> Outcome {
    let (text, tree) = read_tree(path)?;
    let result = match decompose(&tree) {
        RecognitionResult::TrivialK1 => RecognizeResult::K1,
        RecognitionResult::Certificate(c) => RecognizeResult::InFamily {
            trace_text: c.trace.to_inline(),
            trace: c.trace,
            a_set: c.a_set.to_vec(),
            embedding: c.embedding,
        },
        RecognitionResult::NotInFamily(reason) => RecognizeResult::NotInFamily {
            reason: reason.to_string(),
        },
    };
    if let (Some(out), RecognizeResult::InFamily { trace, .. }) = (trace_out, &result) {
        fs::write(out, trace.to_string()).with_context(|| format!("writing {}", out.display()))?;
    }
    if json {
        print_envelope("recognize", text.as_bytes(), result)?;
        return Ok(());
    }
    match result {
        RecognizeResult::K1 => println!("K1"),
        RecognizeResult::InFamily {
            trace_text, a_set, ..
        } => {
            let a_set: Vec<String> = a_set.iter().map(usize::to_string).collect();
            println!("IN_FAMILY a_set={{{}}} trace={trace_text}", a_set.join(","));
        }
        RecognizeResult::NotInFamily { reason } => println!("NOT_IN_FAMILY {reason}"),
    }
    Ok(())
}

/// Accepts the text form, a bare JSON trace, or a `recognize --json`
/// envelope.
fn parse_trace(text: &str) -> anyhow::Result<ConstructionTrace> {
    if !text.trim_start().starts_with('{') {
        return Ok(text.parse()?);
    }
    let value: serde_json::Value = serde_json::from_str(text)?;
    let trace = match value.get("result").and_then(|r| r.get("trace")) {
        Some(inner) => inner.clone(),
        None => value,
    };
    Ok(serde_json::from_value(trace)?)
}

#[derive(Serialize)]
struct GenerateResult<'a> {
    tree: &'a Tree,
    a_set: Vec<usize>,
    trace: &'a ConstructionTrace,
    trace_text: String,
}

fn generate(seed: u64, ops: usize, from_trace: Option<&Path>, json: bool) -> Outcome {
    let (input, member): (Vec<u8>, FTree) = match from_trace {
        Some(path) => {
            let text = read_input(&path.to_string_lossy())?;
            let trace =
                parse_trace(&text).with_context(|| format!("parsing trace {}", path.display()))?;
            let member = replay(&trace).map_err(|e| anyhow!(e))?;
            (text.into_bytes(), member)
        }
        None => (
            format!("seed={seed} ops={ops}").into_bytes(),
            random_trace(seed, ops),
        ),
    };
    if json {
        let result = GenerateResult {
            tree: member.tree(),
            a_set: member.a_set().to_vec(),
            trace: member.trace(),
            trace_text: member.trace().to_inline(),
        };
        print_envelope("generate", &input, result)?;
    } else {
        print!(
            "# a_set={}\n# trace: {}\n{}",
            member.a_set(),
            member.trace().to_inline(),
            member.tree().to_edge_list()
        );
    }
    Ok(())
}

fn enumerate(n: usize) -> Outcome {
    let trees = enumerate_trees(n).map_err(|e| anyhow!(e))?;
    let mut out = io::BufWriter::new(io::stdout().lock());
    for (i, tree) in trees.enumerate() {
        let written =
            writeln!(out, "# tree {i}").and_then(|_| write!(out, "{}", tree.to_edge_list()));
        written.context("writing output")?;
    }
    out.flush().context("writing output")?;
    Ok(())
}

/// Stdout carries only timing-free summaries so that runs with different
/// worker counts print the same bytes; timings go to the CSV file.
fn verify(max_n: usize, jobs: usize, csv: Option<&Path>) -> Outcome {
    let options = VerifyOptions {
        max_n,
        jobs,
        fail_fast: true,
    };
    let outcome = verify_theorem_with(options).map_err(|e| anyhow!(e))?;
    for row in &outcome.rows {
        println!("{}", row.summary());
    }
    if let Some(path) = csv {
        fs::write(path, rows_to_csv(&outcome.rows))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    match outcome.failures.first() {
        None => {
            println!("status=ok");
            Ok(())
        }
        Some(failure) => {
            println!("status=mismatch");
            Err(Failure::Mismatch(failure.to_string()))
        }
    }
}
