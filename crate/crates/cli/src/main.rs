//! `pauli-ctx`: contextuality checks, witnesses, measures and graphs for
//! Hamiltonian term files.
//!
//! Exit codes: `check` and `witness` return 0 when every input is
//! noncontextual, 1 when some input is contextual and 2 on any error.
//! `measure` and `graph` return 0 on success and 2 on error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pauli_contextuality::io::{
    export_dot, parse_hamiltonian_file, run_check, run_measure, run_witness, HamiltonianFile,
    IoError, ReportDocument,
};
use pauli_contextuality::measures::{MeasureOptions, Method, PNorm, DEFAULT_EXACT_CAP};
use rayon::prelude::*;

#[derive(Parser)]
#[command(
    name = "pauli-ctx",
    version,
    about = "Strong contextuality of Pauli measurement sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide contextuality and report the witness quadruple or clique partition.
    Check(Common),
    /// Emit a determining tree for -I when the input is contextual.
    Witness(Common),
    /// Compute CD_0 and the requested CD_p distances.
    Measure {
        #[command(flatten)]
        common: Common,
        /// Comma-separated exponents: 0, values >= 1, or inf.
        #[arg(long = "p", value_delimiter = ',', default_value = "0,1,2,inf")]
        p: Vec<PNorm>,
        #[arg(long, default_value = "exact")]
        method: Method,
        /// Seed for greedy tie-breaking.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest term count the exact search accepts.
        #[arg(long, default_value_t = DEFAULT_EXACT_CAP)]
        exact_cap: usize,
        /// Number of greedy starts.
        #[arg(long, default_value_t = 16)]
        restarts: usize,
    },
    /// Write the compatibility graph in DOT format.
    Graph {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Write to this file instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    /// Hamiltonian files (`.ham`).
    #[arg(required = true)]
    files: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

const ERROR: u8 = 2;

fn load(path: &PathBuf) -> Result<HamiltonianFile, String> {
    parse_hamiltonian_file(path).map_err(|e: IoError| format!("{}: {e}", path.display()))
}

fn emit(text: &str, output: Option<&PathBuf>) -> Result<(), String> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Runs `f` on every file in parallel and prints the reports in input order.
fn run_reports<F>(common: &Common, verdict_exit: bool, f: F) -> u8
where
    F: Fn(&HamiltonianFile) -> Result<ReportDocument, IoError> + Sync,
{
    let results: Vec<Result<ReportDocument, String>> = common
        .files
        .par_iter()
        .map(|path| {
            let file = load(path)?;
            f(&file).map_err(|e| format!("{}: {e}", path.display()))
        })
        .collect();

    let mut code = 0;
    let mut docs = Vec::new();
    for r in results {
        match r {
            Ok(doc) => {
                if verdict_exit {
                    code = code.max(doc.exit_code() as u8);
                }
                docs.push(doc);
            }
            Err(e) => {
                eprintln!("error: {e}");
                code = ERROR;
            }
        }
    }

    let text = match common.format {
        Format::Json if common.files.len() == 1 => docs
            .first()
            .map(|d| to_json(serde_json::to_value(d).expect("reports serialize")))
            .unwrap_or_default(),
        Format::Json => to_json(serde_json::to_value(&docs).expect("reports serialize")),
        Format::Text => docs
            .iter()
            .map(ReportDocument::to_text)
            .collect::<Vec<_>>()
            .join("\n"),
    };
    if let Err(e) = emit(&text, common.output.as_ref()) {
        eprintln!("error: {e}");
        return ERROR;
    }
    code
}

fn to_json(value: serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(&value).expect("reports serialize");
    s.push('\n');
    s
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match &cli.command {
        Command::Check(common) => run_reports(common, true, |f| Ok(run_check(f))),
        Command::Witness(common) => run_reports(common, true, run_witness),
        Command::Measure {
            common,
            p,
            method,
            seed,
            exact_cap,
            restarts,
        } => {
            let opts = MeasureOptions {
                method: *method,
                exact_cap: *exact_cap,
                seed: *seed,
                restarts: *restarts,
            };
            run_reports(common, false, |f| run_measure(f, p, &opts))
        }
        Command::Graph { files, output } => {
            let graphs: Vec<Result<String, String>> = files
                .par_iter()
                .map(|p| load(p).map(|f| export_dot(&f)))
                .collect();
            let mut code = 0;
            let mut text = String::new();
            for g in graphs {
                match g {
                    Ok(dot) => text.push_str(&dot),
                    Err(e) => {
                        eprintln!("error: {e}");
                        code = ERROR;
                    }
                }
            }
            if let Err(e) = emit(&text, output.as_ref()) {
                eprintln!("error: {e}");
                code = ERROR;
            }
            code
        }
    };
    ExitCode::from(code)
}
