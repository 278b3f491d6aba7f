//! Command-line front end: scenario documents in, result documents out.
//!
//! Exit codes: 0 for an affirmative verdict, 1 for a negative one, 2 for
//! usage, parse and input errors.

pub mod commands;
pub mod document;

use std::ffi::OsString;
use std::io::Read;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub use commands::CliError;
pub use document::{ResultDocument, ScenarioDocument, WitnessDocument};

pub const EXIT_AFFIRMATIVE: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "couplings",
    version,
    about = "Exact coupling analysis of two-party, two-setting spin scenarios"
)]
pub struct Cli {
    /// Scenario document to read; `-` or absent reads standard input.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Sample count (per command default when absent).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: Option<u64>,
    /// Tolerance for the arcsin and Tsirelson comparisons.
    #[arg(long, global = true, default_value_t = 1e-9, value_parser = parse_tolerance)]
    pub tolerance: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a scenario: no-signaling and the three inequality families.
    Check {
        /// Four correlations `e11,e12,e21,e22` instead of a document;
        /// rationalized with denominators up to 10^6.
        #[arg(long, allow_hyphen_values = true)]
        correlations: Option<String>,
        /// Families that decide the exit code (default: all).
        #[arg(long, value_enum, value_delimiter = ',')]
        family: Vec<FamilyArg>,
    },
    /// Decide whether a coupling with the given constraints exists.
    Couple {
        /// Require every connection to agree with probability 1.
        #[arg(long, conflicts_with_all = ["connections", "range"])]
        identity: bool,
        /// Exact targets `A1,A2,B1,B2` for the connection expectations.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "range")]
        connections: Option<String>,
        /// Attainable expectation range of one connection.
        #[arg(long, value_parser = ["A1", "A2", "B1", "B2"], ignore_case = true)]
        range: Option<String>,
    },
    /// Sampled fitting/forcing/equivalence test of a connection vector.
    Connections {
        /// Exact targets `A1,A2,B1,B2`; absent means no connection constraint.
        #[arg(long, allow_hyphen_values = true)]
        conn: Option<String>,
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, value_enum)]
        role: RoleArg,
    },
    /// Build a conditional coupling treating the context as a random variable.
    Conditionalize {
        /// Condition distribution `p11,p12,p21,p22` (default uniform).
        #[arg(long)]
        pi: Option<String>,
        #[arg(long, value_enum, default_value = "simple")]
        kind: KindArg,
    },
    /// Curated campaigns and worked examples.
    Demo {
        #[arg(value_enum)]
        name: DemoArg,
        /// Tree example: `Pr[X = c | C = a]`.
        #[arg(long, default_value = "1/3")]
        p: String,
        /// Tree example: `Pr[X = c | C = b]`.
        #[arg(long, default_value = "3/4")]
        q: String,
        /// Tree example: `Pr[C = a]`.
        #[arg(long, default_value = "1/2")]
        pi: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Bell,
    Quantum,
    Tsirelson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RoleArg {
    Fitting,
    Forcing,
    Equivalent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Simple,
    Even,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DemoArg {
    Fine,
    TsirelsonTight,
    Uninformative,
    Tree,
}

fn parse_tolerance(text: &str) -> Result<f64, String> {
    match text.parse::<f64>() {
        Ok(t) if t.is_finite() && t >= 0.0 => Ok(t),
        _ => Err(format!("`{text}` is not a finite non-negative number")),
    }
}

/// What a run printed and how it exits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Execution {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (program name first) and runs the command. Standard
/// input is only read when a command needs a document and `--input` is
/// absent or `-`.
pub fn run<I, T>(args: I, stdin: &mut dyn Read) -> Execution
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_ERROR
            } else {
                EXIT_AFFIRMATIVE
            };
            let text = e.render().to_string();
            return if code == EXIT_ERROR {
                Execution {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Execution {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    match commands::execute(&cli, stdin) {
        Ok(out) => Execution {
            code: out.code,
            stdout: out.document.to_json() + "\n",
            stderr: out.summary,
        },
        Err(e) => Execution {
            code: EXIT_ERROR,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}
