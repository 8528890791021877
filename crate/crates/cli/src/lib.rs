//! Argument parsing, dispatch and reporting for the `loopgr` binary.

mod commands;
pub mod report;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use report::{Report, Row, Status};

#[derive(Parser, Debug, Serialize)]
#[command(name = "loopgr", version, about = "Thom kernels, shuffle products and locality checks for quivers")]
pub struct Cli {
    /// Quiver spec file (JSON). Defaults to A1 with a single vertex `i`.
    #[arg(long, global = true)]
    pub quiver: Option<PathBuf>,
    /// additive | multiplicative | series:<file>
    #[arg(long, global = true, default_value = "additive")]
    pub fgl: String,
    /// Dilation torus basis, rows separated by `|`, e.g. `1|1`.
    #[arg(long, global = true)]
    pub dilation: Option<String>,
    /// Dilation point τ*, comma separated rationals.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub tau: Option<String>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Report `elapsed_ms` as 0 so that reports are byte-identical.
    #[arg(long, global = true)]
    pub no_timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Fgl,
    Biextension,
    Crosscheck,
    Locality,
    Ideal,
    Assoc,
    All,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Thom kernel of a flag type.
    Kernel {
        /// Flag type, e.g. `1,0|0,1`.
        #[arg(long)]
        flag: String,
        /// Also report the classical limit and its divisor.
        #[arg(long)]
        classical: bool,
    },
    /// Shuffle product along a word, or a weight-space dimension.
    Shuffle {
        /// Comma-separated vertex names.
        #[arg(long, conflicts_with = "dim")]
        word: Option<String>,
        #[arg(long)]
        dim: Option<String>,
        #[arg(long, default_value_t = 2)]
        degree: u32,
    },
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        which: Option<Suite>,
        #[arg(long, value_enum)]
        suite: Option<Suite>,
        /// Point configuration for the locality suite.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Enumerate the SL2 lattice model over F_p[ε]/(ε^e).
    Sl2Lattice {
        #[arg(long, default_value_t = 2)]
        p: u64,
        #[arg(long, default_value_t = 2)]
        e: usize,
        #[arg(long, default_value_t = 1)]
        n: u32,
        /// Laurent window; defaults to `n + e`.
        #[arg(long)]
        window: Option<u32>,
    },
    /// Poincaré polynomial of the total quiver Grassmannian.
    Poincare {
        #[arg(long)]
        alpha: String,
    },
    /// Fixed-point scheme of a regular nilpotent on Gr_k(n).
    Carell {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
    },
    /// Rank of the poset-induced bundle at a colored divisor.
    IndRank {
        /// `chain:m`, `antichain:k`, or relation JSON.
        #[arg(long)]
        poset: String,
        /// `a:i:2,b:j:1`.
        #[arg(long)]
        divisor: String,
    },
    /// Segre coordinates of a generic zastava fiber.
    ZastavaFiber {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        classical: bool,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Kernel { .. } => "kernel",
            Command::Shuffle { .. } => "shuffle",
            Command::Verify { .. } => "verify",
            Command::Sl2Lattice { .. } => "sl2-lattice",
            Command::Poincare { .. } => "poincare",
            Command::Carell { .. } => "carell",
            Command::IndRank { .. } => "ind-rank",
            Command::ZastavaFiber { .. } => "zastava-fiber",
        }
    }
}

/// Exit code plus captured output streams.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `argv` (including the program name) and runs the command.
/// Exit codes: 0 all checks pass, 1 a check failed, 2 invalid input.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let start = Instant::now();
    let echo = serde_json::to_value(&cli).unwrap_or_default();
    let name = cli.command.name().to_string();
    let result = commands::dispatch(&cli);
    let elapsed_ms = if cli.no_timing { 0 } else { start.elapsed().as_millis() as u64 };
    match result {
        Ok((results, primary)) => {
            let report = Report { command: name, config_echo: echo, results, elapsed_ms, primary };
            let code = if report.passed() { 0 } else { 1 };
            let stdout = match cli.format {
                Format::Json => report.to_json() + "\n",
                Format::Text => report.to_text(),
            };
            Outcome { code, stdout, stderr: String::new() }
        }
        Err(err) => {
            let message = format!("{:#}", err);
            let row = Row {
                name: "error".into(),
                status: Status::Error,
                value: message.clone().into(),
                expected: serde_json::Value::Null,
                provenance: "input".into(),
            };
            let report = Report { command: name, config_echo: echo, results: vec![row], elapsed_ms, primary: None };
            match cli.format {
                Format::Json => Outcome { code: 2, stdout: report.to_json() + "\n", stderr: String::new() },
                Format::Text => Outcome { code: 2, stdout: String::new(), stderr: format!("error: {}\n", message) },
            }
        }
    }
}
