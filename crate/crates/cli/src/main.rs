//! `pathwise`: batch front end for fBm sampling, pathwise integrals, mild
//! solutions, certification suites and convergence studies.
//!
//! Exit codes: 0 all assertions pass, 1 validation error, 2 certification
//! failure, 3 numerical failure.

mod certify;
mod commands;
mod config;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pathwise::io::Format;

use config::FileConfig;

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Failed(String),
    Lib(pathwise::Error),
    Io(io::Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) | CliError::Io(_) => 1,
            CliError::Failed(_) => 2,
            CliError::Lib(e) => e.exit_code() as u8,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "invalid input: {m}"),
            CliError::Failed(m) => write!(f, "check failed: {m}"),
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<pathwise::Error> for CliError {
    fn from(e: pathwise::Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "pathwise", version, about = "Pathwise fBm integrals and mild solutions")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Output table format.
    #[arg(long, global = true)]
    format: Option<Format>,
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file (stdout when absent).
    #[arg(short = 'o', long, global = true)]
    out: Option<PathBuf>,
    /// Suppress summaries on stderr.
    #[arg(short, long, global = true)]
    quiet: bool,
    /// Flat `key = value` file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample an fBm path.
    Fbm(commands::FbmArgs),
    /// Zähle integral of an integrand against a path, or a defect check.
    Integrate(commands::IntegrateArgs),
    /// Solve a mild equation by Picard iteration.
    Solve(commands::SolveArgs),
    /// Run the certification suite.
    Certify(certify::CertifyArgs),
    /// Error against an oracle over a sequence of grids.
    Converge(commands::ConvergeArgs),
}

/// Resolved global settings handed to every command.
pub struct Ctx {
    pub file: FileConfig,
    pub format: Format,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub quiet: bool,
}

impl Ctx {
    pub fn sep(&self) -> char {
        self.format.sep()
    }

    pub fn writer(&self) -> CliResult<Box<dyn Write>> {
        Ok(match &self.out {
            Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| {
                CliError::Validation(format!("cannot create {}: {e}", p.display()))
            })?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }

    pub fn note(&self, msg: &str) {
        if !self.quiet {
            eprintln!("{msg}");
        }
    }
}

/// Parse an enum value from a config string with clap's own names.
pub fn parse_enum<T: ValueEnum>(s: &str, key: &str) -> CliResult<T> {
    T::from_str(s, true).map_err(|_| CliError::Validation(format!("unknown value '{s}' for '{key}'")))
}

fn run(cli: Cli) -> CliResult<()> {
    let file = match &cli.global.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let format = match cli.global.format {
        Some(f) => f,
        None => match file.raw("format") {
            Some(s) => s.parse().map_err(CliError::Validation)?,
            None => Format::Csv,
        },
    };
    let seed = file.pick(cli.global.seed, "seed", 0u64)?;
    let out = file.pick_opt(cli.global.out, "out")?;
    let quiet = cli.global.quiet || file.raw("quiet") == Some("true");
    let ctx = Ctx {
        file,
        format,
        seed,
        out,
        quiet,
    };
    match cli.command {
        Command::Fbm(a) => commands::fbm(&ctx, a),
        Command::Integrate(a) => commands::integrate(&ctx, a),
        Command::Solve(a) => commands::solve(&ctx, a),
        Command::Certify(a) => certify::run(&ctx, a),
        Command::Converge(a) => commands::converge(&ctx, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
