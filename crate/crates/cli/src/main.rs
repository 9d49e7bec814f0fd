//! riscode: design and verify orthogonal RIS phase codes, simulate pilot
//! despreading, and run the localization experiment.

mod commands;
mod config;
mod manifest;

use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

pub const EXIT_INVALID_INPUT: u8 = 2;
pub const EXIT_UNSUPPORTED: u8 = 3;
pub const EXIT_VERIFY_FAILED: u8 = 4;

#[derive(Parser)]
#[command(name = "riscode", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Design an orthogonal code for K RISs at phase resolution R.
    Design {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        r: u32,
        /// Force a specific code length instead of the shortest one.
        #[arg(long)]
        p: Option<u32>,
        /// Write the matrix here (stdout summary is always printed).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Verify a code matrix file (text or JSON) exactly.
    Verify { input: PathBuf },
    /// Print the minimum feasible code length for K RISs at resolution R.
    Minp {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        r: u32,
    },
    /// Monte Carlo link simulation: leakage and channel-estimation error.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "simulate-out")]
        out: PathBuf,
    },
    /// Localization experiment: per-method error CDFs.
    Locexp {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "locexp-out")]
        out: PathBuf,
    },
    /// Inspect or check Butson-Hadamard catalogs.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    /// List the embedded catalog (plus an optional file).
    List {
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Parse and re-verify a catalog file.
    Check { file: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Design { k, r, p, out, format } => commands::design::run(k, r, p, out, format),
        Command::Verify { input } => commands::verify::run(&input),
        Command::Minp { k, r } => commands::minp::run(k, r),
        Command::Simulate { config, out } => commands::simulate::run(&config, &out),
        Command::Locexp { config, out } => commands::locexp::run(&config, &out),
        Command::Catalog { action } => match action {
            CatalogAction::List { file } => commands::catalog::list(file.as_deref()),
            CatalogAction::Check { file } => commands::catalog::check(&file),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

/// CLI error with its process exit code: 2 invalid input, 3 construction
/// unsupported, 4 verification failure.
#[derive(Debug)]
pub struct CliError {
    message: String,
    code: u8,
}

impl CliError {
    pub fn invalid(message: impl Into<String>) -> Self {
        Self { message: message.into(), code: EXIT_INVALID_INPUT }
    }

    pub fn verify_failed(message: impl Into<String>) -> Self {
        Self { message: message.into(), code: EXIT_VERIFY_FAILED }
    }

    pub fn exit_code(&self) -> u8 {
        self.code
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<riscode_core::codes::CodesError> for CliError {
    fn from(e: riscode_core::codes::CodesError) -> Self {
        use riscode_core::codes::CodesError;
        let code = match &e {
            CodesError::ConstructionUnsupported { .. } => EXIT_UNSUPPORTED,
            CodesError::CatalogVerification { .. } | CodesError::InternalVerification(_) => {
                EXIT_VERIFY_FAILED
            }
            _ => EXIT_INVALID_INPUT,
        };
        Self { message: e.to_string(), code }
    }
}

impl From<riscode_core::airlink::AirlinkError> for CliError {
    fn from(e: riscode_core::airlink::AirlinkError) -> Self {
        Self::invalid(e.to_string())
    }
}

impl From<riscode_core::locexp::LocexpError> for CliError {
    fn from(e: riscode_core::locexp::LocexpError) -> Self {
        use riscode_core::locexp::LocexpError;
        match e {
            LocexpError::Codes(c) => c.into(),
            other => Self::invalid(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::invalid(format!("io error: {e}"))
    }
}
