use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use anyonic_core::AnyonModel;

mod commands;
mod error;
mod inputs;
mod render;
mod verify;

use error::CliError;
use render::Report;

#[derive(Parser)]
#[command(name = "anyonic", version, about = "Fibonacci anyon states, correlations and teleportation")]
struct Cli {
    /// `fibonacci` or a path to a model definition file.
    #[arg(long, global = true, default_value = "fibonacci")]
    model: String,

    /// Master seed for every sampled quantity.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Numerical tolerance for pass/fail verdicts.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// List the fusion-tree basis of n anyons.
    Basis {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=10))]
        n: u8,
        /// Tree shape such as `((0 1)(2 3))`; defaults to the left comb.
        #[arg(long)]
        shape: Option<String>,
    },
    /// Basis dimensions per global charge.
    Dims {
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u8).range(1..=12))]
        max_n: u8,
    },
    /// Both marginals of a bipartite state, with spectra.
    Marginals(StateInput),
    /// The uncorrelated test over local observable spanning sets.
    Correlations(StateInput),
    /// Run a teleportation scenario.
    Teleport(TeleportArgs),
    /// Run the invariant suites.
    Verify {
        #[arg(long, value_enum)]
        suite: Option<verify::Suite>,
    },
}

#[derive(Args)]
#[command(group(ArgGroup::new("input").required(true).args(["state", "operator", "resource"])))]
pub struct StateInput {
    /// State file (`shape:` header, then `<tree> : <re> <im>` lines).
    #[arg(long)]
    state: Option<PathBuf>,
    /// Density operator file, text or JSON.
    #[arg(long)]
    operator: Option<PathBuf>,
    /// A built-in resource state by scenario name.
    #[arg(long)]
    resource: Option<String>,
    /// Number of leaves on the A side; defaults to half.
    #[arg(long)]
    split: Option<usize>,
}

#[derive(Args)]
pub struct TeleportArgs {
    #[arg(long)]
    scenario: String,
    #[arg(long, value_parser = ["ab", "ba"])]
    direction: String,
    /// `re`, `re,im` or polar `r@theta`.
    #[arg(long, default_value = "0.6", allow_hyphen_values = true)]
    alpha: String,
    #[arg(long, default_value = "0.8", allow_hyphen_values = true)]
    beta: String,
    /// Sample this many random measurements and report receiver reachability.
    #[arg(long)]
    samples: Option<usize>,
}

pub struct Context {
    pub model: Arc<AnyonModel>,
    pub seed: u64,
    pub tol: f64,
}

fn load_model(spec: &str) -> Result<AnyonModel, CliError> {
    if spec == "fibonacci" {
        return Ok(anyonic_core::fibonacci_model());
    }
    let text = fs::read_to_string(spec).map_err(|e| CliError::io(spec, e))?;
    Ok(anyonic_core::io::parse_model(&text)?)
}

fn run(cli: Cli) -> Result<Box<dyn Report>, CliError> {
    let ctx = Context { model: Arc::new(load_model(&cli.model)?), seed: cli.seed, tol: cli.tol };
    Ok(match cli.command {
        Command::Basis { n, shape } => Box::new(commands::basis(&ctx, n as usize, shape.as_deref())?),
        Command::Dims { max_n } => Box::new(commands::dims(&ctx, max_n as usize)?),
        Command::Marginals(input) => Box::new(commands::marginals(&ctx, &input)?),
        Command::Correlations(input) => Box::new(commands::correlations(&ctx, &input)?),
        Command::Teleport(args) => commands::teleport(&ctx, &args)?,
        Command::Verify { suite } => Box::new(verify::run(&ctx, suite)),
    })
}

fn emit(report: &dyn Report, format: Format, out: Option<&PathBuf>) -> Result<(), CliError> {
    let body = match format {
        Format::Text => report.text(),
        Format::Json => report.json()? + "\n",
    };
    match out {
        Some(path) => fs::write(path, body).map_err(|e| CliError::io(path.display(), e)),
        None => io::stdout().write_all(body.as_bytes()).map_err(|e| CliError::io("stdout", e)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (format, out) = (cli.format, cli.out.clone());
    let result = run(cli).and_then(|report| {
        emit(report.as_ref(), format, out.as_ref())?;
        Ok(report.succeeded())
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
