use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod io;

use io::Failure;

#[derive(Parser, Debug)]
#[command(name = "vortexlab", version, about = "Vortex solver and exact calculators for gauged sigma models")]
struct Cli {
    /// Input JSON, inline or a file path; read from stdin when absent.
    #[arg(long, global = true, value_name = "INLINE|PATH")]
    json: Option<String>,
    /// Write the JSON result here instead of stdout (also writes
    /// `<path>.manifest.json`).
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Seed for randomised initial data; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the iteration trace of `solve` as CSV.
    #[arg(long, global = true, value_name = "PATH")]
    csv: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Minimise the lattice vortex functional.
    Solve,
    /// Equivariant index from weight counts or a split bundle.
    Index,
    /// Check a filtered bundle against candidate subsheaves.
    Stability,
    /// Maximal weights, the moment curve and the Kempf-Ness finder.
    Weights,
    /// Dimension and invariant for the rotation action on the sphere.
    #[command(name = "example-s2")]
    ExampleS2 {
        #[arg(long)]
        p: Option<i64>,
        #[arg(long)]
        q: Option<i64>,
    },
    /// Run the acceptance suite and print a pass/fail table.
    Verify {
        /// Run only these criteria.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Index => "index",
            Command::Stability => "stability",
            Command::Weights => "weights",
            Command::ExampleS2 { .. } => "example-s2",
            Command::Verify { .. } => "verify",
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("VORTEXLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| Failure::Usage(format!("VORTEXLAB_THREADS must be a nonnegative integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Usage(format!("cannot configure threads: {e}")))
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    let name = cli.command.name();
    let opts = io::Options { json: cli.json, out: cli.out, seed: cli.seed, csv: cli.csv };
    match cli.command {
        Command::Solve => commands::solve(name, &opts),
        Command::Index => commands::index(name, &opts),
        Command::Stability => commands::stability(name, &opts),
        Command::Weights => commands::weights(name, &opts),
        Command::ExampleS2 { p, q } => commands::example_s2(name, &opts, p, q),
        Command::Verify { only } => commands::verify(name, &opts, &only),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}
