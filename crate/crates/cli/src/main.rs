use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qhmc_cli::{execute, Command, ConfigError};

#[derive(Parser)]
#[command(name = "qhmc", version, about = "q-deformed Hamiltonian Monte Carlo experiments")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Run one chain per q value and tabulate acceptance and ESS
    Sweep(Common),
    /// Tabulate Jackson-derivative forces at a single point
    ForceTable(Common),
    /// Sample a Bayesian inverse-problem posterior
    Inverse(Common),
    /// Run a single chain
    Chain(Common),
}

#[derive(Args)]
struct Common {
    /// TOML config, or a metadata.json from an earlier run
    #[arg(long)]
    config: PathBuf,
    /// Overrides sampler.seed
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides output.dir
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Sub::Sweep(a) => (Command::Sweep, a),
        Sub::ForceTable(a) => (Command::ForceTable, a),
        Sub::Inverse(a) => (Command::Inverse, a),
        Sub::Chain(a) => (Command::Chain, a),
    };
    match execute(command, &args.config, args.seed, args.out) {
        Ok(dir) => {
            println!("wrote {}", dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.chain().any(|c| c.is::<ConfigError>()) { ExitCode::from(2) } else { ExitCode::FAILURE }
        }
    }
}
