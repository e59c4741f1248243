use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fidecay_cli::{cyclecheck, describe, run, ModelSelection};

#[derive(Parser)]
#[command(
    name = "fidecay",
    version,
    about = "Fidelity decay of a cyclic entangling map under rf inhomogeneity"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the decay series and write CSV files and a summary.
    Run {
        #[arg(long, value_enum)]
        model: Option<ModelArg>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that the entangler superoperator is cyclic.
    Cyclecheck {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Field scale applied to carbon pulses.
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// Candidate cycle length.
        #[arg(long, default_value_t = 8)]
        cycle: usize,
    },
    /// Print the circuit plan and its pulse compilation.
    Describe {
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ModelArg {
    Incoherent,
    Decoherent,
    Both,
}

impl From<ModelArg> for ModelSelection {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Incoherent => ModelSelection::Incoherent,
            ModelArg::Decoherent => ModelSelection::Decoherent,
            ModelArg::Both => ModelSelection::Both,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { model, config, out } => {
            run(config.as_deref(), model.map(Into::into), out.as_deref()).map(|paths| {
                for p in paths {
                    println!("wrote {}", p.display());
                }
                true
            })
        }
        Command::Cyclecheck {
            config,
            scale,
            cycle,
        } => cyclecheck(config.as_deref(), scale, cycle).map(|c| {
            println!("{}", c.report);
            c.pass
        }),
        Command::Describe { config } => describe(config.as_deref()).map(|s| {
            print!("{s}");
            true
        }),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
