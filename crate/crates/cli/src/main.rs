use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thermolimit_cli::config::Format;
use thermolimit_cli::runner::{run, Overrides};

#[derive(Parser)]
#[command(name = "thermolimit", version, about = "Large-ensemble decoherence simulations and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the built-in self-checks of every module.
    Validate {
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (text, overrides) = match cli.command {
        Command::Run { config, out_dir, format, seed } => match std::fs::read_to_string(&config) {
            Ok(text) => (text, Overrides { out_dir, format, seed }),
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", config.display());
                return ExitCode::from(2);
            }
        },
        Command::Validate { out_dir, format, seed } => {
            (r#"{"experiment": "validate-all"}"#.to_string(), Overrides { out_dir, format, seed })
        }
    };
    match run(&text, &overrides) {
        Ok(outcome) => {
            for file in &outcome.files {
                println!("{}", file.display());
            }
            if outcome.failures > 0 {
                eprintln!("{} check(s) failed", outcome.failures);
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
