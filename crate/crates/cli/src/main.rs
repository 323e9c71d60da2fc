use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use labelqm_cli::{emit_report, parse_config, run_experiment, Experiment, ExperimentConfig, Format};

#[derive(Parser)]
#[command(name = "labelqm", version, about = "Run orthodox and label-theory measurement experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its artifacts
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory, overriding `output.directory`
        #[arg(long)]
        out: Option<PathBuf>,
        /// csv, json or both, overriding `output.formats`
        #[arg(long)]
        format: Option<Format>,
    },
    /// Check a config without running it
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the available experiment kinds
    ListExperiments,
}

const CONFIG_ERROR: u8 = 2;
const RUNTIME_ERROR: u8 = 3;

fn load(path: &PathBuf) -> Result<ExperimentConfig, ExitCode> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        ExitCode::from(CONFIG_ERROR)
    })?;
    parse_config(&text).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        ExitCode::from(CONFIG_ERROR)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::ListExperiments => {
            for e in Experiment::ALL {
                println!("{:<10} {}", e.name(), e.description());
            }
            ExitCode::SUCCESS
        }
        Command::Validate { config } => match load(&config) {
            Ok(c) => {
                println!("{}: valid {} config", config.display(), c.experiment.name());
                ExitCode::SUCCESS
            }
            Err(code) => code,
        },
        Command::Run { config, out, format } => {
            let c = match load(&config) {
                Ok(c) => c,
                Err(code) => return code,
            };
            let report = match run_experiment(&c) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(RUNTIME_ERROR);
                }
            };
            let dir = out.unwrap_or_else(|| PathBuf::from(c.directory().unwrap_or("results")));
            let format = format.unwrap_or(c.format());
            print!("{}", report.summary_text());
            match emit_report(&report, &dir, format) {
                Ok(files) => {
                    for f in files {
                        println!("wrote {}", f.display());
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(RUNTIME_ERROR)
                }
            }
        }
    }
}
