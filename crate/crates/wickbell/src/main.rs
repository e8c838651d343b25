use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use wickbell::catalog::{catalog_csv, catalog_text, Experiment};
use wickbell::config::Config;
use wickbell::error::{RunError, EXIT_OK};
use wickbell::{experiments, out_dir, output};

#[derive(Parser)]
#[command(name = "wickbell", version, about = "Real- and imaginary-time path-integral experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its CSV outputs.
    Run {
        experiment: Experiment,
        /// `key = value` config file.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override a key, `--set key=value`; repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// List the experiments.
    List {
        #[arg(long)]
        csv: bool,
    },
}

fn run(experiment: Experiment, file: Option<PathBuf>, set: &[String], dir: Option<PathBuf>) -> Result<(), RunError> {
    let text = match &file {
        Some(p) => Some(std::fs::read_to_string(p).map_err(|source| RunError::Io {
            path: p.clone(),
            source,
        })?),
        None => None,
    };
    let config = Config::resolve(
        Some(experiment),
        file.as_deref().zip(text.as_deref()),
        set,
    )?;
    let report = experiments::run(&config)?;
    let written = output::write_report(&report, &config, &out_dir(dir, &config))?;
    for line in &report.headline {
        println!("{line}");
    }
    eprintln!("wrote {}", written.data.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::List { csv } => {
            print!("{}", if csv { catalog_csv() } else { catalog_text() });
            EXIT_OK
        }
        Command::Run {
            experiment,
            config,
            set,
            out_dir,
        } => match run(experiment, config, &set, out_dir) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                eprintln!("error: {e}");
                e.exit_code()
            }
        },
    };
    ExitCode::from(code as u8)
}
