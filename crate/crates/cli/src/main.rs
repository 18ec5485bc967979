use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use dvcv_core::config::{Scenario, ScenarioConfig};

mod scenarios;

/// Run one simulation scenario and write its artifacts.
#[derive(Parser, Debug)]
#[command(name = "dvcv", version)]
struct Cli {
    /// Scenario configuration file (`key = value` lines).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed in the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Only print the summary line and errors.
    #[arg(long)]
    quiet: bool,
    /// Scenario to run; overrides `scenario` in the configuration.
    scenario: Option<String>,
}

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .filter_level(if cli.quiet { log::LevelFilter::Error } else { log::LevelFilter::Warn })
        .parse_default_env()
        .init();

    let mut cfg = match ScenarioConfig::load(&cli.config) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let scenario = match cli.scenario.as_deref().map(str::parse::<Scenario>) {
        Some(Ok(s)) => s,
        Some(Err(e)) => {
            eprintln!("config error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
        None => match cfg.scenario {
            Some(s) => s,
            None => {
                eprintln!("config error: no scenario given");
                return ExitCode::from(EXIT_CONFIG);
            }
        },
    };
    if let Some(seed) = cli.seed {
        cfg.tomography.seed = seed;
    }
    let dir = cli.out.unwrap_or_else(|| cfg.output_dir.clone());

    match scenarios::run(scenario, &cfg, &dir) {
        Ok(outcome) => {
            if !cli.quiet {
                for f in &outcome.files {
                    eprintln!("wrote {}", f.display());
                }
            }
            println!("{}", outcome.summary(scenario));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("numerical failure: {e}");
            ExitCode::from(EXIT_NUMERICAL)
        }
    }
}
