use std::process::ExitCode;

use clap::Parser;
use log::LevelFilter;
use qdexciton_cli::{parse_config, run_spectrum, run_validate, Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => LevelFilter::Warn,
        1 => LevelFilter::Info,
        _ => LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).init();

    match cli.command {
        Command::Spectrum(args) => {
            let result = parse_config(*args)
                .map_err(anyhow::Error::from)
                .and_then(|config| run_spectrum(&config));
            match result {
                Ok(summary) => {
                    let positions: Vec<String> = summary
                        .peaks
                        .iter()
                        .map(|p| format!("{:.3}", p.position))
                        .collect();
                    println!(
                        "{} lines, {} peaks at [{}] meV",
                        summary.line_count,
                        summary.peaks.len(),
                        positions.join(", ")
                    );
                    println!(
                        "wrote {} and {}",
                        summary.spectrum_path.display(),
                        summary.report_path.display()
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e:#}");
                    ExitCode::FAILURE
                }
            }
        }
        Command::Validate { level } => {
            let (table, ok) = run_validate(level);
            print!("{table}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
