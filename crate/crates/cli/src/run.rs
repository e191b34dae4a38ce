use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use qdexciton::{
    exact_block_spectrum, find_peaks, first_order_energies, physical_spectrum, Complex64, FreqGrid,
    Method, ModelKind, Params, Peak, State,
};

use crate::config::{InitialSpec, OutputFormat, RunConfig};
use crate::output::{report_json, spectrum_csv, spectrum_json, BlockEnergies};

#[derive(Debug)]
pub struct RunSummary {
    pub peaks: Vec<Peak<f64>>,
    pub line_count: usize,
    pub spectrum_path: PathBuf,
    pub report_path: PathBuf,
}

pub fn initial_state(config: &RunConfig) -> Result<State> {
    let n = config.excitation;
    Ok(match &config.initial_state {
        InitialSpec::Exciton => State::bare_exciton(n),
        InitialSpec::Photon => State::photon(n),
        InitialSpec::Amplitudes(a) => {
            State::new(n, a.iter().map(|&x| Complex64::new(x, 0.0)).collect())?
        }
    })
}

fn block_energies(params: &Params, excitation: usize, method: Method) -> Result<Vec<f64>> {
    Ok(match method {
        Method::ExactNumeric => exact_block_spectrum(params, excitation, ModelKind::Effective)?
            .energies()
            .to_vec(),
        _ => first_order_energies(params, excitation)?,
    })
}

/// Computes the spectrum described by `config` and writes both artifacts.
pub fn run_spectrum(config: &RunConfig) -> Result<RunSummary> {
    let initial = initial_state(config).context("initial state")?;
    let grid = FreqGrid::new(config.grid.min, config.grid.max, config.grid.step)
        .context("frequency grid")?;
    let spec =
        physical_spectrum(&config.params, &initial, config.method, grid).context("spectrum")?;
    let peaks = find_peaks(&spec, config.thresholds).context("peak detection")?;

    let mut eigenvalues = Vec::new();
    for excitation in [config.excitation, config.excitation - 1] {
        eigenvalues.push(BlockEnergies {
            excitation,
            method: config.method.as_str(),
            values_mev: block_energies(&config.params, excitation, config.method)
                .with_context(|| format!("perturbation: block {excitation}"))?,
        });
    }

    let table = match config.format {
        OutputFormat::Csv => spectrum_csv(&spec),
        OutputFormat::Json => spectrum_json(&spec),
    };
    fs::write(&config.output, table)
        .with_context(|| format!("writing {}", config.output.display()))?;
    let report = report_json(config.to_json(), eigenvalues, &spec.lines, &peaks);
    fs::write(&config.report, report)
        .with_context(|| format!("writing {}", config.report.display()))?;

    log::info!(
        "{} lines, {} peaks on {} grid points",
        spec.lines.len(),
        peaks.len(),
        spec.grid.len()
    );
    Ok(RunSummary {
        line_count: spec.lines.len(),
        peaks,
        spectrum_path: config.output.clone(),
        report_path: config.report.clone(),
    })
}
