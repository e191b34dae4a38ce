//! Run configuration: scenario presets, a flat `key = value` or JSON file,
//! and command-line flags, resolved in that order of increasing priority.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use qdexciton::{default_grid, Method, Params, PeakThresholds};
use serde_json::{Map, Value};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("unknown key `{key}`")]
    UnknownKey { key: String },
    #[error("key `{key}` given twice in config file")]
    DuplicateKey { key: String },
    #[error("invalid value for `{key}`: {value:?} ({reason})")]
    InvalidValue {
        key: String,
        value: String,
        reason: String,
    },
    #[error("invalid `{key}`: {reason}")]
    Invariant { key: String, reason: String },
    #[error("config file line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("config file {path}: {reason}")]
    File { path: String, reason: String },
}

fn invariant(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invariant {
        key: key.to_string(),
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scenario {
    Fig1,
    Fig2,
}

impl Scenario {
    pub fn params(self) -> Params {
        match self {
            Scenario::Fig1 => Params::fig1(),
            Scenario::Fig2 => Params::fig2(),
        }
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "fig1" => Ok(Self::Fig1),
            "fig2" => Ok(Self::Fig2),
            _ => Err("expected fig1 or fig2".into()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err("expected csv or json".into()),
        }
    }
}

/// Initial state in the emitting block.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialSpec {
    /// All excitation in the exciton mode.
    Exciton,
    /// All excitation in the photon mode.
    Photon,
    /// Real amplitudes, ordered from `N` photons down to zero photons.
    Amplitudes(Vec<f64>),
}

impl fmt::Display for InitialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialSpec::Exciton => f.write_str("exciton"),
            InitialSpec::Photon => f.write_str("photon"),
            InitialSpec::Amplitudes(a) => {
                let parts: Vec<String> = a.iter().map(|x| x.to_string()).collect();
                f.write_str(&parts.join(","))
            }
        }
    }
}

impl FromStr for InitialSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "exciton" => Ok(Self::Exciton),
            "photon" => Ok(Self::Photon),
            list => {
                let amps = list
                    .trim_start_matches('[')
                    .trim_end_matches(']')
                    .split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|t| !t.is_empty())
                    .map(|t| {
                        t.parse::<f64>()
                            .map_err(|_| format!("`{t}` is not a number"))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                if amps.is_empty() {
                    return Err("expected exciton, photon or a list of amplitudes".into());
                }
                Ok(Self::Amplitudes(amps))
            }
        }
    }
}

fn parse_method(s: &str) -> Result<Method, String> {
    match s.replace('-', "_").as_str() {
        "first_order" => Ok(Method::FirstOrder),
        "exact_numeric" => Ok(Method::ExactNumeric),
        _ => Err("expected first_order or exact_numeric".into()),
    }
}

fn parse_number(s: &str) -> Result<f64, String> {
    let x: f64 = s.trim().parse().map_err(|_| "not a number".to_string())?;
    if !x.is_finite() {
        return Err("not finite".into());
    }
    Ok(x)
}

/// Flags of the `spectrum` subcommand. Every field is optional so that
/// unset flags fall through to the config file and scenario.
#[derive(Debug, Clone, Default, Args)]
pub struct SpectrumArgs {
    /// Config file: `key = value` lines or a JSON object.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Parameter preset (fig1 is the base when none is given).
    #[arg(long)]
    pub scenario: Option<Scenario>,
    /// Resonance energy Ω in meV.
    #[arg(long, value_parser = parse_number)]
    pub omega: Option<f64>,
    /// Collective coupling g in meV.
    #[arg(long, value_parser = parse_number)]
    pub g: Option<f64>,
    /// Per-molecule coupling κ in meV; sets g = κ√N.
    #[arg(long, value_parser = parse_number)]
    pub kappa: Option<f64>,
    /// Number of molecules N (≥ 3).
    #[arg(long)]
    pub n_molecules: Option<u64>,
    /// Spectrometer half-bandwidth γ in meV.
    #[arg(long, value_parser = parse_number)]
    pub gamma: Option<f64>,
    /// Excitation number of the emitting block.
    #[arg(long)]
    pub excitation: Option<usize>,
    /// exciton, photon, or comma-separated amplitudes from N photons down to 0.
    #[arg(long)]
    pub initial_state: Option<InitialSpec>,
    /// first_order or exact_numeric.
    #[arg(long, value_parser = parse_method)]
    pub method: Option<Method>,
    #[arg(long, value_parser = parse_number, allow_hyphen_values = true)]
    pub grid_min: Option<f64>,
    #[arg(long, value_parser = parse_number, allow_hyphen_values = true)]
    pub grid_max: Option<f64>,
    #[arg(long, value_parser = parse_number)]
    pub grid_step: Option<f64>,
    /// Spectrum table path.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Line and peak report path (default: next to the spectrum table).
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub format: Option<OutputFormat>,
    #[arg(long, value_parser = parse_number)]
    pub min_relative_height: Option<f64>,
    #[arg(long, value_parser = parse_number)]
    pub min_separation: Option<f64>,
}

impl SpectrumArgs {
    /// Fills unset fields from `lower`.
    fn over(self, lower: SpectrumArgs) -> SpectrumArgs {
        SpectrumArgs {
            config: self.config.or(lower.config),
            scenario: self.scenario.or(lower.scenario),
            omega: self.omega.or(lower.omega),
            g: self.g.or(lower.g),
            kappa: self.kappa.or(lower.kappa),
            n_molecules: self.n_molecules.or(lower.n_molecules),
            gamma: self.gamma.or(lower.gamma),
            excitation: self.excitation.or(lower.excitation),
            initial_state: self.initial_state.or(lower.initial_state),
            method: self.method.or(lower.method),
            grid_min: self.grid_min.or(lower.grid_min),
            grid_max: self.grid_max.or(lower.grid_max),
            grid_step: self.grid_step.or(lower.grid_step),
            output: self.output.or(lower.output),
            report: self.report.or(lower.report),
            format: self.format.or(lower.format),
            min_relative_height: self.min_relative_height.or(lower.min_relative_height),
            min_separation: self.min_separation.or(lower.min_separation),
        }
    }

    fn set(&mut self, key: &str, raw: &str) -> Result<(), ConfigError> {
        fn put<T>(
            slot: &mut Option<T>,
            key: &str,
            raw: &str,
            parse: impl FnOnce(&str) -> Result<T, String>,
        ) -> Result<(), ConfigError> {
            if slot.is_some() {
                return Err(ConfigError::DuplicateKey { key: key.into() });
            }
            *slot = Some(parse(raw).map_err(|reason| ConfigError::InvalidValue {
                key: key.into(),
                value: raw.into(),
                reason,
            })?);
            Ok(())
        }
        let int = |s: &str| {
            s.trim()
                .parse::<u64>()
                .map_err(|_| "not a non-negative integer".to_string())
        };
        match key.replace('-', "_").as_str() {
            "scenario" => put(&mut self.scenario, key, raw, str::parse),
            "omega" => put(&mut self.omega, key, raw, parse_number),
            "g" => put(&mut self.g, key, raw, parse_number),
            "kappa" => put(&mut self.kappa, key, raw, parse_number),
            "n_molecules" => put(&mut self.n_molecules, key, raw, int),
            "gamma" => put(&mut self.gamma, key, raw, parse_number),
            "excitation" => put(&mut self.excitation, key, raw, |s| {
                int(s).map(|n| n as usize)
            }),
            "initial_state" => put(&mut self.initial_state, key, raw, str::parse),
            "method" => put(&mut self.method, key, raw, parse_method),
            "grid_min" => put(&mut self.grid_min, key, raw, parse_number),
            "grid_max" => put(&mut self.grid_max, key, raw, parse_number),
            "grid_step" => put(&mut self.grid_step, key, raw, parse_number),
            "output" => put(&mut self.output, key, raw, |s| Ok(PathBuf::from(s))),
            "report" => put(&mut self.report, key, raw, |s| Ok(PathBuf::from(s))),
            "format" => put(&mut self.format, key, raw, str::parse),
            "min_relative_height" => put(&mut self.min_relative_height, key, raw, parse_number),
            "min_separation" => put(&mut self.min_separation, key, raw, parse_number),
            _ => Err(ConfigError::UnknownKey { key: key.into() }),
        }
    }
}

/// Parses config file text, either a JSON object or `key = value` lines.
pub fn parse_config_text(text: &str) -> Result<SpectrumArgs, ConfigError> {
    let mut out = SpectrumArgs::default();
    if text.trim_start().starts_with('{') {
        let map: Map<String, Value> =
            serde_json::from_str(text).map_err(|e| ConfigError::File {
                path: "<json>".into(),
                reason: e.to_string(),
            })?;
        for (key, value) in &map {
            let raw = match value {
                Value::Number(n) => n.to_string(),
                Value::String(s) => s.clone(),
                Value::Array(items) => items
                    .iter()
                    .map(|v| match v {
                        Value::Number(n) => Ok(n.to_string()),
                        other => Err(ConfigError::InvalidValue {
                            key: key.clone(),
                            value: other.to_string(),
                            reason: "array entries must be numbers".into(),
                        }),
                    })
                    .collect::<Result<Vec<_>, _>>()?
                    .join(","),
                other => {
                    return Err(ConfigError::InvalidValue {
                        key: key.clone(),
                        value: other.to_string(),
                        reason: "expected a number, string or array".into(),
                    })
                }
            };
            out.set(key, &raw)?;
        }
        return Ok(out);
    }
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or(ConfigError::Syntax { line: i + 1 })?;
        let key = key.trim();
        if key.is_empty() {
            return Err(ConfigError::Syntax { line: i + 1 });
        }
        out.set(key, value.trim())?;
    }
    Ok(out)
}

fn read_config_file(path: &Path) -> Result<SpectrumArgs, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::File {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    parse_config_text(&text).map_err(|e| match e {
        ConfigError::File { reason, .. } => ConfigError::File {
            path: path.display().to_string(),
            reason,
        },
        other => other,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

/// Fully resolved and validated run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: Params,
    pub excitation: usize,
    pub initial_state: InitialSpec,
    pub method: Method,
    pub grid: GridSpec,
    pub output: PathBuf,
    pub report: PathBuf,
    pub format: OutputFormat,
    pub thresholds: PeakThresholds<f64>,
}

/// Resolves flags over the config file (if any) over the scenario preset.
pub fn parse_config(flags: SpectrumArgs) -> Result<RunConfig, ConfigError> {
    let file = match &flags.config {
        Some(path) => read_config_file(path)?,
        None => SpectrumArgs::default(),
    };
    resolve(flags.over(file))
}

fn resolve(a: SpectrumArgs) -> Result<RunConfig, ConfigError> {
    let base = a.scenario.unwrap_or(Scenario::Fig1).params();
    let omega = a.omega.unwrap_or(base.omega);
    let gamma = a.gamma.unwrap_or(base.gamma);
    let n_molecules = a.n_molecules.unwrap_or(base.n_molecules);

    if n_molecules < 3 {
        return Err(invariant(
            "n_molecules",
            format!("N must be ≥ 3, got {n_molecules}"),
        ));
    }
    if omega <= 0.0 {
        return Err(invariant("omega", "must be > 0"));
    }
    if gamma <= 0.0 {
        return Err(invariant("gamma", "must be > 0"));
    }
    let params = match (a.g, a.kappa) {
        (Some(_), Some(_)) => {
            return Err(invariant("kappa", "give either g or kappa, not both"));
        }
        (_, Some(kappa)) => {
            if kappa < 0.0 {
                return Err(invariant("kappa", "must be ≥ 0"));
            }
            Params::from_kappa(omega, kappa, n_molecules, gamma)
        }
        (g, None) => {
            let g = g.unwrap_or(base.coupling_g);
            if g < 0.0 {
                return Err(invariant("g", "must be ≥ 0"));
            }
            Params::new(omega, g, n_molecules, gamma)
        }
    }
    .map_err(|e| invariant("params", e.to_string()))?;

    let excitation = a.excitation.unwrap_or(2);
    if excitation == 0 {
        return Err(invariant("excitation", "no emission from vacuum; need ≥ 1"));
    }
    let initial_state = a.initial_state.unwrap_or(InitialSpec::Exciton);
    if let InitialSpec::Amplitudes(amps) = &initial_state {
        if amps.len() != excitation + 1 {
            return Err(invariant(
                "initial_state",
                format!(
                    "block {excitation} needs {} amplitudes, got {}",
                    excitation + 1,
                    amps.len()
                ),
            ));
        }
        let norm = amps.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(invariant(
                "initial_state",
                format!("not normalized: norm = {norm}"),
            ));
        }
    }
    let method = a.method.unwrap_or(Method::FirstOrder);
    if method == Method::Zeroth {
        return Err(invariant("method", "expected first_order or exact_numeric"));
    }

    let default = default_grid(&params, excitation);
    let grid = GridSpec {
        min: a.grid_min.unwrap_or(default.start()),
        max: a.grid_max.unwrap_or(default.end()),
        step: a.grid_step.unwrap_or(default.step()),
    };
    if grid.step <= 0.0 || grid.step > gamma / 5.0 {
        return Err(invariant(
            "grid_step",
            format!("must be in (0, γ/5 = {}], got {}", gamma / 5.0, grid.step),
        ));
    }
    let half = 3.0 * params.coupling_g + 2.0 * omega * excitation as f64 / n_molecules as f64;
    if grid.min > omega - half {
        return Err(invariant(
            "grid_min",
            format!("must be ≤ {} to cover the emission band", omega - half),
        ));
    }
    if grid.max < omega + half {
        return Err(invariant(
            "grid_max",
            format!("must be ≥ {} to cover the emission band", omega + half),
        ));
    }

    let thresholds = PeakThresholds {
        min_relative_height: a
            .min_relative_height
            .unwrap_or(PeakThresholds::<f64>::default().min_relative_height),
        min_separation: a
            .min_separation
            .unwrap_or(PeakThresholds::<f64>::default().min_separation),
    };
    if !(thresholds.min_relative_height > 0.0 && thresholds.min_relative_height <= 1.0) {
        return Err(invariant("min_relative_height", "must be in (0, 1]"));
    }
    if thresholds.min_separation <= 0.0 {
        return Err(invariant("min_separation", "must be > 0"));
    }

    let format = a.format.unwrap_or_else(|| {
        match a
            .output
            .as_ref()
            .and_then(|p| p.extension())
            .and_then(|e| e.to_str())
        {
            Some("json") => OutputFormat::Json,
            _ => OutputFormat::Csv,
        }
    });
    let output = a
        .output
        .unwrap_or_else(|| PathBuf::from(format!("spectrum.{}", format.as_str())));
    let report = a
        .report
        .unwrap_or_else(|| output.with_extension("report.json"));
    if report == output {
        return Err(invariant("report", "must differ from output"));
    }

    Ok(RunConfig {
        params,
        excitation,
        initial_state,
        method,
        grid,
        output,
        report,
        format,
        thresholds,
    })
}

impl RunConfig {
    /// Flat JSON object that re-parses into an equal config.
    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("omega".into(), self.params.omega.into());
        match self.params.kappa {
            Some(kappa) => m.insert("kappa".into(), kappa.into()),
            None => m.insert("g".into(), self.params.coupling_g.into()),
        };
        m.insert("n_molecules".into(), self.params.n_molecules.into());
        m.insert("gamma".into(), self.params.gamma.into());
        m.insert("excitation".into(), self.excitation.into());
        let initial = match &self.initial_state {
            InitialSpec::Amplitudes(a) => Value::from(a.clone()),
            named => Value::from(named.to_string()),
        };
        m.insert("initial_state".into(), initial);
        m.insert("method".into(), self.method.as_str().into());
        m.insert("grid_min".into(), self.grid.min.into());
        m.insert("grid_max".into(), self.grid.max.into());
        m.insert("grid_step".into(), self.grid.step.into());
        m.insert("output".into(), self.output.display().to_string().into());
        m.insert("report".into(), self.report.display().to_string().into());
        m.insert("format".into(), self.format.as_str().into());
        m.insert(
            "min_relative_height".into(),
            self.thresholds.min_relative_height.into(),
        );
        m.insert(
            "min_separation".into(),
            self.thresholds.min_separation.into(),
        );
        Value::Object(m)
    }
}
