//! Fixed-format writers: 9 significant digits, `.` separator, LF endings.

use qdexciton::{Line, Peak, Spectrum, StateLabel};
use serde::Serialize;
use serde_json::Value;

/// `%.9g`-style formatting.
pub fn sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Rounds to the value printed by [`sig9`].
pub fn round9(x: f64) -> f64 {
    sig9(x).parse().unwrap_or(x)
}

pub fn spectrum_csv(spec: &Spectrum) -> String {
    let mut out = String::from("omega_mev,s_omega\n");
    for (w, s) in spec.grid.points().zip(&spec.values) {
        out.push_str(&sig9(w));
        out.push(',');
        out.push_str(&sig9(*s));
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct Sample {
    omega_mev: f64,
    s_omega: f64,
}

pub fn spectrum_json(spec: &Spectrum) -> String {
    let samples: Vec<Sample> = spec
        .grid
        .points()
        .zip(&spec.values)
        .map(|(w, s)| Sample {
            omega_mev: round9(w),
            s_omega: round9(*s),
        })
        .collect();
    let mut text = serde_json::to_string_pretty(&samples).expect("plain data");
    text.push('\n');
    text
}

#[derive(Serialize)]
struct LabelRecord {
    j: f64,
    m: f64,
}

impl From<StateLabel> for LabelRecord {
    fn from(l: StateLabel) -> Self {
        Self { j: l.j(), m: l.m() }
    }
}

#[derive(Serialize)]
struct LineRecord {
    frequency_mev: f64,
    weight: f64,
    upper: LabelRecord,
    lower: LabelRecord,
}

#[derive(Serialize)]
struct PeakRecord {
    position_mev: f64,
    height: f64,
}

#[derive(Serialize)]
pub struct BlockEnergies {
    pub excitation: usize,
    pub method: &'static str,
    pub values_mev: Vec<f64>,
}

#[derive(Serialize)]
struct Report {
    config: Value,
    eigenvalues: Vec<BlockEnergies>,
    lines: Vec<LineRecord>,
    peaks: Vec<PeakRecord>,
}

pub fn report_json(
    config: Value,
    eigenvalues: Vec<BlockEnergies>,
    lines: &[Line],
    peaks: &[Peak<f64>],
) -> String {
    let report = Report {
        config,
        eigenvalues: eigenvalues
            .into_iter()
            .map(|b| BlockEnergies {
                values_mev: b.values_mev.into_iter().map(round9).collect(),
                ..b
            })
            .collect(),
        lines: lines
            .iter()
            .map(|l| LineRecord {
                frequency_mev: round9(l.frequency),
                weight: round9(l.weight),
                upper: l.upper.into(),
                lower: l.lower.into(),
            })
            .collect(),
        peaks: peaks
            .iter()
            .map(|p| PeakRecord {
                position_mev: round9(p.position),
                height: round9(p.height),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&report).expect("plain data");
    text.push('\n');
    text
}
