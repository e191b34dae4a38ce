//! Cross-module self-check suite behind `qdexciton validate`.

use std::fmt::Write as _;
use std::time::Instant;

use clap::ValueEnum;
use qdexciton::{
    angular_momentum, block_hamiltonian, closed_form_energy, exact_block_spectrum,
    exciton_commutator_function, find_peaks, first_order_energies, h0_block, hprime_block_with,
    hprime_rotated, integrated_intensity, physical_spectrum, q_commutator_residual, rotation_y,
    stationary_spectrum, time_domain_spectrum, transition_amplitudes, Deformation,
    ExactExcitonRealization, FockBlock, FreqGrid, HPrimeForm, Method, ModelKind, Params,
    PeakThresholds, State, StateLabel,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Level {
    Fast,
    Full,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: String) -> Self {
        Self {
            name: name.into(),
            passed,
            detail,
        }
    }
}

type Outcome = qdexciton::Result<Check>;

fn commutator_function() -> Outcome {
    // the square root picks the branch n_e <= (N + 1)/2
    let n = 10u64;
    let exact = ExactExcitonRealization::<f64>::new(n)?;
    let mut worst: f64 = 0.0;
    for ne in (0..=n).filter(|ne| 2 * ne <= n + 1) {
        let f = exciton_commutator_function(exact.occupation(ne), 1.0 / n as f64)?;
        worst = worst.max((f - (1.0 - 2.0 * ne as f64 / n as f64)).abs());
    }
    Ok(Check::new(
        "f(x(n_e)) = 1 - 2n_e/N, N = 10, n_e <= (N+1)/2",
        worst <= 1e-12,
        format!("max error {worst:.2e}"),
    ))
}

fn exact_commutator() -> Outcome {
    let n = 10u64;
    let exact = ExactExcitonRealization::<f64>::new(n)?;
    let up = exact.b_q().adjoint();
    let dev = exact
        .h()
        .commutator(&up)?
        .max_deviation(&up.scale(-2.0 / n as f64))?;
    Ok(Check::new(
        "[h, b_q^+] = -(2/N) b_q^+, N = 10",
        dev <= 1e-12,
        format!("deviation {dev:.2e}"),
    ))
}

fn q_commutator() -> Outcome {
    let r100 = q_commutator_residual(&Deformation::new(100)?, 5)?;
    let r200 = q_commutator_residual(&Deformation::new(200)?, 5)?;
    let ratio = r100 / r200;
    Ok(Check::new(
        "q-commutator closes at O(1/N), n_e <= 5",
        (1.5..2.5).contains(&ratio),
        format!("residual {r100:.4} -> {r200:.4}, ratio {ratio:.3}"),
    ))
}

fn hermiticity() -> Outcome {
    let mut worst: f64 = 0.0;
    for p in [Params::fig1(), Params::fig2()] {
        for kind in [ModelKind::Effective, ModelKind::Dicke] {
            for excitation in 0..=6 {
                worst = worst.max(block_hamiltonian(&p, excitation, kind)?.hermitian_deviation());
            }
        }
    }
    Ok(Check::new(
        "hamiltonian blocks hermitian",
        worst <= 1e-12,
        format!("max deviation {worst:.2e}"),
    ))
}

fn tampering() -> Outcome {
    let p = Params::fig1();
    let tampered =
        h0_block(&p, 2)?.add(&hprime_block_with(&p, 2, HPrimeForm::UncoupledLastTerm)?)?;
    let rejected = tampered.check_hermitian().is_err();
    Ok(Check::new(
        "tampered H' (g dropped) fails hermiticity",
        rejected,
        format!("deviation {:.2e}", tampered.hermitian_deviation()),
    ))
}

fn dicke_equivalence() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in [10u64, 100, 10_000] {
        let p = Params::fig1().with_n_molecules(n)?;
        let d = block_hamiltonian(&p, 1, ModelKind::Dicke)?;
        let e = block_hamiltonian(&p, 1, ModelKind::Effective)?;
        worst = worst.max(d.max_deviation(&e)?);
    }
    Ok(Check::new(
        "block 1: dicke = effective, N in {10, 100, 10000}",
        worst <= 1e-12,
        format!("max deviation {worst:.2e}"),
    ))
}

fn rotation() -> Outcome {
    let mut worst: f64 = 0.0;
    for excitation in 0..=6 {
        let block = FockBlock::new(excitation);
        let am = angular_momentum::<f64>(block);
        let r = rotation_y::<f64>(block, std::f64::consts::FRAC_PI_2)?;
        worst = worst.max(
            r.compose(&am.jz)?
                .compose(&r.adjoint())?
                .max_deviation(&am.jx)?,
        );
    }
    Ok(Check::new(
        "R Jz R^+ = Jx up to block 6",
        worst <= 1e-12,
        format!("max deviation {worst:.2e}"),
    ))
}

fn closed_form() -> Outcome {
    let p = Params::fig1();
    let mut worst: f64 = 0.0;
    for excitation in 0..=6 {
        let block = FockBlock::new(excitation);
        let hr = hprime_rotated(&p, excitation)?;
        for k in 0..block.dimension() {
            let label = StateLabel {
                two_j: block.two_j(),
                two_m: block.two_m(k),
            };
            let numeric = p.omega * excitation as f64
                + 2.0 * p.coupling_g * label.m::<f64>()
                + hr.get(k, k).re;
            worst = worst.max((numeric - closed_form_energy(&p, label)).abs());
        }
    }
    Ok(Check::new(
        "closed-form energies = diag(R^+ H' R)",
        worst <= 1e-10 * p.omega,
        format!("max deviation {worst:.2e} meV"),
    ))
}

fn perturbation_error(n: u64, excitation: usize) -> qdexciton::Result<f64> {
    let p = Params::fig1().with_n_molecules(n)?;
    let a = first_order_energies(&p, excitation)?;
    let e = exact_block_spectrum(&p, excitation, ModelKind::Effective)?;
    Ok(a.iter()
        .zip(e.energies())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

fn scaling(sweep: &[u64]) -> qdexciton::Result<Vec<Check>> {
    let mut out = Vec::new();
    for excitation in [2usize, 3] {
        for pair in sweep.windows(2) {
            let (n1, n2) = (pair[0], pair[1]);
            let d1 = perturbation_error(n1, excitation)?;
            let d2 = perturbation_error(n2, excitation)?;
            // local power law d ∝ N^-p
            let order = (d1 / d2).ln() / (n2 as f64 / n1 as f64).ln();
            out.push(Check::new(
                format!("1/N^2 error scaling, block {excitation}, N {n1} -> {n2}"),
                (order - 2.0).abs() <= 0.25,
                format!("fitted order {order:.3}"),
            ));
        }
    }
    Ok(out)
}

fn time_domain() -> Outcome {
    let p = Params::fig1();
    let initial = State::bare_exciton(1);
    let grid = qdexciton::default_grid(&p, 1);
    let lines = transition_amplitudes(&p, &initial, Method::FirstOrder)?;
    let s = stationary_spectrum(&lines, p.gamma, grid)?;
    let td = time_domain_spectrum(
        &p,
        &initial,
        Method::FirstOrder,
        p.gamma,
        20.0 / p.gamma,
        grid,
    )?;
    let mut worst: f64 = 0.0;
    for line in &lines {
        let a = s.value_at(line.frequency).unwrap_or(f64::NAN);
        let b = td.value_at(line.frequency).unwrap_or(f64::NAN);
        worst = worst.max(((b - a) / a).abs());
    }
    Ok(Check::new(
        "time domain (γt = 20) vs stationary, block 1",
        worst <= 0.02,
        format!("max relative difference {:.3}%", worst * 100.0),
    ))
}

fn sum_rule() -> Outcome {
    let p = Params::fig1();
    let grid = FreqGrid::new(p.omega - 200.0, p.omega + 200.0, p.gamma / 10.0)?;
    let spec = physical_spectrum(&p, &State::bare_exciton(2), Method::FirstOrder, grid)?;
    let expected = 2.0 * std::f64::consts::PI * spec.total_weight();
    let rel = (integrated_intensity(&spec) - expected).abs() / expected;
    let nonnegative = spec.values.iter().all(|&v| v >= 0.0);
    Ok(Check::new(
        "sum rule and S >= 0, block 2",
        rel <= 0.005 && nonnegative,
        format!("relative error {:.4}%", rel * 100.0),
    ))
}

fn peak_counts() -> qdexciton::Result<Vec<Check>> {
    let mut out = Vec::new();
    let cases = [
        ("fig1 block 1", Params::fig1(), 1usize, 2usize),
        ("fig1 block 2", Params::fig1(), 2, 6),
        ("fig2 block 2", Params::fig2(), 2, 2),
    ];
    for (name, p, excitation, expected) in cases {
        for n_photon in 0..=excitation {
            let initial = State::fock(excitation, n_photon)?;
            let grid = qdexciton::default_grid(&p, excitation);
            let spec = physical_spectrum(&p, &initial, Method::FirstOrder, grid)?;
            let peaks = find_peaks(&spec, PeakThresholds::default())?;
            out.push(Check::new(
                format!(
                    "{name}: {expected} peaks from |{n_photon},{}>",
                    excitation - n_photon
                ),
                peaks.len() == expected,
                format!("{} found", peaks.len()),
            ));
        }
    }
    Ok(out)
}

fn capture(name: &str, outcome: Outcome) -> Check {
    outcome.unwrap_or_else(|e| Check::new(name, false, format!("error: {e}")))
}

pub fn run_suite(level: Level) -> Vec<Check> {
    let mut checks = vec![
        capture("commutator function", commutator_function()),
        capture("exact commutator", exact_commutator()),
        capture("q-commutator", q_commutator()),
        capture("hermiticity", hermiticity()),
        capture("tampering", tampering()),
        capture("dicke equivalence", dicke_equivalence()),
        capture("rotation", rotation()),
        capture("closed form", closed_form()),
        capture("time domain", time_domain()),
        capture("sum rule", sum_rule()),
    ];
    let sweep: &[u64] = match level {
        Level::Fast => &[100, 200],
        Level::Full => &[100, 200, 1000],
    };
    match scaling(sweep) {
        Ok(c) => checks.extend(c),
        Err(e) => checks.push(Check::new("scaling", false, format!("error: {e}"))),
    }
    if level == Level::Full {
        match peak_counts() {
            Ok(c) => checks.extend(c),
            Err(e) => checks.push(Check::new("peak counts", false, format!("error: {e}"))),
        }
    }
    checks
}

pub fn render_table(checks: &[Check]) -> String {
    let width = checks
        .iter()
        .map(|c| c.name.chars().count())
        .max()
        .unwrap_or(0);
    let mut out = String::new();
    for c in checks {
        let pad = width - c.name.chars().count();
        let status = if c.passed { "pass" } else { "FAIL" };
        let _ = writeln!(out, "{status}  {}{}  {}", c.name, " ".repeat(pad), c.detail);
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    let _ = writeln!(out, "{} checks, {failed} failed", checks.len());
    out
}

/// Runs the suite, returning the rendered table and overall success.
pub fn run_validate(level: Level) -> (String, bool) {
    let started = Instant::now();
    let checks = run_suite(level);
    log::info!("validation took {:.2} s", started.elapsed().as_secs_f64());
    let ok = checks.iter().all(|c| c.passed);
    (render_table(&checks), ok)
}
