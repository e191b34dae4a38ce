//! Physical emission spectrum seen through a spectrometer of half-bandwidth γ.
//!
//! Emission from block `N` goes to block `N - 1` through the q-deformed
//! exciton creation operator. In steady state every `(upper l, lower m)` pair
//! contributes a Lorentzian `2γ w / (γ² + (ω - ω_lm)²)` with weight
//! `w = |⟨i|ψ_l⟩|² |⟨ψ_l|b_q†|ψ_m⟩|²`.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::fock::{qdeformed_raising, FockBlock, OperatorMap};
use crate::linalg::{inner, norm};
use crate::models::{ModelKind, ModelParams};
use crate::perturbation::{
    exact_block_spectrum, first_order_states, zeroth_spectrum, EigenSystem, Method, StateLabel,
};
use crate::scalar::{cre, Real, C};

/// Lines below this fraction of the strongest weight are dropped.
pub const PRUNE_RELATIVE: f64 = 1e-14;

/// Required grid margin beyond the outermost lines, in units of γ.
pub const GRID_MARGIN_GAMMAS: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralLine<T: Real> {
    /// `E_upper,l - E_lower,m` in meV.
    pub frequency: T,
    pub weight: T,
    pub upper: StateLabel,
    pub lower: StateLabel,
}

/// Uniform frequency grid `start + i * step`, `i < count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid<T: Real> {
    start: T,
    step: T,
    count: usize,
}

impl<T: Real> Grid<T> {
    /// Grid from `min` to `max` inclusive (up to rounding of the last step).
    pub fn new(min: T, max: T, step: T) -> Result<Self> {
        if !(step > T::zero()) || !step.is_finite() {
            return Err(Error::InvalidGrid(format!("step must be > 0, got {step}")));
        }
        if !(max > min) || !min.is_finite() || !max.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "need min < max, got [{min}, {max}]"
            )));
        }
        let span = (max - min) / step;
        let count = (span + T::lit(1e-9)).floor().to_usize().ok_or_else(|| {
            Error::InvalidGrid(format!("too many points for [{min}, {max}] / {step}"))
        })? + 1;
        Ok(Self {
            start: min,
            step,
            count,
        })
    }

    pub fn start(&self) -> T {
        self.start
    }

    pub fn step(&self) -> T {
        self.step
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn end(&self) -> T {
        self.point(self.count.saturating_sub(1))
    }

    pub fn point(&self, i: usize) -> T {
        self.start + self.step * T::from_count(i)
    }

    pub fn points(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.count).map(|i| self.point(i))
    }

    fn check_covers(&self, lines: &[SpectralLine<T>], gamma: T) -> Result<()> {
        let margin = T::lit(GRID_MARGIN_GAMMAS) * gamma;
        let (lo, hi) = (self.start, self.end());
        let uncovered: Vec<String> = lines
            .iter()
            .filter(|l| l.frequency - margin < lo || l.frequency + margin > hi)
            .map(|l| format!("{}", l.frequency))
            .collect();
        if !uncovered.is_empty() {
            return Err(Error::GridCoverage(format!(
                "grid [{lo}, {hi}] misses lines at {} meV (margin {margin})",
                uncovered.join(", ")
            )));
        }
        Ok(())
    }
}

/// Default grid: `Ω ± max(120, 3g + 2ΩN/N_mol + 50γ)` meV at step `γ/10`.
pub fn default_grid<T: Real>(params: &ModelParams<T>, excitation: usize) -> Grid<T> {
    let spread = T::lit(3.0) * params.coupling_g
        + T::lit(2.0) * params.omega * T::from_count(excitation)
            / T::from_u64(params.n_molecules).unwrap()
        + T::lit(GRID_MARGIN_GAMMAS) * params.gamma;
    let half = spread.max(T::lit(120.0));
    Grid::new(
        params.omega - half,
        params.omega + half,
        params.gamma / T::lit(10.0),
    )
    .expect("positive width and step")
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialState<T: Real> {
    pub excitation: usize,
    pub amplitudes: Vec<C<T>>,
}

impl<T: Real> InitialState<T> {
    pub fn new(excitation: usize, amplitudes: Vec<C<T>>) -> Result<Self> {
        let expected = excitation + 1;
        if amplitudes.len() != expected {
            return Err(Error::StateDimension {
                expected,
                got: amplitudes.len(),
            });
        }
        let len = norm(&amplitudes);
        if (len - T::one()).abs() > T::tolerance(1e-10) {
            return Err(Error::UnnormalizedState(len.to_f64_lossy()));
        }
        Ok(Self {
            excitation,
            amplitudes,
        })
    }

    /// Fock state with `n_photon` photons and the rest excitons.
    pub fn fock(excitation: usize, n_photon: usize) -> Result<Self> {
        let block = FockBlock::new(excitation);
        let k = block
            .index_of(
                n_photon,
                excitation
                    .checked_sub(n_photon)
                    .ok_or_else(|| Error::InvalidParameter {
                        name: "initial_state",
                        reason: format!("{n_photon} photons exceed excitation {excitation}"),
                    })?,
            )
            .expect("pair sums to excitation");
        let mut amps = vec![C::zero(); block.dimension()];
        amps[k] = cre(T::one());
        Self::new(excitation, amps)
    }

    /// `|0 photons, N excitons⟩`.
    pub fn bare_exciton(excitation: usize) -> Self {
        Self::fock(excitation, 0).expect("valid Fock state")
    }

    /// `|N photons, 0 excitons⟩`.
    pub fn photon(excitation: usize) -> Self {
        Self::fock(excitation, excitation).expect("valid Fock state")
    }
}

#[derive(Debug, Clone)]
pub struct SpectrumResult<T: Real> {
    pub grid: Grid<T>,
    pub values: Vec<T>,
    pub lines: Vec<SpectralLine<T>>,
    pub gamma: T,
    pub initial_state: Option<InitialState<T>>,
}

impl<T: Real> SpectrumResult<T> {
    pub fn total_weight(&self) -> T {
        total_weight(&self.lines)
    }

    /// Linear interpolation of the sampled values; `None` outside the grid.
    pub fn value_at(&self, omega: T) -> Option<T> {
        let n = self.values.len();
        if n == 0 {
            return None;
        }
        let x = (omega - self.grid.start()) / self.grid.step();
        let last = T::from_count(n - 1);
        if x < T::zero() || x > last {
            return None;
        }
        let i = x.floor().to_usize()?.min(n.saturating_sub(2));
        if n == 1 {
            return Some(self.values[0]);
        }
        let frac = x - T::from_count(i);
        Some(self.values[i] + (self.values[i + 1] - self.values[i]) * frac)
    }

    /// Steady-state Lorentzian sum of the stored lines, evaluated exactly.
    pub fn line_shape_at(&self, omega: T) -> T {
        stationary_value(&self.lines, self.gamma, omega)
    }
}

pub fn total_weight<T: Real>(lines: &[SpectralLine<T>]) -> T {
    lines.iter().fold(T::zero(), |acc, l| acc + l.weight)
}

fn solve_block<T: Real>(
    params: &ModelParams<T>,
    excitation: usize,
    method: Method,
) -> Result<EigenSystem<T>> {
    match method {
        Method::Zeroth => zeroth_spectrum(params, excitation),
        Method::FirstOrder => first_order_states(params, excitation),
        Method::ExactNumeric => exact_block_spectrum(params, excitation, ModelKind::Effective),
    }
}

/// Dressed-state data shared by the stationary and time-domain spectra.
#[derive(Debug, Clone)]
pub struct Transitions<T: Real> {
    pub upper: EigenSystem<T>,
    pub lower: EigenSystem<T>,
    /// `b_q†` from the lower block into the upper one.
    pub dipole: OperatorMap<T>,
    /// `⟨ψ_l|b_q†|ψ_m⟩`, indexed `[l][m]`.
    pub amplitudes: Vec<Vec<C<T>>>,
    /// `⟨ψ_l|i⟩`.
    pub projections: Vec<C<T>>,
}

impl<T: Real> Transitions<T> {
    pub fn solve(
        params: &ModelParams<T>,
        initial: &InitialState<T>,
        method: Method,
    ) -> Result<Self> {
        let excitation = initial.excitation;
        let lower_block = FockBlock::new(excitation)
            .lower()
            .ok_or(Error::NoEmissionFromVacuum)?;
        let upper = solve_block(params, excitation, method)?;
        let lower = solve_block(params, excitation - 1, method)?;
        let dipole = qdeformed_raising(lower_block, &params.deformation()?)?;

        let lower_images: Vec<Vec<C<T>>> = (0..lower.len())
            .map(|m| dipole.apply(&lower.state(m)))
            .collect::<Result<_>>()?;
        let amplitudes = (0..upper.len())
            .map(|l| {
                let psi = upper.state(l);
                lower_images.iter().map(|img| inner(&psi, img)).collect()
            })
            .collect();
        let projections = (0..upper.len())
            .map(|l| inner(&upper.state(l), &initial.amplitudes))
            .collect();
        Ok(Self {
            upper,
            lower,
            dipole,
            amplitudes,
            projections,
        })
    }

    pub fn frequency(&self, l: usize, m: usize) -> T {
        self.upper.energies()[l] - self.lower.energies()[m]
    }

    /// All lines, pruned and sorted by frequency.
    pub fn lines(&self) -> Vec<SpectralLine<T>> {
        let mut lines = Vec::new();
        for l in 0..self.upper.len() {
            let pop = self.projections[l].norm_sqr();
            for m in 0..self.lower.len() {
                lines.push(SpectralLine {
                    frequency: self.frequency(l, m),
                    weight: pop * self.amplitudes[l][m].norm_sqr(),
                    upper: self.upper.labels()[l],
                    lower: self.lower.labels()[m],
                });
            }
        }
        let max = lines.iter().fold(T::zero(), |a, l| a.max(l.weight));
        let floor = T::lit(PRUNE_RELATIVE) * max;
        lines.retain(|l| l.weight >= floor && l.weight > T::zero());
        lines.sort_by(|a, b| {
            a.frequency
                .partial_cmp(&b.frequency)
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        lines
    }
}

/// Emission lines from `initial` (in block `excitation`) into the block below.
pub fn transition_amplitudes<T: Real>(
    params: &ModelParams<T>,
    initial: &InitialState<T>,
    method: Method,
) -> Result<Vec<SpectralLine<T>>> {
    Ok(Transitions::solve(params, initial, method)?.lines())
}

fn stationary_value<T: Real>(lines: &[SpectralLine<T>], gamma: T, omega: T) -> T {
    let two_gamma = T::lit(2.0) * gamma;
    let g2 = gamma * gamma;
    lines.iter().fold(T::zero(), |acc, l| {
        let d = omega - l.frequency;
        acc + two_gamma * l.weight / (g2 + d * d)
    })
}

/// Lorentzian sum `S(ω) = Σ 2γ w / (γ² + (ω - ω_lm)²)` on the grid.
pub fn stationary_spectrum<T: Real>(
    lines: &[SpectralLine<T>],
    gamma: T,
    grid: Grid<T>,
) -> Result<SpectrumResult<T>> {
    if !(gamma > T::zero()) {
        return Err(Error::InvalidParameter {
            name: "gamma",
            reason: format!("must be > 0, got {gamma}"),
        });
    }
    grid.check_covers(lines, gamma)?;
    let values = grid
        .points()
        .map(|w| stationary_value(lines, gamma, w))
        .collect();
    Ok(SpectrumResult {
        grid,
        values,
        lines: lines.to_vec(),
        gamma,
        initial_state: None,
    })
}

/// Lines and stationary spectrum in one call, with the initial state recorded.
pub fn physical_spectrum<T: Real>(
    params: &ModelParams<T>,
    initial: &InitialState<T>,
    method: Method,
    grid: Grid<T>,
) -> Result<SpectrumResult<T>> {
    let lines = transition_amplitudes(params, initial, method)?;
    let mut spec = stationary_spectrum(&lines, params.gamma, grid)?;
    spec.initial_state = Some(initial.clone());
    Ok(spec)
}

/// Filtered spectrum after a finite excitation time `t`.
///
/// With `G(t1, t2) = Σ c_l* A_lm A_nm* c_n e^{iω_lm t2} e^{-iω_nm t1}` the
/// double time integral factorizes, giving
/// `S(ω) = 2γ Σ_m |Σ_l c_l* A_lm I(ω, ω_lm)|²` with
/// `I(ω, ν) = (e^{i(ν-ω)t} - e^{-γt}) / (γ - i(ω - ν))` after dropping the
/// common phase `e^{iωt}`. Cross terms `l ≠ n` are kept.
pub fn time_domain_spectrum<T: Real>(
    params: &ModelParams<T>,
    initial: &InitialState<T>,
    method: Method,
    gamma: T,
    t: T,
    grid: Grid<T>,
) -> Result<SpectrumResult<T>> {
    if !(gamma > T::zero()) {
        return Err(Error::InvalidParameter {
            name: "gamma",
            reason: format!("must be > 0, got {gamma}"),
        });
    }
    if !(t > T::zero()) {
        return Err(Error::InvalidParameter {
            name: "t",
            reason: format!("must be > 0, got {t}"),
        });
    }
    let tr = Transitions::solve(params, initial, method)?;
    let lines = tr.lines();
    grid.check_covers(&lines, gamma)?;

    let decay = (-gamma * t).exp();
    let two_gamma = T::lit(2.0) * gamma;
    let values = grid
        .points()
        .map(|omega| {
            let mut s = T::zero();
            for m in 0..tr.lower.len() {
                let mut x = C::<T>::zero();
                for l in 0..tr.upper.len() {
                    let nu = tr.frequency(l, m);
                    let num = Complex::from_polar(T::one(), (nu - omega) * t) - cre(decay);
                    let den = Complex::new(gamma, nu - omega);
                    x += tr.projections[l].conj() * tr.amplitudes[l][m] * num / den;
                }
                s += x.norm_sqr();
            }
            two_gamma * s
        })
        .collect();
    Ok(SpectrumResult {
        grid,
        values,
        lines,
        gamma,
        initial_state: Some(initial.clone()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak<T: Real> {
    pub position: T,
    pub height: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakThresholds<T: Real> {
    pub min_relative_height: T,
    pub min_separation: T,
}

impl<T: Real> Default for PeakThresholds<T> {
    fn default() -> Self {
        Self {
            min_relative_height: T::lit(1e-3),
            min_separation: T::lit(1.0),
        }
    }
}

/// Local maxima above `min_relative_height · max S`, keeping the higher of
/// any two closer than `min_separation`, refined by a three-point parabola.
pub fn find_peaks<T: Real>(
    spec: &SpectrumResult<T>,
    thresholds: PeakThresholds<T>,
) -> Result<Vec<Peak<T>>> {
    let PeakThresholds {
        min_relative_height,
        min_separation,
    } = thresholds;
    if !(min_relative_height > T::zero()) || !(min_separation > T::zero()) {
        return Err(Error::InvalidParameter {
            name: "peak thresholds",
            reason: "must be positive".into(),
        });
    }
    let y = &spec.values;
    if y.len() < 3 {
        return Ok(Vec::new());
    }
    let global = y.iter().fold(T::zero(), |a, &v| a.max(v));
    if global <= T::zero() {
        return Ok(Vec::new());
    }
    let floor = min_relative_height * global;
    let mut candidates: Vec<(usize, T)> = (1..y.len() - 1)
        .filter(|&i| y[i] > y[i - 1] && y[i] >= y[i + 1] && y[i] >= floor)
        .map(|i| (i, y[i]))
        .collect();
    candidates.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));

    let step = spec.grid.step();
    let mut kept: Vec<usize> = Vec::new();
    for (i, _) in candidates {
        let x = spec.grid.point(i);
        if kept
            .iter()
            .all(|&k| (spec.grid.point(k) - x).abs() >= min_separation)
        {
            kept.push(i);
        }
    }
    let half = T::lit(0.5);
    let mut peaks: Vec<Peak<T>> = kept
        .into_iter()
        .map(|i| {
            let (a, b, c) = (y[i - 1], y[i], y[i + 1]);
            let curv = a - T::lit(2.0) * b + c;
            let offset = if curv < T::zero() {
                half * (a - c) / curv
            } else {
                T::zero()
            };
            Peak {
                position: spec.grid.point(i) + offset * step,
                height: b - T::lit(0.25) * (a - c) * offset,
            }
        })
        .collect();
    peaks.sort_by(|a, b| {
        a.position
            .partial_cmp(&b.position)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(peaks)
}

/// Trapezoidal integral of `S(ω)` over the grid.
pub fn integrated_intensity<T: Real>(spec: &SpectrumResult<T>) -> T {
    let y = &spec.values;
    if y.len() < 2 {
        return T::zero();
    }
    let inner_sum = y[1..y.len() - 1].iter().fold(T::zero(), |a, &v| a + v);
    spec.grid.step() * (inner_sum + T::lit(0.5) * (y[0] + y[y.len() - 1]))
}
