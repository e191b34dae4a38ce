//! Block eigensystems: the rotated zeroth-order solution, first-order
//! corrections from the rotated `H'`, and a dense diagonalization reference.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::fock::{rotation_y, FockBlock, OperatorMap};
use crate::linalg::{hermitian_eigen, inner, norm, CMatrix};
use crate::models::{block_hamiltonian, h0_block, hprime_block, ModelKind, ModelParams};
use crate::scalar::{cre, Real, C};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Zeroth,
    FirstOrder,
    ExactNumeric,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Zeroth => "zeroth",
            Method::FirstOrder => "first_order",
            Method::ExactNumeric => "exact_numeric",
        }
    }
}

/// `(j, m)` tag stored as `(2j, 2m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StateLabel {
    pub two_j: i64,
    pub two_m: i64,
}

impl StateLabel {
    pub fn j<T: Real>(&self) -> T {
        T::from_i64(self.two_j).unwrap() * T::lit(0.5)
    }

    pub fn m<T: Real>(&self) -> T {
        T::from_i64(self.two_m).unwrap() * T::lit(0.5)
    }
}

/// Energies (ascending) and eigenvectors of one block.
#[derive(Debug, Clone)]
pub struct EigenSystem<T: Real> {
    block: FockBlock,
    method: Method,
    energies: Vec<T>,
    /// Eigenvectors as columns, over the block basis.
    states: CMatrix<T>,
    labels: Vec<StateLabel>,
}

impl<T: Real> EigenSystem<T> {
    fn from_unsorted(
        block: FockBlock,
        method: Method,
        mut entries: Vec<(T, StateLabel, Vec<C<T>>)>,
    ) -> Self {
        entries.sort_by(|a, b| {
            a.0.partial_cmp(&b.0)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.1.two_m.cmp(&b.1.two_m))
        });
        let dim = block.dimension();
        let columns: Vec<Vec<C<T>>> = entries.iter().map(|e| e.2.clone()).collect();
        Self {
            block,
            method,
            energies: entries.iter().map(|e| e.0).collect(),
            states: CMatrix::from_columns(dim, &columns),
            labels: entries.iter().map(|e| e.1).collect(),
        }
    }

    pub fn block(&self) -> FockBlock {
        self.block
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn energies(&self) -> &[T] {
        &self.energies
    }

    pub fn states(&self) -> &CMatrix<T> {
        &self.states
    }

    pub fn state(&self, k: usize) -> Vec<C<T>> {
        self.states.column(k)
    }

    pub fn labels(&self) -> &[StateLabel] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// Largest entry of `|S - I|` with `S` the overlap matrix of the states.
    pub fn overlap_deviation(&self) -> T {
        self.states
            .adjoint()
            .matmul(&self.states)
            .max_deviation(&CMatrix::identity(self.len()))
    }

    /// Largest `‖Hψ - Eψ‖` over the states.
    pub fn residual(&self, h: &OperatorMap<T>) -> Result<T> {
        let mut worst = T::zero();
        for (k, &e) in self.energies.iter().enumerate() {
            let psi = self.state(k);
            let h_psi = h.apply(&psi)?;
            let r: Vec<C<T>> = h_psi
                .iter()
                .zip(&psi)
                .map(|(a, b)| *a - *b * cre(e))
                .collect();
            worst = worst.max(norm(&r));
        }
        Ok(worst)
    }
}

/// Solution of `H0 = ΩN + 2g J_x` through `J_x = R J_z R†`, `R = exp(-iπ/2 J_y)`.
pub fn zeroth_spectrum<T: Real>(
    params: &ModelParams<T>,
    excitation: usize,
) -> Result<EigenSystem<T>> {
    let block = FockBlock::new(excitation);
    let r = rotation_y(block, T::FRAC_PI_2())?;
    let m = block.m_labels::<T>();
    let base = params.omega * T::from_count(excitation);
    let two = T::lit(2.0);
    let entries = (0..block.dimension())
        .map(|k| {
            (
                base + two * params.coupling_g * m[k],
                StateLabel {
                    two_j: block.two_j(),
                    two_m: block.two_m(k),
                },
                r.entries().column(k),
            )
        })
        .collect();
    let eig = EigenSystem::from_unsorted(block, Method::Zeroth, entries);

    let h0 = h0_block(params, excitation)?;
    for (k, &e) in eig.energies.iter().enumerate() {
        let psi = eig.state(k);
        let hpsi = h0.apply(&psi)?;
        let r: Vec<C<T>> = hpsi
            .iter()
            .zip(&psi)
            .map(|(a, b)| *a - *b * cre(e))
            .collect();
        let res = norm(&r);
        let tol = T::tolerance(1e-10) * e.abs().max(T::one());
        if res > tol {
            return Err(Error::Domain(format!(
                "rotated state {k} is not an H0 eigenvector: residual {res}"
            )));
        }
    }
    Ok(eig)
}

/// `R† H' R` in the `|jm⟩` basis, by direct matrix products.
pub fn hprime_rotated<T: Real>(
    params: &ModelParams<T>,
    excitation: usize,
) -> Result<OperatorMap<T>> {
    let block = FockBlock::new(excitation);
    let r = rotation_y(block, T::FRAC_PI_2())?;
    let hp = hprime_block(params, excitation)?;
    r.adjoint().compose(&hp)?.compose(&r)?.into_hermitian()
}

/// Closed-form first-order energy of the state `(j, m)`:
///
/// `ΩN + 2gm + (Ω/N)(j² - m²) + ((Ω+g)/4N)(j+m)(j+m-1) + ((Ω-g)/4N)(j-m)(j-m-1)`.
pub fn closed_form_energy<T: Real>(params: &ModelParams<T>, label: StateLabel) -> T {
    let j: T = label.j();
    let m: T = label.m();
    let n = T::from_u64(params.n_molecules).unwrap();
    let (omega, g) = (params.omega, params.coupling_g);
    let four_n = T::lit(4.0) * n;
    let excitation = T::from_i64(label.two_j).unwrap();
    omega * excitation
        + T::lit(2.0) * m * g
        + omega / n * (j * j - m * m)
        + (omega + g) / four_n * (j + m) * (j + m - T::one())
        + (omega - g) / four_n * (j - m) * (j - m - T::one())
}

fn require_nondegenerate<T: Real>(params: &ModelParams<T>, excitation: usize) -> Result<()> {
    if excitation > 0 && params.coupling_g <= T::zero() {
        return Err(Error::DegenerateSpectrum);
    }
    Ok(())
}

/// First-order energies and labels in `|jm⟩` storage order (m descending).
fn first_order_in_basis_order<T: Real>(
    params: &ModelParams<T>,
    excitation: usize,
) -> Result<(Vec<T>, Vec<T>, OperatorMap<T>)> {
    require_nondegenerate(params, excitation)?;
    let block = FockBlock::new(excitation);
    let hr = hprime_rotated(params, excitation)?;
    let m = block.m_labels::<T>();
    let base = params.omega * T::from_count(excitation);
    let two = T::lit(2.0);
    let zeroth: Vec<T> = m
        .iter()
        .map(|&m| base + two * params.coupling_g * m)
        .collect();
    let first: Vec<T> = zeroth
        .iter()
        .enumerate()
        .map(|(k, &e0)| e0 + hr.get(k, k).re)
        .collect();

    let tol = T::tolerance(1e-10) * params.omega;
    for (k, &e) in first.iter().enumerate() {
        let label = StateLabel {
            two_j: block.two_j(),
            two_m: block.two_m(k),
        };
        let closed = closed_form_energy(params, label);
        if (closed - e).abs() > tol {
            return Err(Error::ClosedFormMismatch((closed - e).abs().to_f64_lossy()));
        }
    }
    Ok((zeroth, first, hr))
}

/// First-order energies, ascending.
pub fn first_order_energies<T: Real>(params: &ModelParams<T>, excitation: usize) -> Result<Vec<T>> {
    let (_, mut first, _) = first_order_in_basis_order(params, excitation)?;
    first.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    Ok(first)
}

fn first_order_system<T: Real>(
    params: &ModelParams<T>,
    excitation: usize,
    normalize: bool,
) -> Result<EigenSystem<T>> {
    let (zeroth, first, hr) = first_order_in_basis_order(params, excitation)?;
    let block = FockBlock::new(excitation);
    let dim = block.dimension();
    let r = rotation_y(block, T::FRAC_PI_2())?;

    let mut entries = Vec::with_capacity(dim);
    for k in 0..dim {
        // coefficients in the rotated basis: 1 on k, H'_nk / (E_k - E_n) elsewhere
        let coeffs: Vec<C<T>> = (0..dim)
            .map(|n| {
                if n == k {
                    cre(T::one())
                } else {
                    hr.get(n, k) / cre(zeroth[k] - zeroth[n])
                }
            })
            .collect();
        let mut psi = r.entries().matvec(&coeffs);
        if normalize {
            let len = norm(&psi);
            psi.iter_mut().for_each(|x| *x /= cre(len));
        }
        let label = StateLabel {
            two_j: block.two_j(),
            two_m: block.two_m(k),
        };
        entries.push((first[k], label, psi));
    }
    Ok(EigenSystem::from_unsorted(
        block,
        Method::FirstOrder,
        entries,
    ))
}

/// First-order states `ψ_k = ψ⁰_k + Σ_{n≠k} H'_nk/(E⁰_k - E⁰_n) ψ⁰_n`,
/// renormalized to unit length.
pub fn first_order_states<T: Real>(
    params: &ModelParams<T>,
    excitation: usize,
) -> Result<EigenSystem<T>> {
    first_order_system(params, excitation, true)
}

/// The same sum without the final renormalization.
pub fn first_order_states_unnormalized<T: Real>(
    params: &ModelParams<T>,
    excitation: usize,
) -> Result<EigenSystem<T>> {
    first_order_system(params, excitation, false)
}

/// Bound on the overlap deviation of first-order states:
/// `dim · (max|H'_nk| / 2g)²` over off-diagonal rotated elements.
pub fn first_order_overlap_bound<T: Real>(params: &ModelParams<T>, excitation: usize) -> Result<T> {
    require_nondegenerate(params, excitation)?;
    let hr = hprime_rotated(params, excitation)?;
    let dim = hr.source().dimension();
    let mut off = T::zero();
    for i in 0..dim {
        for j in 0..dim {
            if i != j {
                off = off.max(hr.get(i, j).norm());
            }
        }
    }
    let c = off / (T::lit(2.0) * params.coupling_g);
    Ok(T::from_count(dim) * c * c)
}

/// Dense Hermitian diagonalization of the effective or Dicke block.
pub fn exact_block_spectrum<T: Real>(
    params: &ModelParams<T>,
    excitation: usize,
    kind: ModelKind,
) -> Result<EigenSystem<T>> {
    let h = block_hamiltonian(params, excitation, kind)?;
    let eig = hermitian_eigen(h.entries())?;
    let block = FockBlock::new(excitation);
    let entries = eig
        .values
        .iter()
        .enumerate()
        .map(|(rank, &e)| {
            let label = StateLabel {
                two_j: block.two_j(),
                two_m: 2 * rank as i64 - block.two_j(),
            };
            (e, label, eig.vectors.column(rank))
        })
        .collect();
    let sys = EigenSystem::from_unsorted(block, Method::ExactNumeric, entries);

    let scale = sys
        .energies
        .iter()
        .fold(T::one(), |acc, e| acc.max(e.abs()));
    let res = sys.residual(&h)?;
    if res > T::tolerance(1e-10) * scale {
        return Err(Error::Domain(format!(
            "eigenvector residual {res} too large"
        )));
    }
    Ok(sys)
}

/// Spectral decomposition `U(t) = Σ exp(-iEt) |ψ⟩⟨ψ|` of one block.
#[derive(Debug, Clone)]
pub struct Propagator<T: Real> {
    block: FockBlock,
    terms: Vec<(T, Vec<C<T>>)>,
}

pub fn evolution_decomposition<T: Real>(eig: &EigenSystem<T>) -> Result<Propagator<T>> {
    let dev = eig.overlap_deviation();
    if dev > T::tolerance(1e-10) {
        return Err(Error::NotOrthonormal(dev.to_f64_lossy()));
    }
    Ok(Propagator {
        block: eig.block(),
        terms: (0..eig.len())
            .map(|k| (eig.energies()[k], eig.state(k)))
            .collect(),
    })
}

impl<T: Real> Propagator<T> {
    pub fn terms(&self) -> &[(T, Vec<C<T>>)] {
        &self.terms
    }

    pub fn at(&self, t: T) -> OperatorMap<T> {
        let dim = self.block.dimension();
        let mut u = CMatrix::zeros(dim, dim);
        for (e, psi) in &self.terms {
            let phase = Complex::from_polar(T::one(), -*e * t);
            for i in 0..dim {
                for j in 0..dim {
                    u[(i, j)] += phase * psi[i] * psi[j].conj();
                }
            }
        }
        OperatorMap::new(self.block, self.block, u).expect("propagator is square on its block")
    }
}

/// Printed nine-term table for `⟨m'j| R† H' R |jm⟩`, evaluated literally.
///
/// Diagnostic only: [`hprime_rotated`] is authoritative.
pub fn tabulated_hprime_rotated<T: Real>(
    params: &ModelParams<T>,
    excitation: usize,
) -> OperatorMap<T> {
    let block = FockBlock::new(excitation);
    let dim = block.dimension();
    let j: T = block.j();
    let n = T::from_u64(params.n_molecules).unwrap();
    let (omega, g) = (params.omega, params.coupling_g);
    let one = T::one();
    let two = T::lit(2.0);
    let q = one / (T::lit(4.0) * n);
    let sq = |x: T| x.max(T::zero()).sqrt();
    let mut out = CMatrix::zeros(dim, dim);
    let m_labels = block.m_labels::<T>();
    for col in 0..dim {
        let m = m_labels[col];
        let mut put = |dm: i64, v: T| {
            let row = col as i64 - dm;
            if row >= 0 && (row as usize) < dim {
                let r = row as usize;
                out[(r, col)] += cre(v);
            }
        };
        put(
            -2,
            omega * q * sq((j + m) * (j + m - one)) * sq((j - m + one) * (j - m + two)),
        );
        put(
            2,
            omega * q * sq((j + m + one) * (j + m + two)) * sq((j - m) * (j - m - one)),
        );
        put(
            1,
            (two * omega - g) * q * sq((j - m) * (j + m + one)) * (j - m - one),
        );
        put(
            1,
            (two * omega + g) * q * sq((j - m) * (j + m + one)) * (j + m),
        );
        put(
            -1,
            (two * omega + g) * q * sq((j + m) * (j - m + one)) * (j + m - one),
        );
        put(
            -1,
            (two * omega - g) / n * sq((j + m) * (j - m + one)) * (j - m),
        );
        put(0, (omega + g) * q * (j + m) * (j + m - one));
        put(0, (omega - g) * q * (j - m) * (j - m - one));
        put(0, omega / n * (j * j - m * m));
    }
    OperatorMap::new(block, block, out).expect("square table")
}

/// Discrepancy between the printed table and the direct rotation for one
/// `m' - m` offset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableDiscrepancy<T: Real> {
    /// `m' - m`.
    pub offset: i64,
    /// Largest `|table - direct|`.
    pub signed: T,
    /// Largest `||table| - |direct||`, insensitive to phase conventions.
    pub magnitude: T,
}

pub fn hprime_table_discrepancy<T: Real>(
    params: &ModelParams<T>,
    excitation: usize,
) -> Result<Vec<TableDiscrepancy<T>>> {
    let direct = hprime_rotated(params, excitation)?;
    let table = tabulated_hprime_rotated(params, excitation);
    let dim = excitation + 1;
    let mut out = Vec::new();
    for offset in -2i64..=2 {
        let mut d = TableDiscrepancy {
            offset,
            signed: T::zero(),
            magnitude: T::zero(),
        };
        for col in 0..dim {
            // m' - m = offset  <=>  row = col - offset
            let row = col as i64 - offset;
            if row < 0 || row as usize >= dim {
                continue;
            }
            let (a, b) = (table.get(row as usize, col), direct.get(row as usize, col));
            d.signed = d.signed.max((a - b).norm());
            d.magnitude = d.magnitude.max((a.norm() - b.norm()).abs());
        }
        out.push(d);
    }
    Ok(out)
}

pub fn overlap<T: Real>(a: &[C<T>], b: &[C<T>]) -> C<T> {
    inner(a, b)
}
