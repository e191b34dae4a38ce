//! Small dense complex matrices and a Hermitian eigensolver.
//!
//! Every block in this crate has dimension `excitation + 1`, so storage is a
//! plain row-major `Vec` and the eigensolver is cyclic complex Jacobi, which
//! gives eigenvectors orthonormal to working precision.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{cre, Real, C};

#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix<T: Real> {
    rows: usize,
    cols: usize,
    data: Vec<C<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real_diagonal(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = cre(d);
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<C<T>>]) -> Self {
        Self::from_fn(rows, columns.len(), |i, j| columns[j][i])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn column(&self, j: usize) -> Vec<C<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn diagonal(&self) -> Vec<C<T>> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)])
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.scale(cre(s))
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, x| acc.max(x.norm()))
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_deviation(&self, other: &Self) -> T {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |acc, (a, b)| acc.max((*a - *b).norm()))
    }

    pub fn hermitian_deviation(&self) -> T {
        self.max_deviation(&self.adjoint())
    }

    pub fn matvec(&self, v: &[C<T>]) -> Vec<C<T>> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| (0..self.cols).fold(C::zero(), |acc, j| acc + self[(i, j)] * v[j]))
            .collect()
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    /// `self * rhs - rhs * self`.
    pub fn commutator(&self, rhs: &Self) -> Self {
        &self.matmul(rhs) - &rhs.matmul(self)
    }

    pub fn as_slice(&self) -> &[C<T>] {
        &self.data
    }
}

impl<T: Real> Index<(usize, usize)> for CMatrix<T> {
    type Output = C<T>;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for CMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Add for &CMatrix<T> {
    type Output = CMatrix<T>;

    fn add(self, rhs: Self) -> CMatrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| *a + *b)
                .collect(),
        }
    }
}

impl<T: Real> Sub for &CMatrix<T> {
    type Output = CMatrix<T>;

    fn sub(self, rhs: Self) -> CMatrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| *a - *b)
                .collect(),
        }
    }
}

impl<T: Real> Mul for &CMatrix<T> {
    type Output = CMatrix<T>;

    fn mul(self, rhs: Self) -> CMatrix<T> {
        self.matmul(rhs)
    }
}

pub fn inner<T: Real>(a: &[C<T>], b: &[C<T>]) -> C<T> {
    a.iter()
        .zip(b)
        .fold(C::zero(), |acc, (x, y)| acc + x.conj() * *y)
}

pub fn norm<T: Real>(v: &[C<T>]) -> T {
    v.iter().fold(T::zero(), |acc, x| acc + x.norm_sqr()).sqrt()
}

/// Eigen-decomposition of a Hermitian matrix: ascending eigenvalues and the
/// matching orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen<T: Real> {
    pub values: Vec<T>,
    pub vectors: CMatrix<T>,
}

const MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi diagonalization of a Hermitian matrix.
///
/// Only the Hermitian part of `m` is used. Each eigenvector is phased so
/// that its largest-modulus component is real and positive, which makes the
/// output deterministic.
pub fn hermitian_eigen<T: Real>(m: &CMatrix<T>) -> Result<HermitianEigen<T>> {
    if !m.is_square() {
        return Err(Error::BlockMismatch(format!(
            "eigensolver needs a square matrix, got {}x{}",
            m.rows, m.cols
        )));
    }
    let n = m.rows;
    let half = T::lit(0.5);
    let mut a = CMatrix::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * half);
    let mut v = CMatrix::identity(n);

    let total = a.data.iter().fold(T::zero(), |acc, x| acc + x.norm_sqr());
    let threshold = total * T::epsilon() * T::epsilon();

    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let off = off_diagonal_sqr(&a);
        if off <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                jacobi_rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_sqr(&a) > threshold {
        return Err(Error::NoConvergence(MAX_SWEEPS));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[(i, i)]
            .re
            .partial_cmp(&a[(j, j)].re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = CMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    for j in 0..n {
        fix_phase(&mut vectors, j);
    }
    Ok(HermitianEigen { values, vectors })
}

fn off_diagonal_sqr<T: Real>(a: &CMatrix<T>) -> T {
    let mut s = T::zero();
    for i in 0..a.rows {
        for j in 0..a.cols {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s
}

/// Zeroes `a[p][q]` with the unitary `U = diag-phase * Givens`, updating
/// `a <- U^dagger a U` and `v <- v U`.
fn jacobi_rotate<T: Real>(a: &mut CMatrix<T>, v: &mut CMatrix<T>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == T::zero() {
        return;
    }
    let phase = apq / cre(r);
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (T::lit(2.0) * r);
    let t = if tau >= T::zero() {
        T::one() / (tau + (T::one() + tau * tau).sqrt())
    } else {
        -T::one() / (-tau + (T::one() + tau * tau).sqrt())
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = t * c;

    // 2x2 block of U in the (p, q) plane
    let u_pp = cre(c);
    let u_pq = cre(s);
    let u_qp = phase.conj() * cre(-s);
    let u_qq = phase.conj() * cre(c);

    let n = a.rows;
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * u_pp + akq * u_qp;
        a[(k, q)] = akp * u_pq + akq * u_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
        a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    a[(p, q)] = C::zero();
    a[(q, p)] = C::zero();
    a[(p, p)] = cre(a[(p, p)].re);
    a[(q, q)] = cre(a[(q, q)].re);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * u_pp + vkq * u_qp;
        v[(k, q)] = vkp * u_pq + vkq * u_qq;
    }
}

fn fix_phase<T: Real>(vectors: &mut CMatrix<T>, col: usize) {
    let n = vectors.rows;
    let mut best = 0;
    let mut best_abs = T::zero();
    // strict comparison with a small relative margin keeps ties on the first index
    let margin = T::one() + T::lit(1e-9);
    for i in 0..n {
        let a = vectors[(i, col)].norm();
        if a > best_abs * margin {
            best = i;
            best_abs = a;
        }
    }
    if best_abs == T::zero() {
        return;
    }
    let rot = vectors[(best, col)].conj() / cre(best_abs);
    for i in 0..n {
        vectors[(i, col)] *= rot;
    }
    vectors[(best, col)] = cre(best_abs);
}

/// `exp(-i * t * h)` for Hermitian `h`, by diagonalizing `h`.
pub fn unitary_exp<T: Real>(h: &CMatrix<T>, t: T) -> Result<CMatrix<T>> {
    let eig = hermitian_eigen(h)?;
    let n = h.rows;
    let phases: Vec<C<T>> = eig
        .values
        .iter()
        .map(|&e| Complex::from_polar(T::one(), -t * e))
        .collect();
    let vd = CMatrix::from_fn(n, n, |i, j| eig.vectors[(i, j)] * phases[j]);
    Ok(vd.matmul(&eig.vectors.adjoint()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cim;

    fn residual(m: &CMatrix<f64>, e: &HermitianEigen<f64>) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..m.cols() {
            let v = e.vectors.column(j);
            let mv = m.matvec(&v);
            for (a, b) in mv.iter().zip(&v) {
                worst = worst.max((*a - *b * e.values[j]).norm());
            }
        }
        worst
    }

    #[test]
    fn two_by_two_real() {
        let m = CMatrix::<f64>::from_fn(2, 2, |i, j| cre(if i == j { 3.0 } else { 1.0 }));
        let e = hermitian_eigen(&m).unwrap();
        assert!((e.values[0] - 2.0).abs() < 1e-14);
        assert!((e.values[1] - 4.0).abs() < 1e-14);
        assert!(residual(&m, &e) < 1e-14);
    }

    #[test]
    fn complex_hermitian_pauli_y() {
        let m = CMatrix::<f64>::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => cim(-1.0),
            (1, 0) => cim(1.0),
            _ => C::zero(),
        });
        let e = hermitian_eigen(&m).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
        assert!(residual(&m, &e) < 1e-14);
        let s = e.vectors.adjoint().matmul(&e.vectors);
        assert!(s.max_deviation(&CMatrix::identity(2)) < 1e-14);
    }

    #[test]
    fn degenerate_and_empty() {
        let m = CMatrix::<f64>::identity(3).scale_real(2.0);
        let e = hermitian_eigen(&m).unwrap();
        assert_eq!(e.values, vec![2.0; 3]);
        let z = CMatrix::<f64>::zeros(0, 0);
        assert!(hermitian_eigen(&z).unwrap().values.is_empty());
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let h = CMatrix::from_fn(3, 3, |i, j| cre((i + j) as f64));
        let u = unitary_exp(&h, 0.0).unwrap();
        assert!(u.max_deviation(&CMatrix::identity(3)) < 1e-14);
    }

    #[test]
    fn rejects_rectangular() {
        assert!(hermitian_eigen(&CMatrix::<f64>::zeros(2, 3)).is_err());
    }

    #[test]
    fn f32_works() {
        let m = CMatrix::<f32>::from_fn(3, 3, |i, j| cre(1.0 / (1 + i + j) as f32));
        let e = hermitian_eigen(&m).unwrap();
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn hermitian(n: usize) -> impl Strategy<Value = CMatrix<f64>> {
            proptest::collection::vec((-10.0f64..10.0, -10.0f64..10.0), n * n).prop_map(
                move |vals| {
                    let raw = CMatrix::from_fn(n, n, |i, j| {
                        let (re, im) = vals[i * n + j];
                        Complex::new(re, im)
                    });
                    (&raw + &raw.adjoint()).scale_real(0.5)
                },
            )
        }

        proptest! {
            #[test]
            fn eigen_pairs_are_orthonormal_and_exact(m in (1usize..8).prop_flat_map(hermitian)) {
                let e = hermitian_eigen(&m).unwrap();
                let n = m.rows();
                let scale = 1.0 + m.max_abs();
                prop_assert!(residual(&m, &e) <= 1e-10 * scale);
                let s = e.vectors.adjoint().matmul(&e.vectors);
                prop_assert!(s.max_deviation(&CMatrix::identity(n)) <= 1e-12);
                prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
            }
        }
    }
}
