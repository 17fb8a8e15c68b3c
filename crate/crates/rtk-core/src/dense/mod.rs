//! Dense complex matrices in column-major layout.
//!
//! This is the computational backend behind the unfolding map: every paired
//! tensor stores its entries exactly as the column-major unfolding matrix, so
//! the decompositions here (LU, QR, Schur, Hermitian eigen, SVD, exponential)
//! lift to tensors by construction.

mod expm;
mod hermitian;
mod lu;
mod qr;
mod schur;
mod svd;

pub use expm::expm;
pub use hermitian::herm_eig;
pub use lu::{solve as lu_solve, LuFactors};
pub use qr::qr_full;
pub use schur::{hessenberg, reorder_schur, schur, Schur};
pub use svd::{svd_full, Svd};

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_traits::{Float, Zero};

use crate::error::{Error, Result};
use crate::C64;

/// Dense complex matrix, column-major: entry `(i, j)` lives at `i + j*nrows`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    nrows: usize,
    ncols: usize,
    data: Vec<C64>,
}

impl Mat {
    pub fn zeros(nrows: usize, ncols: usize) -> Mat {
        Mat {
            nrows,
            ncols,
            data: vec![C64::zero(); nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from a column-major data vector.
    pub fn from_col_major(nrows: usize, ncols: usize, data: Vec<C64>) -> Result<Mat> {
        if data.len() != nrows * ncols {
            return Err(Error::ShapeMismatch(format!(
                "data length {} does not match {nrows}x{ncols}",
                data.len()
            )));
        }
        Ok(Mat { nrows, ncols, data })
    }

    pub fn from_fn(nrows: usize, ncols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Mat {
        let mut m = Mat::zeros(nrows, ncols);
        for j in 0..ncols {
            for i in 0..nrows {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Row-major convenience constructor for real entries (tests, fixtures).
    pub fn from_rows_real(rows: &[&[f64]]) -> Mat {
        let nrows = rows.len();
        let ncols = if nrows > 0 { rows[0].len() } else { 0 };
        Mat::from_fn(nrows, ncols, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    pub fn col(&self, j: usize) -> &[C64] {
        &self.data[j * self.nrows..(j + 1) * self.nrows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [C64] {
        let n = self.nrows;
        &mut self.data[j * n..(j + 1) * n]
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.ncols, self.nrows, |i, j| self[(j, i)])
    }

    pub fn conj_transpose(&self) -> Mat {
        Mat::from_fn(self.ncols, self.nrows, |i, j| self[(j, i)].conj())
    }

    pub fn conj(&self) -> Mat {
        Mat {
            nrows: self.nrows,
            ncols: self.ncols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn add(&self, other: &Mat) -> Mat {
        debug_assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        Mat {
            nrows: self.nrows,
            ncols: self.ncols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        debug_assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        Mat {
            nrows: self.nrows,
            ncols: self.ncols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn neg(&self) -> Mat {
        self.scale(C64::new(-1.0, 0.0))
    }

    pub fn scale(&self, factor: C64) -> Mat {
        Mat {
            nrows: self.nrows,
            ncols: self.ncols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    /// Matrix product with a fixed accumulation order (reproducible runs).
    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(
            self.ncols, other.nrows,
            "matmul dimensions {}x{} * {}x{}",
            self.nrows, self.ncols, other.nrows, other.ncols
        );
        let (m, n, p) = (self.nrows, self.ncols, other.ncols);
        let mut out = Mat::zeros(m, p);
        for j in 0..p {
            for k in 0..n {
                let b = other[(k, j)];
                if b.is_zero() {
                    continue;
                }
                let a_col = self.col(k);
                let out_col = out.col_mut(j);
                for i in 0..m {
                    out_col[i] += a_col[i] * b;
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(self.ncols, x.len());
        let mut out = vec![C64::zero(); self.nrows];
        for (k, &xk) in x.iter().enumerate() {
            if xk.is_zero() {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(self.col(k)) {
                *o += a * xk;
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data
            .iter()
            .map(|z| z.norm_sqr())
            .fold(0.0, |a, b| a + b)
            .sqrt()
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        let mut best = 0.0f64;
        for j in 0..self.ncols {
            let s: f64 = self.col(j).iter().map(|z| z.norm()).fold(0.0, |a, b| a + b);
            if s > best {
                best = s;
            }
        }
        best
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let scale = self.frobenius_norm();
        let diff = self.sub(&self.conj_transpose()).frobenius_norm();
        diff <= rel_tol * scale.max(1e-300)
    }

    /// Contiguous rectangular window, copied out.
    pub fn submatrix(&self, row0: usize, col0: usize, nrows: usize, ncols: usize) -> Mat {
        debug_assert!(row0 + nrows <= self.nrows && col0 + ncols <= self.ncols);
        Mat::from_fn(nrows, ncols, |i, j| self[(row0 + i, col0 + j)])
    }

    pub fn set_submatrix(&mut self, row0: usize, col0: usize, block: &Mat) {
        debug_assert!(row0 + block.nrows <= self.nrows && col0 + block.ncols <= self.ncols);
        for j in 0..block.ncols {
            for i in 0..block.nrows {
                self[(row0 + i, col0 + j)] = block[(i, j)];
            }
        }
    }

    /// `[[a, b], [c, d]]` block assembly.
    pub fn block2x2(a: &Mat, b: &Mat, c: &Mat, d: &Mat) -> Mat {
        debug_assert_eq!(a.nrows, b.nrows);
        debug_assert_eq!(c.nrows, d.nrows);
        debug_assert_eq!(a.ncols, c.ncols);
        debug_assert_eq!(b.ncols, d.ncols);
        let mut out = Mat::zeros(a.nrows + c.nrows, a.ncols + b.ncols);
        out.set_submatrix(0, 0, a);
        out.set_submatrix(0, a.ncols, b);
        out.set_submatrix(a.nrows, 0, c);
        out.set_submatrix(a.nrows, a.ncols, d);
        out
    }

    /// Horizontal concatenation.
    pub fn hconcat(blocks: &[&Mat]) -> Mat {
        let nrows = blocks[0].nrows;
        let ncols = blocks.iter().map(|b| b.ncols).sum();
        let mut out = Mat::zeros(nrows, ncols);
        let mut at = 0;
        for b in blocks {
            debug_assert_eq!(b.nrows, nrows);
            out.set_submatrix(0, at, b);
            at += b.ncols;
        }
        out
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.ncols {
            let ja = a + j * self.nrows;
            let jb = b + j * self.nrows;
            self.data.swap(ja, jb);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let n = self.nrows;
        for i in 0..n {
            self.data.swap(i + a * n, i + b * n);
        }
    }

    /// Classical matrix Kronecker product `self (x) other`.
    pub fn kron(&self, other: &Mat) -> Mat {
        let (m, n) = (self.nrows, self.ncols);
        let (p, q) = (other.nrows, other.ncols);
        let mut out = Mat::zeros(m * p, n * q);
        for j in 0..n {
            for i in 0..m {
                let a = self[(i, j)];
                if a.is_zero() {
                    continue;
                }
                for l in 0..q {
                    for k in 0..p {
                        out[(i * p + k, j * q + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }
}

impl Index<(usize, usize)> for Mat {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.nrows && j < self.ncols);
        &self.data[i + j * self.nrows]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.nrows && j < self.ncols);
        &mut self.data[i + j * self.nrows]
    }
}

/// Plane rotation `G = [[conj(a), conj(b)], [-b, a]] / r` with
/// `G * [a; b] = [r; 0]` and `r = sqrt(|a|^2 + |b|^2)` real nonnegative.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Rotation {
    pub ca: C64,
    pub cb: C64,
}

impl Rotation {
    pub fn zeroing(a: C64, b: C64) -> Rotation {
        let r = Float::sqrt(a.norm_sqr() + b.norm_sqr());
        if r == 0.0 {
            return Rotation {
                ca: C64::new(1.0, 0.0),
                cb: C64::zero(),
            };
        }
        Rotation {
            ca: a.conj() / r,
            cb: b.conj() / r,
        }
    }

    /// Applies `G` to rows `(p, q)` of `m`, columns `cols`.
    pub fn apply_left(&self, m: &mut Mat, p: usize, q: usize, cols: core::ops::Range<usize>) {
        for j in cols {
            let x = m[(p, j)];
            let y = m[(q, j)];
            m[(p, j)] = self.ca * x + self.cb * y;
            m[(q, j)] = -self.cb.conj() * x + self.ca.conj() * y;
        }
    }

    /// Applies `G^H` to columns `(p, q)` of `m`, rows `rows`.
    pub fn apply_right(&self, m: &mut Mat, p: usize, q: usize, rows: core::ops::Range<usize>) {
        for i in rows {
            let x = m[(i, p)];
            let y = m[(i, q)];
            m[(i, p)] = x * self.ca.conj() + y * self.cb.conj();
            m[(i, q)] = -x * self.cb + y * self.ca;
        }
    }
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;
    use crate::rng::Rng;

    pub fn random_mat(rng: &mut Rng, nrows: usize, ncols: usize) -> Mat {
        Mat::from_fn(nrows, ncols, |_, _| C64::new(rng.normal(), rng.normal()))
    }

    pub fn random_hermitian(rng: &mut Rng, n: usize) -> Mat {
        let a = random_mat(rng, n, n);
        a.add(&a.conj_transpose()).scale(C64::new(0.5, 0.0))
    }

    pub fn assert_close(a: &Mat, b: &Mat, tol: f64) {
        let scale = a.frobenius_norm().max(b.frobenius_norm()).max(1.0);
        let diff = a.sub(b).frobenius_norm();
        assert!(
            diff <= tol * scale,
            "matrices differ: |a-b| = {diff:e}, scale {scale:e}"
        );
    }

    pub fn assert_unitary(q: &Mat, tol: f64) {
        let eye = Mat::identity(q.ncols());
        let prod = q.conj_transpose().matmul(q);
        assert_close(&prod, &eye, tol);
    }
}

#[cfg(test)]
mod tests {
    use super::testutil::*;
    use super::*;
    use crate::rng::Rng;

    #[test]
    fn matmul_identity() {
        let mut rng = Rng::seed_from(7);
        let a = random_mat(&mut rng, 4, 3);
        let eye = Mat::identity(4);
        assert_close(&eye.matmul(&a), &a, 1e-15);
    }

    #[test]
    fn rotation_zeroes_second_entry() {
        let mut rng = Rng::seed_from(11);
        for _ in 0..20 {
            let a = C64::new(rng.normal(), rng.normal());
            let b = C64::new(rng.normal(), rng.normal());
            let g = Rotation::zeroing(a, b);
            let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
            let top = g.ca * a + g.cb * b;
            let bottom = -g.cb.conj() * a + g.ca.conj() * b;
            assert!((top.re - r).abs() < 1e-12 && top.im.abs() < 1e-12);
            assert!(bottom.norm() < 1e-12);
            // unitarity
            assert!((g.ca.norm_sqr() + g.cb.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn kron_matches_definition() {
        let a = Mat::from_rows_real(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let b = Mat::from_rows_real(&[&[0.0, 5.0], &[6.0, 7.0]]);
        let k = a.kron(&b);
        assert_eq!(k.nrows(), 4);
        for i in 0..2 {
            for j in 0..2 {
                for p in 0..2 {
                    for q in 0..2 {
                        let got = k[(i * 2 + p, j * 2 + q)];
                        let want = a[(i, j)] * b[(p, q)];
                        assert!((got - want).norm() < 1e-15);
                    }
                }
            }
        }
    }
}
