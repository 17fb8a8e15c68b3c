//! LU factorization with partial pivoting.

use alloc::vec::Vec;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::C64;

use super::Mat;

/// Packed LU factors of a square matrix with row pivoting.
#[derive(Debug, Clone)]
pub struct LuFactors {
    lu: Mat,
    pivots: Vec<usize>,
}

impl LuFactors {
    /// Factors `a`, failing with [`Error::SingularTensor`] when a pivot falls
    /// below `min_pivot` in absolute value.
    pub fn factor(a: &Mat, min_pivot: f64) -> Result<LuFactors> {
        assert!(a.is_square(), "LU requires a square matrix");
        let n = a.nrows();
        let mut lu = a.clone();
        let mut pivots = Vec::with_capacity(n);
        for k in 0..n {
            // select pivot row
            let mut best = k;
            let mut best_abs = lu[(k, k)].norm();
            for i in k + 1..n {
                let v = lu[(i, k)].norm();
                if v > best_abs {
                    best = i;
                    best_abs = v;
                }
            }
            if best_abs <= min_pivot {
                return Err(Error::SingularTensor);
            }
            lu.swap_rows(k, best);
            pivots.push(best);
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                if factor.is_zero() {
                    continue;
                }
                for j in k + 1..n {
                    let update = factor * lu[(k, j)];
                    lu[(i, j)] -= update;
                }
            }
        }
        Ok(LuFactors { lu, pivots })
    }

    /// Solves `A x = b` for every column of `b`.
    pub fn solve(&self, b: &Mat) -> Mat {
        let n = self.lu.nrows();
        assert_eq!(b.nrows(), n);
        let mut x = b.clone();
        for (k, &p) in self.pivots.iter().enumerate() {
            x.swap_rows(k, p);
        }
        for j in 0..x.ncols() {
            // forward substitution, unit lower triangle
            for k in 0..n {
                let xk = x[(k, j)];
                if xk.is_zero() {
                    continue;
                }
                for i in k + 1..n {
                    let update = self.lu[(i, k)] * xk;
                    x[(i, j)] -= update;
                }
            }
            // back substitution
            for k in (0..n).rev() {
                let xk = x[(k, j)] / self.lu[(k, k)];
                x[(k, j)] = xk;
                for i in 0..k {
                    let update = self.lu[(i, k)] * xk;
                    x[(i, j)] -= update;
                }
            }
        }
        x
    }

    pub fn solve_vec(&self, b: &[C64]) -> Vec<C64> {
        let rhs = Mat::from_col_major(b.len(), 1, b.to_vec()).expect("column vector");
        self.solve(&rhs).into_data()
    }

    pub fn inverse(&self) -> Mat {
        self.solve(&Mat::identity(self.lu.nrows()))
    }
}

/// One-shot dense solve with a pivot threshold scaled to the matrix norm.
pub fn solve(a: &Mat, b: &Mat) -> Result<Mat> {
    let threshold = 1e-14 * a.frobenius_norm().max(f64::MIN_POSITIVE);
    Ok(LuFactors::factor(a, threshold)?.solve(b))
}
