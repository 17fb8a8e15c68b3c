//! Complex Schur decomposition: Hessenberg reduction followed by an
//! implicitly shifted QR iteration with Wilkinson shifts, plus reordering
//! of the triangular factor by unitary swaps of adjacent diagonal entries.

use alloc::vec::Vec;

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::C64;

use super::qr::{make_householder, reflect_left, reflect_right};
use super::{Mat, Rotation};

/// Schur decomposition `a = q t q^H` with `q` unitary and `t` upper
/// triangular; the diagonal of `t` carries the eigenvalues.
#[derive(Debug, Clone)]
pub struct Schur {
    pub q: Mat,
    pub t: Mat,
}

impl Schur {
    pub fn eigenvalues(&self) -> Vec<C64> {
        (0..self.t.nrows()).map(|i| self.t[(i, i)]).collect()
    }
}

/// Unitary reduction to upper Hessenberg form, `a = q h q^H`.
pub fn hessenberg(a: &Mat) -> (Mat, Mat) {
    assert!(a.is_square());
    let n = a.nrows();
    let mut h = a.clone();
    let mut q = Mat::identity(n);
    if n < 3 {
        return (h, q);
    }
    for k in 0..n - 2 {
        let mut v: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let (tau, beta) = make_householder(&mut v);
        h[(k + 1, k)] = C64::new(beta, 0.0);
        for i in k + 2..n {
            h[(i, k)] = C64::zero();
        }
        // similarity H <- P^H H P with P = I - tau v v^H
        reflect_left(&mut h, &v, tau.conj(), k + 1, k + 1..n);
        reflect_right(&mut h, &v, tau, k + 1, 0..n);
        reflect_right(&mut q, &v, tau, k + 1, 0..n);
    }
    (h, q)
}

/// Wilkinson shift: the eigenvalue of the trailing 2x2 block closest to the
/// bottom-right entry.
fn wilkinson_shift(h: &Mat, hi: usize) -> C64 {
    let a = h[(hi - 1, hi - 1)];
    let b = h[(hi - 1, hi)];
    let c = h[(hi, hi - 1)];
    let d = h[(hi, hi)];
    let half_tr = (a + d) * 0.5;
    let det = a * d - b * c;
    let disc = (half_tr * half_tr - det).sqrt();
    let mu1 = half_tr + disc;
    let mu2 = half_tr - disc;
    if (mu1 - d).norm() <= (mu2 - d).norm() {
        mu1
    } else {
        mu2
    }
}

fn subdiagonal_negligible(h: &Mat, i: usize) -> bool {
    let scale = h[(i - 1, i - 1)].norm() + h[(i, i)].norm();
    let scale = if scale == 0.0 {
        h.frobenius_norm()
    } else {
        scale
    };
    h[(i, i - 1)].norm() <= f64::EPSILON * scale
}

/// Complex Schur decomposition via the shifted QR iteration.
pub fn schur(a: &Mat) -> Result<Schur> {
    assert!(a.is_square());
    let n = a.nrows();
    if n == 0 {
        return Ok(Schur {
            q: Mat::identity(0),
            t: Mat::identity(0),
        });
    }
    let (mut h, mut q) = hessenberg(a);
    let max_total = 40 * n.max(1);
    let mut hi = n - 1;
    let mut stagnation = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        // deflate converged eigenvalues at the bottom of the active block
        if subdiagonal_negligible(&h, hi) {
            h[(hi, hi - 1)] = C64::zero();
            hi -= 1;
            stagnation = 0;
            continue;
        }
        // find the top of the active block
        let mut lo = hi;
        while lo > 0 && !subdiagonal_negligible(&h, lo) {
            lo -= 1;
        }
        if lo > 0 {
            h[(lo, lo - 1)] = C64::zero();
        }
        total += 1;
        if total > max_total {
            return Err(Error::ConvergenceFailure {
                what: "QR iteration",
                iterations: total,
            });
        }
        stagnation += 1;
        let shift = if stagnation.is_multiple_of(12) {
            // exceptional shift breaks symmetry-induced stalls
            h[(hi, hi)] + Complex::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(&h, hi)
        };
        // implicit single-shift sweep over the active block
        let mut x = h[(lo, lo)] - shift;
        let mut y = h[(lo + 1, lo)];
        for k in lo..hi {
            let rot = Rotation::zeroing(x, y);
            rot.apply_left(
                &mut h,
                k,
                k + 1,
                lo.saturating_sub(1).min(k.saturating_sub(1))..n,
            );
            rot.apply_right(&mut h, k, k + 1, 0..(k + 3).min(n));
            rot.apply_right(&mut q, k, k + 1, 0..n);
            if k > lo {
                // the rotation has annihilated the bulge below the subdiagonal
                h[(k + 1, k - 1)] = C64::zero();
            }
            if k + 1 < hi {
                x = h[(k + 1, k)];
                y = h[(k + 2, k)];
            }
        }
    }
    // clean the strict lower triangle of residual roundoff
    for j in 0..n {
        for i in j + 1..n {
            h[(i, j)] = C64::zero();
        }
    }
    Ok(Schur { q, t: h })
}

/// Swaps the diagonal entries `t[k,k]` and `t[k+1,k+1]` of an upper
/// triangular `t` by a unitary similarity, updating `q` accordingly.
fn swap_adjacent(t: &mut Mat, q: &mut Mat, k: usize) {
    let n = t.nrows();
    let t11 = t[(k, k)];
    let t12 = t[(k, k + 1)];
    let t22 = t[(k + 1, k + 1)];
    // rotation aligned with the eigenvector [t12; t22 - t11] of t22
    let rot = Rotation::zeroing(t12, t22 - t11);
    rot.apply_left(t, k, k + 1, 0..n);
    rot.apply_right(t, k, k + 1, 0..n);
    rot.apply_right(q, k, k + 1, 0..n);
    t[(k + 1, k)] = C64::zero();
    // diagonal entries swap exactly in exact arithmetic; enforce it
    t[(k, k)] = t22;
    t[(k + 1, k + 1)] = t11;
}

/// Reorders a Schur form so that the selected eigenvalues appear first along
/// the diagonal. Returns the number of selected eigenvalues.
pub fn reorder_schur(t: &mut Mat, q: &mut Mat, select: &[bool]) -> usize {
    let n = t.nrows();
    debug_assert_eq!(select.len(), n);
    let mut sel: Vec<bool> = select.to_vec();
    let mut target = 0usize;
    for _ in 0..n {
        // first selected position at or after the target slot
        let Some(j) = (target..n).find(|&j| sel[j]) else {
            break;
        };
        for k in (target..j).rev() {
            swap_adjacent(t, q, k);
            sel.swap(k, k + 1);
        }
        target += 1;
    }
    target
}

#[cfg(test)]
mod tests {
    use super::super::testutil::*;
    use super::*;
    use crate::rng::Rng;

    fn assert_upper_triangular(t: &Mat, tol: f64) {
        for j in 0..t.ncols() {
            for i in j + 1..t.nrows() {
                assert!(t[(i, j)].norm() <= tol, "t[{i},{j}] = {}", t[(i, j)]);
            }
        }
    }

    #[test]
    fn hessenberg_reconstructs() {
        let mut rng = Rng::seed_from(17);
        for n in [1usize, 2, 3, 6, 10] {
            let a = random_mat(&mut rng, n, n);
            let (h, q) = hessenberg(&a);
            assert_unitary(&q, 1e-12);
            assert_close(&q.matmul(&h).matmul(&q.conj_transpose()), &a, 1e-12);
            for j in 0..n {
                for i in j + 2..n {
                    assert!(h[(i, j)].norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn schur_reconstructs_random() {
        let mut rng = Rng::seed_from(23);
        for n in [1usize, 2, 3, 5, 8, 12] {
            let a = random_mat(&mut rng, n, n);
            let s = schur(&a).unwrap();
            assert_unitary(&s.q, 1e-11);
            assert_upper_triangular(&s.t, 1e-11 * a.frobenius_norm());
            assert_close(&s.q.matmul(&s.t).matmul(&s.q.conj_transpose()), &a, 1e-10);
        }
    }

    #[test]
    fn schur_eigenvalues_of_triangular_input() {
        // an already-triangular matrix must reproduce its diagonal
        let t = Mat::from_rows_real(&[&[3.0, 1.0, 0.5], &[0.0, -2.0, 0.25], &[0.0, 0.0, 7.0]]);
        let s = schur(&t).unwrap();
        let mut eigs: Vec<f64> = s.eigenvalues().iter().map(|z| z.re).collect();
        eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let expected = [-2.0, 3.0, 7.0];
        for (got, want) in eigs.iter().zip(expected) {
            assert!((got - want).abs() < 1e-10);
        }
    }

    #[test]
    fn schur_handles_repeated_eigenvalues() {
        // Jordan-like block: defective matrix with eigenvalue 2 twice
        let a = Mat::from_rows_real(&[&[2.0, 1.0], &[0.0, 2.0]]);
        let s = schur(&a).unwrap();
        for z in s.eigenvalues() {
            assert!((z - C64::new(2.0, 0.0)).norm() < 1e-10);
        }
        // diagonalizable with equal eigenvalues
        let b = Mat::from_rows_real(&[&[5.0, 0.0], &[0.0, 5.0]]);
        let s = schur(&b).unwrap();
        assert_close(&s.t, &b, 1e-12);
    }

    #[test]
    fn reorder_moves_selected_first() {
        let mut rng = Rng::seed_from(31);
        let a = random_mat(&mut rng, 8, 8);
        let s = schur(&a).unwrap();
        let before = s.eigenvalues();
        let select: Vec<bool> = before.iter().map(|z| z.re > 0.0).collect();
        let expected: Vec<C64> = before.iter().filter(|z| z.re > 0.0).cloned().collect();
        let (mut t, mut q) = (s.t.clone(), s.q.clone());
        let count = reorder_schur(&mut t, &mut q, &select);
        assert_eq!(count, expected.len());
        assert_unitary(&q, 1e-11);
        assert_close(&q.matmul(&t).matmul(&q.conj_transpose()), &a, 1e-9);
        // leading diagonal entries are the selected eigenvalues (any order)
        let mut lead: Vec<C64> = (0..count).map(|i| t[(i, i)]).collect();
        for want in expected {
            let pos = lead
                .iter()
                .position(|z| (z - want).norm() < 1e-8)
                .expect("selected eigenvalue in leading block");
            lead.remove(pos);
        }
    }
}
