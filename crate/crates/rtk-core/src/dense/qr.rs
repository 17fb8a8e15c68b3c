//! Householder reflectors and QR with full unitary factor.

use num_complex::Complex;
use num_traits::{Float, Zero};

use crate::C64;

use super::Mat;

/// Elementary reflector `H = I - tau v v^H` (with `v[0] = 1`) such that
/// `H^H x = beta e_1`, beta real. Overwrites `x` with `v` and returns
/// `(tau, beta)`.
pub(crate) fn make_householder(x: &mut [C64]) -> (C64, f64) {
    let alpha = x[0];
    let tail_norm_sqr: f64 = x[1..].iter().map(|z| z.norm_sqr()).sum();
    if tail_norm_sqr == 0.0 && alpha.im == 0.0 {
        x[0] = C64::new(1.0, 0.0);
        return (C64::zero(), alpha.re);
    }
    let norm = Float::sqrt(alpha.norm_sqr() + tail_norm_sqr);
    let beta = if alpha.re >= 0.0 { -norm } else { norm };
    let tau = C64::new((beta - alpha.re) / beta, -alpha.im / beta);
    let scale = (alpha - Complex::new(beta, 0.0)).inv();
    for z in &mut x[1..] {
        *z *= scale;
    }
    x[0] = C64::new(1.0, 0.0);
    (tau, beta)
}

/// Applies `I - tau v v^H` to rows `row0..row0+v.len()` of columns `cols`.
pub(crate) fn reflect_left(
    m: &mut Mat,
    v: &[C64],
    tau: C64,
    row0: usize,
    cols: core::ops::Range<usize>,
) {
    if tau.is_zero() {
        return;
    }
    for j in cols {
        let mut dot = C64::zero();
        for (k, &vk) in v.iter().enumerate() {
            dot += vk.conj() * m[(row0 + k, j)];
        }
        let scaled = tau * dot;
        for (k, &vk) in v.iter().enumerate() {
            let update = scaled * vk;
            m[(row0 + k, j)] -= update;
        }
    }
}

/// Applies `I - tau v v^H` from the right to columns
/// `col0..col0+v.len()` of rows `rows`.
pub(crate) fn reflect_right(
    m: &mut Mat,
    v: &[C64],
    tau: C64,
    col0: usize,
    rows: core::ops::Range<usize>,
) {
    if tau.is_zero() {
        return;
    }
    for i in rows {
        let mut dot = C64::zero();
        for (k, &vk) in v.iter().enumerate() {
            dot += m[(i, col0 + k)] * vk;
        }
        let scaled = tau * dot;
        for (k, &vk) in v.iter().enumerate() {
            let update = scaled * vk.conj();
            m[(i, col0 + k)] -= update;
        }
    }
}

/// Full QR factorization `a = Q R` with `Q` m-by-m unitary and `R` upper
/// triangular; the pivotal diagonal entries of `R` come out real.
pub fn qr_full(a: &Mat) -> (Mat, Mat) {
    let (m, n) = (a.nrows(), a.ncols());
    let mut r = a.clone();
    let mut q = Mat::identity(m);
    let steps = n.min(m.saturating_sub(1));
    for k in 0..steps {
        let mut v: alloc::vec::Vec<C64> = (k..m).map(|i| r[(i, k)]).collect();
        let (tau, beta) = make_householder(&mut v);
        r[(k, k)] = C64::new(beta, 0.0);
        for i in k + 1..m {
            r[(i, k)] = C64::zero();
        }
        // R <- H^H R, Q <- Q H keeps a = Q R invariant
        reflect_left(&mut r, &v, tau.conj(), k, k + 1..n);
        reflect_right(&mut q, &v, tau, k, 0..m);
    }
    (q, r)
}
