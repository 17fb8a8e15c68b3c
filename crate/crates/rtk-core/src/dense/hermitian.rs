//! Hermitian eigendecomposition by the two-sided complex Jacobi method.

use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::C64;

use super::Mat;

const MAX_SWEEPS: usize = 60;

/// Eigendecomposition of a Hermitian matrix: `a = v diag(w) v^H` with real
/// eigenvalues `w` in ascending order and unitary `v`.
///
/// The caller is responsible for `a` being Hermitian; only the lower/upper
/// averaged part is used.
pub fn herm_eig(a: &Mat) -> Result<(Vec<f64>, Mat)> {
    assert!(a.is_square());
    let n = a.nrows();
    // work on the Hermitian average so tiny asymmetries cannot bias sweeps
    let mut m = a.add(&a.conj_transpose()).scale(C64::new(0.5, 0.0));
    let mut v = Mat::identity(n);
    let scale = m.frobenius_norm().max(f64::MIN_POSITIVE);
    let stop = f64::EPSILON * scale;

    for _sweep in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for q in 1..n {
            for p in 0..q {
                off = off.max(m[(p, q)].norm());
            }
        }
        if off <= stop {
            let mut eig: Vec<(f64, usize)> = (0..n).map(|i| (m[(i, i)].re, i)).collect();
            eig.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            let values: Vec<f64> = eig.iter().map(|e| e.0).collect();
            let mut vectors = Mat::zeros(n, n);
            for (dst, &(_, src)) in eig.iter().enumerate() {
                for i in 0..n {
                    vectors[(i, dst)] = v[(i, src)];
                }
            }
            return Ok((values, vectors));
        }
        for q in 1..n {
            for p in 0..q {
                let apq = m[(p, q)];
                let mag = apq.norm();
                if mag <= stop * 1e-2 {
                    continue;
                }
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                // phase removal turns the 2x2 problem real symmetric
                let phase = apq / mag;
                let tau = (app - aqq) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + Float::sqrt(1.0 + tau * tau))
                } else {
                    -1.0 / (-tau + Float::sqrt(1.0 + tau * tau))
                };
                let c = 1.0 / Float::sqrt(1.0 + t * t);
                let s = t * c;
                // columns (p,q) combine by g = [[c, -s], [s*phase', c*phase']]
                let gpp = C64::new(c, 0.0);
                let gpq = C64::new(-s, 0.0);
                let gqp = phase.conj() * s;
                let gqq = phase.conj() * c;
                // m <- g^H m g
                for i in 0..n {
                    let mip = m[(i, p)];
                    let miq = m[(i, q)];
                    m[(i, p)] = mip * gpp + miq * gqp;
                    m[(i, q)] = mip * gpq + miq * gqq;
                }
                for j in 0..n {
                    let mpj = m[(p, j)];
                    let mqj = m[(q, j)];
                    m[(p, j)] = gpp.conj() * mpj + gqp.conj() * mqj;
                    m[(q, j)] = gpq.conj() * mpj + gqq.conj() * mqj;
                }
                m[(p, q)] = C64::new(0.0, 0.0);
                m[(q, p)] = C64::new(0.0, 0.0);
                m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = C64::new(m[(q, q)].re, 0.0);
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * gpp + viq * gqp;
                    v[(i, q)] = vip * gpq + viq * gqq;
                }
            }
        }
    }
    Err(Error::ConvergenceFailure {
        what: "Jacobi eigenvalue iteration",
        iterations: MAX_SWEEPS,
    })
}
