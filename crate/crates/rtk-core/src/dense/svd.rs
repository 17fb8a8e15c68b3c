//! Singular value decomposition by one-sided Jacobi rotations.

use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::C64;

use super::qr::qr_full;
use super::Mat;

const MAX_SWEEPS: usize = 60;

/// Full SVD `a = u diag(s) v^H`: `u` and `v` square unitary, singular values
/// nonincreasing.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: Mat,
    pub s: Vec<f64>,
    pub v: Mat,
}

impl Svd {
    pub fn sigma_max(&self) -> f64 {
        self.s.first().copied().unwrap_or(0.0)
    }

    /// Numerical rank at a relative threshold.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let cutoff = rel_tol * self.sigma_max();
        self.s.iter().take_while(|&&s| s > cutoff).count()
    }

    /// Rebuilds the rectangular diagonal factor.
    pub fn sigma_mat(&self, nrows: usize, ncols: usize) -> Mat {
        let mut d = Mat::zeros(nrows, ncols);
        for (i, &s) in self.s.iter().enumerate().take(nrows.min(ncols)) {
            d[(i, i)] = C64::new(s, 0.0);
        }
        d
    }
}

/// Computes the full SVD of an arbitrary rectangular complex matrix.
pub fn svd_full(a: &Mat) -> Result<Svd> {
    let (m, n) = (a.nrows(), a.ncols());
    if m < n {
        // factor the conjugate transpose and swap the unitary factors
        let svd = svd_full(&a.conj_transpose())?;
        return Ok(Svd {
            u: svd.v,
            s: svd.s,
            v: svd.u,
        });
    }
    let mut w = a.clone();
    let mut v = Mat::identity(n);
    let scale = w.frobenius_norm();
    if scale == 0.0 {
        return Ok(Svd {
            u: Mat::identity(m),
            s: alloc::vec![0.0; n],
            v,
        });
    }
    let mut converged = false;
    for _sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        for q in 1..n {
            for p in 0..q {
                let mut alpha = 0.0f64;
                let mut beta = 0.0f64;
                let mut gamma = C64::new(0.0, 0.0);
                for i in 0..m {
                    let wp = w[(i, p)];
                    let wq = w[(i, q)];
                    alpha += wp.norm_sqr();
                    beta += wq.norm_sqr();
                    gamma += wp.conj() * wq;
                }
                let mag = gamma.norm();
                // relative orthogonality criterion keeps small singular
                // values meaningful on graded matrices
                if mag <= f64::EPSILON * Float::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                // Jacobi rotation diagonalizing [[alpha, gamma], [conj, beta]]
                let phase = gamma / mag;
                let theta = (beta - alpha) / (2.0 * mag);
                let t = if theta >= 0.0 {
                    -1.0 / (theta + Float::sqrt(1.0 + theta * theta))
                } else {
                    1.0 / (-theta + Float::sqrt(1.0 + theta * theta))
                };
                let c = 1.0 / Float::sqrt(1.0 + t * t);
                let s = t * c;
                let gpp = C64::new(c, 0.0);
                let gpq = C64::new(-s, 0.0);
                let gqp = phase.conj() * s;
                let gqq = phase.conj() * c;
                for i in 0..m {
                    let wp = w[(i, p)];
                    let wq = w[(i, q)];
                    w[(i, p)] = wp * gpp + wq * gqp;
                    w[(i, q)] = wp * gpq + wq * gqq;
                }
                for i in 0..n {
                    let vp = v[(i, p)];
                    let vq = v[(i, q)];
                    v[(i, p)] = vp * gpp + vq * gqp;
                    v[(i, q)] = vp * gpq + vq * gqq;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::ConvergenceFailure {
            what: "Jacobi SVD iteration",
            iterations: MAX_SWEEPS,
        });
    }

    // singular values and column ordering
    let mut order: Vec<(f64, usize)> = (0..n)
        .map(|j| {
            let norm = Float::sqrt(w.col(j).iter().map(|z| z.norm_sqr()).sum::<f64>());
            (norm, j)
        })
        .collect();
    order.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let s: Vec<f64> = order.iter().map(|o| o.0).collect();

    let mut v_sorted = Mat::zeros(n, n);
    for (dst, &(_, src)) in order.iter().enumerate() {
        for i in 0..n {
            v_sorted[(i, dst)] = v[(i, src)];
        }
    }

    // left singular vectors for the numerically nonzero part
    let cutoff = s[0] * 1e-14;
    let rank = s.iter().take_while(|&&x| x > cutoff).count();
    let mut u = Mat::zeros(m, m);
    for dst in 0..rank {
        let src = order[dst].1;
        let inv = 1.0 / s[dst];
        for i in 0..m {
            u[(i, dst)] = w[(i, src)] * inv;
        }
    }
    if rank < m {
        // complete to a unitary basis: QR of the computed columns yields an
        // orthonormal complement in its trailing columns
        let partial = u.submatrix(0, 0, m, rank.max(1));
        let (q, _) = qr_full(&partial);
        for dst in rank..m {
            for i in 0..m {
                u[(i, dst)] = q[(i, dst)];
            }
        }
        if rank == 0 {
            u = Mat::identity(m);
        }
    }

    Ok(Svd { u, s, v: v_sorted })
}
