//! Continuous-time multilinear time-invariant (MLTI) system analysis:
//! transfer functions, stability and stabilizability tests, H-infinity
//! norm computation by Hamiltonian bisection, the bounded real lemma and
//! the LQR gain.

use alloc::vec::Vec;

use num_traits::Float;

use crate::dense::{svd_full, LuFactors, Mat};
use crate::equations::{arte_schur_solve, ArteProblem, ArteReport};
use crate::error::{Error, Result};
use crate::spectral::{self, hamiltonian_assemble, u_eigenvalues, HamiltonianBlocks};
use crate::tensor::PairedTensor;
use crate::C64;

/// Continuous-time MLTI system `X' = A*X + B*U`, `Y = C*X + D*U`.
#[derive(Debug, Clone)]
pub struct MltiSystem {
    pub a: PairedTensor,
    pub b: PairedTensor,
    pub c: PairedTensor,
    pub d: PairedTensor,
}

impl MltiSystem {
    pub fn new(
        a: PairedTensor,
        b: PairedTensor,
        c: PairedTensor,
        d: PairedTensor,
    ) -> Result<MltiSystem> {
        if !a.is_square() {
            return Err(Error::ShapeMismatch("A must be square".into()));
        }
        let state = a.shape().row_dims();
        if b.shape().row_dims() != state
            || c.shape().col_dims() != state
            || d.shape().row_dims() != c.shape().row_dims()
            || d.shape().col_dims() != b.shape().col_dims()
        {
            return Err(Error::ShapeMismatch(
                "system tensors must be conformal for X' = A*X + B*U, Y = C*X + D*U".into(),
            ));
        }
        Ok(MltiSystem { a, b, c, d })
    }
}

/// Transfer function `G(s) = D + C*(sI - A)^-1*B`.
pub fn transfer_function(sys: &MltiSystem, s: C64) -> Result<PairedTensor> {
    let n = sys.a.unfold().nrows();
    let mut resolvent = sys.a.unfold().neg();
    for i in 0..n {
        resolvent[(i, i)] += s;
    }
    let lu = LuFactors::factor(&resolvent, 1e-14 * resolvent.frobenius_norm().max(1.0))
        .map_err(|_| Error::SingularResolvent)?;
    let x = lu.solve(sys.b.unfold());
    let g = sys.d.unfold().add(&sys.c.unfold().matmul(&x));
    PairedTensor::fold(sys.d.shape().clone(), g)
}

/// Stability of the system tensor `A`.
pub fn is_stable(sys: &MltiSystem) -> Result<bool> {
    spectral::is_stable(&sys.a)
}

/// Hautus test on the unfolding: `(A, B)` is stabilizable when
/// `[lambda I - phi(A), phi(B)]` has full row rank for every eigenvalue
/// with nonnegative real part. Rank is decided by SVD at a relative
/// threshold of `1e-10`.
pub fn is_stabilizable(a: &PairedTensor, b: &PairedTensor) -> Result<bool> {
    if !a.is_square() || a.shape().row_dims() != b.shape().row_dims() {
        return Err(Error::ShapeMismatch("stabilizability test shapes".into()));
    }
    let n = a.unfold().nrows();
    for lambda in u_eigenvalues(a)? {
        if lambda.re < 0.0 {
            continue;
        }
        let mut shifted = a.unfold().neg();
        for i in 0..n {
            shifted[(i, i)] += lambda;
        }
        let pencil = Mat::hconcat(&[&shifted, b.unfold()]);
        let svd = svd_full(&pencil)?;
        if svd.rank(1e-10) < n {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Detectability of `(C, A)`: stabilizability of `(A^H, C^H)`.
pub fn is_detectable(c: &PairedTensor, a: &PairedTensor) -> Result<bool> {
    is_stabilizable(&a.conj_transpose(), &c.conj_transpose())
}

/// The Hamiltonian tensor `M_gamma` of the bounded real lemma, assembled
/// from the system tensors with `R = gamma^2 I - D^H * D`.
pub fn m_gamma(sys: &MltiSystem, gamma: f64) -> Result<PairedTensor> {
    hamiltonian_assemble(&m_gamma_blocks(sys, gamma)?)
}

fn m_gamma_blocks(sys: &MltiSystem, gamma: f64) -> Result<HamiltonianBlocks> {
    let sigma_d = sys.d.spectral_norm()?;
    if gamma <= sigma_d {
        return Err(Error::GammaTooSmall {
            gamma,
            sigma_max_d: sigma_d,
        });
    }
    let input_dims = sys.b.shape().col_dims().to_vec();
    let output_dims = sys.c.shape().row_dims().to_vec();
    let r = PairedTensor::identity(&input_dims)
        .scale(C64::new(gamma * gamma, 0.0))
        .sub(&sys.d.conj_transpose().einstein(&sys.d)?);
    let r_inv = r.inverse()?;
    let br = sys.b.einstein(&r_inv)?;
    let a_shift = sys
        .a
        .add(&br.einstein(&sys.d.conj_transpose())?.einstein(&sys.c)?);
    let g = br.einstein(&sys.b.conj_transpose())?.hermitian_part();
    let middle = PairedTensor::identity(&output_dims)
        .add(&sys.d.einstein(&r_inv)?.einstein(&sys.d.conj_transpose())?);
    let k = sys
        .c
        .conj_transpose()
        .einstein(&middle)?
        .einstein(&sys.c)?
        .hermitian_part()
        .neg();
    Ok(HamiltonianBlocks { a: a_shift, g, k })
}

/// Frequencies at which `M_gamma` crosses the imaginary axis: the
/// imaginary parts of its U-eigenvalues with `|Re|` below `imag_tol`
/// (relative). Empty exactly when `gamma` is an upper bound on the
/// H-infinity norm; otherwise each frequency carries a singular value
/// crossing of the transfer function.
pub fn hamiltonian_axis_frequencies(
    sys: &MltiSystem,
    gamma: f64,
    imag_tol: f64,
) -> Result<Vec<f64>> {
    let m = m_gamma(sys, gamma)?;
    let scale = m.spectral_norm()?.max(f64::MIN_POSITIVE);
    let eigs = u_eigenvalues(&m)?;
    Ok(eigs
        .iter()
        .filter(|z| Float::abs(z.re) <= imag_tol * scale)
        .map(|z| z.im)
        .collect())
}

/// True when `M_gamma` has no U-eigenvalue within `imag_tol` (relative) of
/// the imaginary axis, i.e. when `gamma` is an upper bound on the
/// H-infinity norm.
fn gamma_is_upper_bound(sys: &MltiSystem, gamma: f64, imag_tol: f64) -> Result<bool> {
    Ok(hamiltonian_axis_frequencies(sys, gamma, imag_tol)?.is_empty())
}

/// Symmetric logarithmic frequency grid: `0` plus `points` magnitudes
/// between `lo` and `hi` in both signs. Complex-coefficient systems are not
/// conjugate-symmetric, so the supremum over all of `R` needs negative
/// frequencies too.
pub fn log_frequency_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * points + 1);
    out.push(0.0);
    if points == 0 {
        return out;
    }
    let llo = Float::ln(lo);
    let lhi = Float::ln(hi);
    for k in 0..points {
        let f = k as f64 / (points.max(2) - 1) as f64;
        let omega = Float::exp(llo + f * (lhi - llo));
        out.push(omega);
        out.push(-omega);
    }
    out
}

/// Largest singular value of `G(i omega)` for each frequency.
pub fn frequency_sweep(sys: &MltiSystem, omegas: &[f64]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(omegas.len());
    for &omega in omegas {
        let g = transfer_function(sys, C64::new(0.0, omega))?;
        out.push(g.spectral_norm()?);
    }
    Ok(out)
}

/// Frequency range matched to the system's eigenvalue magnitudes.
fn adaptive_frequency_range(sys: &MltiSystem) -> Result<(f64, f64)> {
    let eigs = u_eigenvalues(&sys.a)?;
    let max_mag = eigs
        .iter()
        .map(|z| z.norm())
        .fold(0.0f64, f64::max)
        .max(1.0);
    let min_mag = eigs
        .iter()
        .map(|z| z.norm())
        .fold(f64::INFINITY, f64::min)
        .max(1e-6);
    Ok((min_mag * 1e-3, max_mag * 1e3))
}

/// H-infinity norm by bisection on the Hamiltonian eigenvalue test.
///
/// The initial bracket comes from a 64-point logarithmic frequency sweep
/// (a certified lower bound) with the upper end doubled until the
/// Hamiltonian test passes; bisection stops when the interval width drops
/// below `rel_tol` times the midpoint.
pub fn hinf_norm(sys: &MltiSystem, rel_tol: f64) -> Result<f64> {
    if !is_stable(sys)? {
        return Err(Error::UnstableSystem);
    }
    let sigma_d = sys.d.spectral_norm()?;
    let (w_lo, w_hi) = adaptive_frequency_range(sys)?;
    let grid = log_frequency_grid(w_lo, w_hi, 64);
    let sweep = frequency_sweep(sys, &grid)?;
    let grid_max = sweep.iter().fold(0.0f64, |a, &b| a.max(b));

    let mut lower = grid_max.max(sigma_d);
    let mut upper = 2.0 * grid_max.max(sigma_d + 1e-9).max(1e-12);
    let mut doublings = 0;
    while !gamma_is_upper_bound(sys, upper, spectral::DEFAULT_IMAG_TOL)? {
        lower = upper;
        upper *= 2.0;
        doublings += 1;
        if doublings > 80 {
            return Err(Error::ConvergenceFailure {
                what: "H-infinity upper bound search",
                iterations: doublings,
            });
        }
    }
    loop {
        let mid = 0.5 * (lower + upper);
        if upper - lower <= rel_tol * mid {
            return Ok(mid);
        }
        if mid <= sigma_d || !gamma_is_upper_bound(sys, mid, spectral::DEFAULT_IMAG_TOL)? {
            lower = mid;
        } else {
            upper = mid;
        }
    }
}

/// Outcome of the bounded real lemma's three equivalent conditions.
#[derive(Debug, Clone)]
pub struct BrlReport {
    /// (i) `||G||_inf < gamma`.
    pub norm_below_gamma: bool,
    /// (ii) `sigma_max(D) < gamma` and `M_gamma` is imaginary-axis free.
    pub hamiltonian_axis_free: bool,
    /// (iii) the associated Riccati tensor equation has a PSD solution with
    /// an imaginary-axis-free closed loop.
    pub riccati_certified: bool,
    /// The computed H-infinity norm backing (i).
    pub hinf: f64,
    /// The Riccati solution backing (iii), when it exists.
    pub riccati_solution: Option<PairedTensor>,
}

impl BrlReport {
    pub fn all_agree(&self) -> bool {
        self.norm_below_gamma == self.hamiltonian_axis_free
            && self.hamiltonian_axis_free == self.riccati_certified
    }
}

/// Evaluates the three equivalent bounded-real conditions independently.
/// Each violated precondition is reported by its own error.
pub fn bounded_real_check(sys: &MltiSystem, gamma: f64) -> Result<BrlReport> {
    if !is_stable(sys)? {
        return Err(Error::UnstableSystem);
    }
    if !is_stabilizable(&sys.a, &sys.b)? {
        return Err(Error::NotStabilizable);
    }
    if !is_detectable(&sys.c, &sys.a)? {
        return Err(Error::NotDetectable);
    }
    let hinf = hinf_norm(sys, 1e-6)?;
    let norm_below_gamma = hinf < gamma;

    let sigma_d = sys.d.spectral_norm()?;
    let hamiltonian_axis_free = if gamma > sigma_d {
        gamma_is_upper_bound(sys, gamma, spectral::DEFAULT_IMAG_TOL)?
    } else {
        false
    };

    let (riccati_certified, riccati_solution) = if gamma > sigma_d {
        let blocks = m_gamma_blocks(sys, gamma)?;
        // the ARTE `A'^H E + E A' - E G E + K = O` matching the bounded
        // real Riccati equation takes G = -(B R^-1 B^H), K = -K_gamma
        let problem = ArteProblem::new(blocks.a.clone(), blocks.g.neg(), blocks.k.neg())?;
        match arte_schur_solve(&problem) {
            Ok(report) => {
                let psd = report.psd_certificate >= -1e-6;
                let closed = blocks.a.add(&blocks.g.einstein(&report.e)?);
                let closed_scale = closed.spectral_norm()?.max(f64::MIN_POSITIVE);
                let axis_free = u_eigenvalues(&closed)?
                    .iter()
                    .all(|z| Float::abs(z.re) > spectral::DEFAULT_IMAG_TOL * closed_scale);
                (psd && axis_free, Some(report.e))
            }
            Err(Error::ImaginaryAxisEigenvalue) => (false, None),
            Err(other) => return Err(other),
        }
    } else {
        (false, None)
    };

    Ok(BrlReport {
        norm_below_gamma,
        hamiltonian_axis_free,
        riccati_certified,
        hinf,
        riccati_solution,
    })
}

/// LQR state feedback: solves the ARTE with `G = B*B^H`, `K = C^H*C` and
/// returns the gain `-B^H*E` together with the solver report.
pub fn lqr_gain(sys: &MltiSystem) -> Result<(PairedTensor, ArteReport)> {
    let problem = ArteProblem::from_system(sys.a.clone(), sys.b.clone(), sys.c.clone())?;
    let report = arte_schur_solve(&problem)?;
    let gain = sys.b.conj_transpose().einstein(&report.e)?.neg();
    Ok((gain, report))
}
