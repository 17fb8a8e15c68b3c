//! First-order perturbation analysis of the Riccati tensor equation:
//! the linearization operator `Z`, perturbation bounds, three normwise
//! condition numbers, and a randomized experiment harness.

use alloc::vec::Vec;

use num_traits::Float;

use crate::dense::{svd_full, LuFactors, Mat};
use crate::equations::{newton_arte, ArteProblem, LinearSolver, NewtonOptions};
use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::structured::{kron, transpose_permutation_tensor, unvec, vec as tensor_vec};
use crate::tensor::{concat_row_n, PairedTensor};
use crate::C64;

/// Configuration of the perturbation experiments.
#[derive(Debug, Clone)]
pub struct PerturbConfig {
    /// Splitting weights of the two `dA` terms, constrained by
    /// `1/alpha^2 + 1/beta^2 = 1`.
    pub alpha: f64,
    pub beta: f64,
    /// Treat `dA` as a real perturbation (tighter bounds).
    pub real_delta_a: bool,
    /// Perturbation magnitudes to sample.
    pub delta_scales: Vec<f64>,
    /// 0-based `(row, column)` multi-index receiving the `dG` entry.
    pub delta_g_position: (Vec<usize>, Vec<usize>),
    /// 0-based `(row, column)` multi-index receiving the `dK` entry.
    pub delta_k_position: (Vec<usize>, Vec<usize>),
}

impl PerturbConfig {
    /// Symmetric weights `alpha = beta = sqrt(2)`, real `dA`, and the
    /// default single-entry positions `dG` at `(1,1,...)` and `dK` at the
    /// index `(3,3,2,2)` of a `3x3x2x2` tensor (clamped to the shape).
    pub fn standard(problem: &ArteProblem, delta_scales: Vec<f64>) -> PerturbConfig {
        let order = problem.a.order();
        let dims = problem.a.shape().row_dims();
        let g_pos = alloc::vec![0usize; order];
        let mut k_pos = alloc::vec![0usize; order];
        for (n, &d) in dims.iter().enumerate() {
            k_pos[n] = (if n == 0 { 2usize } else { 1 }).min(d - 1);
        }
        PerturbConfig {
            alpha: Float::sqrt(2.0),
            beta: Float::sqrt(2.0),
            real_delta_a: true,
            delta_scales,
            delta_g_position: (g_pos.clone(), g_pos),
            delta_k_position: (k_pos.clone(), k_pos),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let constraint = 1.0 / (self.alpha * self.alpha) + 1.0 / (self.beta * self.beta);
        if Float::abs(constraint - 1.0) > 1e-12 {
            return Err(Error::ShapeMismatch(
                "alpha, beta must satisfy 1/alpha^2 + 1/beta^2 = 1".into(),
            ));
        }
        Ok(())
    }
}

/// Upper bounds for the three condition numbers and the mixed bound
/// constant `eta_c`. The values are the first-order upper bounds obtained
/// from `||Z^-1 * S||_2`, not the condition numbers themselves.
#[derive(Debug, Clone, Copy)]
pub struct ConditionNumbers {
    pub kappa1: f64,
    pub kappa2: f64,
    pub kappa3: f64,
    pub eta_c: f64,
}

/// One perturbation draw: the relative-error measures and their bound
/// ratios, or the solver failure that interrupted the sample.
#[derive(Debug, Clone)]
pub struct PerturbSample {
    pub delta: f64,
    pub trial: usize,
    pub outcome: core::result::Result<PerturbOutcome, Error>,
}

#[derive(Debug, Clone, Copy)]
pub struct PerturbOutcome {
    pub de_norm: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub delta3: f64,
    /// `||dE||_F / (Delta_i ||E||_F)`, comparable against `kappa_i`.
    pub ratio1: f64,
    pub ratio2: f64,
    pub ratio3: f64,
}

/// Outcome of [`random_perturbation_suite`].
#[derive(Debug, Clone)]
pub struct PerturbReport {
    pub z: PairedTensor,
    /// First-order bound on `||dE||_F` per unit delta of the canonical
    /// perturbation family used by the experiments.
    pub bound_first_order: f64,
    pub kappa: ConditionNumbers,
    pub seed: u64,
    pub samples: Vec<PerturbSample>,
}

/// The linearization operator
/// `Z = I (x) (A - G*E)^H + (A - G*E)^T (x) I`, invertible whenever the
/// closed loop is stable (its U-eigenvalues are the pairwise sums
/// `conj(lambda_i) + lambda_j` of the closed-loop spectrum).
pub fn z_tensor(problem: &ArteProblem, e: &PairedTensor) -> Result<PairedTensor> {
    let closed = problem.a.sub(&problem.g.einstein(e)?);
    if !crate::spectral::is_stable(&closed)? {
        return Err(Error::UnstableClosedLoop);
    }
    let dims = problem.a.shape().row_dims();
    let eye = PairedTensor::identity(dims);
    Ok(kron(&eye, &closed.conj_transpose()).add(&kron(&closed.transpose(), &eye)))
}

fn spectral_norm_of(m: &Mat) -> Result<f64> {
    Ok(svd_full(m)?.sigma_max())
}

fn z_inverse(z: &PairedTensor) -> Result<Mat> {
    let lu = LuFactors::factor(z.unfold(), 1e-13 * z.unfold().frobenius_norm())?;
    Ok(lu.inverse())
}

/// First-order perturbation bound on `||dE||_F` for given coefficient
/// perturbations. With `real_delta_a` the merged real-perturbation variant
/// is used, which is never looser.
pub fn first_order_bound(
    problem: &ArteProblem,
    e: &PairedTensor,
    da_norm: f64,
    dg_norm: f64,
    dk_norm: f64,
    real_delta_a: bool,
) -> Result<f64> {
    let dims = problem.a.shape().row_dims().to_vec();
    let z = z_tensor(problem, e)?;
    let z_inv = z_inverse(&z)?;
    let eye = PairedTensor::identity(&dims);
    let i_e = kron(&eye, e);
    let e_i = kron(e, &eye);
    let e_e = kron(e, e);

    let da_factor = if real_delta_a {
        let p = transpose_permutation_tensor(&dims);
        let merged = i_e.add(&e_i.einstein(&p)?);
        spectral_norm_of(&z_inv.matmul(merged.unfold()))?
    } else {
        spectral_norm_of(&z_inv.matmul(i_e.unfold()))?
            + spectral_norm_of(&z_inv.matmul(e_i.unfold()))?
    };
    let dg_factor = spectral_norm_of(&z_inv.matmul(e_e.unfold()))?;
    let dk_factor = spectral_norm_of(&z_inv)?;
    Ok(da_factor * da_norm + dg_factor * dg_norm + dk_factor * dk_norm)
}

/// Upper bounds for the three normwise condition numbers, built from the
/// mode block tensors `S1`, `S2` (single-mode concatenation layout; any
/// other admissible layout permutes unfolding columns and leaves the
/// spectral norms unchanged).
pub fn condition_numbers(
    problem: &ArteProblem,
    e: &PairedTensor,
    config: &PerturbConfig,
) -> Result<ConditionNumbers> {
    config.validate()?;
    let dims = problem.a.shape().row_dims().to_vec();
    let z = z_tensor(problem, e)?;
    let z_inv = z_inverse(&z)?;
    let eye = PairedTensor::identity(&dims);
    let i_e = kron(&eye, e);
    let e_i = kron(e, &eye);
    let e_e = kron(e, e);
    let sq_dims: Vec<usize> = dims.iter().map(|d| d * d).collect();
    let big_eye = PairedTensor::identity(&sq_dims);

    let a_norm = problem.a.frobenius_norm();
    let g_norm = problem.g.frobenius_norm();
    let k_norm = problem.k.frobenius_norm();
    let e_norm = e.frobenius_norm();

    let real = |t: f64| C64::new(t, 0.0);
    let (s1, s2, eta_da_factor) = if config.real_delta_a {
        let p = transpose_permutation_tensor(&dims);
        let merged = i_e.add(&e_i.einstein(&p)?);
        let s1 = concat_row_n(
            &[
                &merged.scale(real(a_norm)),
                &e_e.scale(real(g_norm)),
                &big_eye.scale(real(k_norm)),
            ],
            1,
        )?;
        let s2 = concat_row_n(&[&merged, &e_e, &big_eye], 1)?;
        let factor = spectral_norm_of(&z_inv.matmul(merged.unfold()))?;
        (s1, s2, factor)
    } else {
        let s1 = concat_row_n(
            &[
                &e_i.scale(real(config.alpha * a_norm)),
                &i_e.scale(real(config.beta * a_norm)),
                &e_e.scale(real(g_norm)),
                &big_eye.scale(real(k_norm)),
            ],
            1,
        )?;
        let s2 = concat_row_n(
            &[
                &e_i.scale(real(config.alpha)),
                &i_e.scale(real(config.beta)),
                &e_e,
                &big_eye,
            ],
            1,
        )?;
        let factor = spectral_norm_of(&z_inv.matmul(i_e.unfold()))?
            + spectral_norm_of(&z_inv.matmul(e_i.unfold()))?;
        (s1, s2, factor)
    };

    let kappa1 = spectral_norm_of(&z_inv.matmul(s1.unfold()))? / e_norm;
    let kappa3 = spectral_norm_of(&z_inv.matmul(s2.unfold()))?
        * Float::sqrt(a_norm * a_norm + g_norm * g_norm + k_norm * k_norm)
        / e_norm;
    let eta_c = eta_da_factor * a_norm
        + spectral_norm_of(&z_inv.matmul(e_e.unfold()))? * g_norm
        + spectral_norm_of(&z_inv)? * k_norm;
    let kappa2 = (Float::sqrt(3.0) * kappa1).min(eta_c / e_norm);

    Ok(ConditionNumbers {
        kappa1,
        kappa2,
        kappa3,
        eta_c,
    })
}

/// Solves the linearized perturbation equation exactly:
/// `Z * Vec(dE) = -Vec(dA^H*E + E*dA - E*dG*E + dK)`.
pub fn linearized_delta_e(
    problem: &ArteProblem,
    e: &PairedTensor,
    da: &PairedTensor,
    dg: &PairedTensor,
    dk: &PairedTensor,
) -> Result<PairedTensor> {
    let z = z_tensor(problem, e)?;
    let rhs_tensor = da
        .conj_transpose()
        .einstein(e)?
        .add(&e.einstein(da)?)
        .sub(&e.einstein(dg)?.einstein(e)?)
        .add(dk)
        .neg();
    let rhs = tensor_vec(&rhs_tensor);
    let lu = LuFactors::factor(z.unfold(), 1e-13 * z.unfold().frobenius_norm())?;
    let x = lu.solve_vec(rhs.data());
    let sq_dims: Vec<usize> = problem.a.shape().row_dims().iter().map(|d| d * d).collect();
    let y = crate::tensor::PlainTensor::from_data(sq_dims, x)?;
    unvec(&y, e.shape())
}

/// Draws the canonical random perturbation family: `dA` is a normalized
/// Gaussian tensor scaled to `||dA||_F = delta * ||A||_F`, `dG` and `dK`
/// are single-entry perturbations of size `delta`.
pub fn draw_perturbations(
    problem: &ArteProblem,
    config: &PerturbConfig,
    delta: f64,
    rng: &mut Rng,
) -> Result<(PairedTensor, PairedTensor, PairedTensor)> {
    let shape = problem.a.shape().clone();
    let mut da = PairedTensor::zeros(shape.clone());
    for v in da.unfold_mut().data_mut() {
        *v = if config.real_delta_a {
            C64::new(rng.normal(), 0.0)
        } else {
            C64::new(rng.normal(), rng.normal())
        };
    }
    let draw_norm = da.frobenius_norm();
    if draw_norm > 0.0 {
        let scale = delta * problem.a.frobenius_norm() / draw_norm;
        da = da.scale(C64::new(scale, 0.0));
    }
    let mut dg = PairedTensor::zeros(shape.clone());
    dg.set_entry(
        &config.delta_g_position.0,
        &config.delta_g_position.1,
        C64::new(delta, 0.0),
    );
    let mut dk = PairedTensor::zeros(shape);
    dk.set_entry(
        &config.delta_k_position.0,
        &config.delta_k_position.1,
        C64::new(delta, 0.0),
    );
    Ok((da, dg, dk))
}

/// Randomized perturbation experiments: for every `delta` and trial the
/// perturbed equation is re-solved by Newton warm-started at `e`, and the
/// observed errors are recorded next to the condition-number bounds.
/// Solver failures are recorded per sample rather than aborting the suite.
pub fn random_perturbation_suite(
    problem: &ArteProblem,
    e: &PairedTensor,
    config: &PerturbConfig,
    trials: usize,
    seed: u64,
) -> Result<PerturbReport> {
    config.validate()?;
    let kappa = condition_numbers(problem, e, config)?;
    let z = z_tensor(problem, e)?;
    let a_norm = problem.a.frobenius_norm();
    let g_norm = problem.g.frobenius_norm();
    let k_norm = problem.k.frobenius_norm();
    let e_norm = e.frobenius_norm();
    let bound_first_order = first_order_bound(problem, e, a_norm, 1.0, 1.0, config.real_delta_a)?;

    let mut samples = Vec::with_capacity(trials * config.delta_scales.len());
    for (delta_index, &delta) in config.delta_scales.iter().enumerate() {
        for trial in 0..trials {
            let mut rng = Rng::stream(seed, trial as u64, delta_index as u64);
            let outcome = (|| -> core::result::Result<PerturbOutcome, Error> {
                let (da, dg, dk) = draw_perturbations(problem, config, delta, &mut rng)?;
                let perturbed = ArteProblem::new(
                    problem.a.add(&da),
                    problem.g.add(&dg).hermitian_part(),
                    problem.k.add(&dk).hermitian_part(),
                )?;
                let report = newton_arte(
                    &perturbed,
                    Some(e),
                    &NewtonOptions {
                        eps: 1e-12,
                        inner: LinearSolver::Direct,
                        inner_tol: 1e-12,
                        max_iter: 60,
                    },
                )?;
                let de_norm = report.e.sub(e).frobenius_norm();
                let ra = da.frobenius_norm() / a_norm;
                let rg = dg.frobenius_norm() / g_norm;
                let rk = dk.frobenius_norm() / k_norm;
                let delta1 = Float::sqrt(ra * ra + rg * rg + rk * rk);
                let delta2 = ra.max(rg).max(rk);
                let stacked = Float::sqrt(
                    da.frobenius_norm() * da.frobenius_norm()
                        + dg.frobenius_norm() * dg.frobenius_norm()
                        + dk.frobenius_norm() * dk.frobenius_norm(),
                );
                let base = Float::sqrt(a_norm * a_norm + g_norm * g_norm + k_norm * k_norm);
                let delta3 = stacked / base;
                let ratio = |d: f64| if d > 0.0 { de_norm / (d * e_norm) } else { 0.0 };
                Ok(PerturbOutcome {
                    de_norm,
                    delta1,
                    delta2,
                    delta3,
                    ratio1: ratio(delta1),
                    ratio2: ratio(delta2),
                    ratio3: ratio(delta3),
                })
            })();
            samples.push(PerturbSample {
                delta,
                trial,
                outcome,
            });
        }
    }
    Ok(PerturbReport {
        z,
        bound_first_order,
        kappa,
        seed,
        samples,
    })
}
