//! Crate-level property tests: structural invariants checked on randomized
//! inputs, plus proptest-driven laws for the index machinery.

use proptest::prelude::*;

use rtk_core::control::{
    frequency_sweep, hamiltonian_axis_frequencies, hinf_norm, is_detectable, is_stabilizable,
    log_frequency_grid, MltiSystem,
};
use rtk_core::equations::{
    arte_schur_solve, newton_arte, ArteProblem, LinearSolver, NewtonOptions,
};
use rtk_core::rng::Rng;
use rtk_core::spectral::u_eigenvalues;
use rtk_core::structured::{unvec, vec as tensor_vec};
use rtk_core::tensor::PairedTensor;
use rtk_core::{ivec, PlainTensor, Shape, C64};

fn random_paired(rng: &mut Rng, row_dims: &[usize], col_dims: &[usize]) -> PairedTensor {
    let shape = Shape::new(row_dims.to_vec(), col_dims.to_vec()).unwrap();
    let mut t = PairedTensor::zeros(shape);
    for v in t.unfold_mut().data_mut() {
        *v = C64::new(rng.normal(), rng.normal());
    }
    t
}

fn random_stable(rng: &mut Rng, dims: &[usize]) -> PairedTensor {
    let base = random_paired(rng, dims, dims);
    let shift = base.spectral_norm().unwrap() + 0.5;
    base.sub(&PairedTensor::identity(dims).scale(C64::new(shift, 0.0)))
}

fn random_stabilizable_detectable(rng: &mut Rng, dims: &[usize]) -> ArteProblem {
    loop {
        let a = random_paired(rng, dims, dims);
        let b = random_paired(rng, dims, dims);
        let c = random_paired(rng, dims, dims);
        if is_stabilizable(&a, &b).unwrap() && is_detectable(&c, &a).unwrap() {
            return ArteProblem::from_system(a, b, c).unwrap();
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Enumerating indices fastest-first hits 1..=|I| exactly once.
    #[test]
    fn ivec_is_a_bijection(dims in proptest::collection::vec(1usize..4, 1..4)) {
        let total: usize = dims.iter().product();
        let mut seen = vec![false; total];
        let mut index = vec![1usize; dims.len()];
        loop {
            let linear = ivec(&index, &dims).unwrap();
            prop_assert!((1..=total).contains(&linear));
            prop_assert!(!seen[linear - 1], "ivec repeats {linear}");
            seen[linear - 1] = true;
            // advance fastest-first
            let mut k = 0;
            loop {
                if k == dims.len() {
                    break;
                }
                index[k] += 1;
                if index[k] <= dims[k] {
                    break;
                }
                index[k] = 1;
                k += 1;
            }
            if k == dims.len() {
                break;
            }
        }
        prop_assert!(seen.iter().all(|&s| s));
    }

    /// fold(unfold(A)) = A and unvec(vec(A)) = A on random shapes and data.
    #[test]
    fn fold_and_vec_round_trips(
        seed in any::<u64>(),
        row in proptest::collection::vec(1usize..4, 1..3),
        col in proptest::collection::vec(1usize..4, 1..3),
    ) {
        let order = row.len().min(col.len());
        let row = &row[..order];
        let col = &col[..order];
        let mut rng = Rng::seed_from(seed);
        let a = random_paired(&mut rng, row, col);
        let folded = PairedTensor::fold(a.shape().clone(), a.unfold().clone()).unwrap();
        prop_assert_eq!(folded.unfold().data(), a.unfold().data());
        let back = unvec(&tensor_vec(&a), a.shape()).unwrap();
        prop_assert!(back.sub(&a).frobenius_norm() == 0.0);
    }

    /// Vec is linear over the complex scalars.
    #[test]
    fn vec_linearity(seed in any::<u64>(), re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let mut rng = Rng::seed_from(seed);
        let x = random_paired(&mut rng, &[2, 2], &[3, 1]);
        let y = random_paired(&mut rng, &[2, 2], &[3, 1]);
        let alpha = C64::new(re, im);
        let lhs = tensor_vec(&x.scale(alpha).add(&y));
        let rhs = tensor_vec(&x).scale(alpha).add(&tensor_vec(&y));
        prop_assert!(lhs.sub(&rhs).frobenius_norm() <= 1e-12 * rhs.frobenius_norm().max(1.0));
    }

    /// The spectral norm is compatible with the Frobenius norm:
    /// `|A*X|_F <= |A|_2 |X|_F`.
    #[test]
    fn spectral_norm_compatibility(seed in any::<u64>()) {
        let mut rng = Rng::seed_from(seed);
        let a = random_paired(&mut rng, &[2, 2], &[3, 2]);
        let mut x = PlainTensor::zeros(vec![3, 2]);
        for v in x.data_mut() {
            *v = C64::new(rng.normal(), rng.normal());
        }
        let lhs = a.apply(&x).unwrap().frobenius_norm();
        let rhs = a.spectral_norm().unwrap() * x.frobenius_norm();
        prop_assert!(lhs <= rhs + 1e-10 * rhs.max(1.0));
    }
}

/// From a stabilizing start the Newton residuals decrease monotonically
/// after the first step.
#[test]
fn newton_residuals_decrease_monotonically() {
    let mut rng = Rng::seed_from(0xA1);
    for case in 0..10 {
        let dims: &[usize] = if case % 2 == 0 { &[2, 1] } else { &[2, 2] };
        let problem = random_stabilizable_detectable(&mut rng, dims);
        let solved = arte_schur_solve(&problem).unwrap();
        // stabilizing start: a damped PSD inflation of the solution
        let e0 = loop {
            let h = random_paired(&mut rng, dims, dims);
            let psd = h.einstein(&h.conj_transpose()).unwrap().hermitian_part();
            let candidate = solved
                .e
                .add(&psd.scale(C64::new(0.2, 0.0)))
                .hermitian_part();
            let closed = problem.a.sub(&problem.g.einstein(&candidate).unwrap());
            if rtk_core::spectral::is_stable(&closed).unwrap() {
                break candidate;
            }
        };
        let report = newton_arte(
            &problem,
            Some(&e0),
            &NewtonOptions {
                eps: 1e-11,
                inner: LinearSolver::Direct,
                inner_tol: 1e-12,
                max_iter: 60,
            },
        )
        .unwrap();
        assert_eq!(report.stabilizing_start, Some(true));
        for (k, pair) in report.residual_history.windows(2).enumerate().skip(1) {
            assert!(
                pair[1] <= pair[0] * (1.0 + 1e-9),
                "case {case}: residual rose at step {k}: {} -> {}",
                pair[0],
                pair[1]
            );
        }
    }
}

/// Stabilizable/detectable data keeps the Hamiltonian block tensor away
/// from the imaginary axis.
#[test]
fn hamiltonian_of_admissible_problem_avoids_the_axis() {
    let mut rng = Rng::seed_from(0xA2);
    for case in 0..10 {
        let dims: &[usize] = if case % 2 == 0 { &[2, 1] } else { &[2, 2] };
        let problem = random_stabilizable_detectable(&mut rng, dims);
        let m = rtk_core::spectral::hamiltonian_assemble(&rtk_core::spectral::HamiltonianBlocks {
            a: problem.a.clone(),
            g: problem.g.clone(),
            k: problem.k.clone(),
        })
        .unwrap();
        let scale = m.spectral_norm().unwrap();
        let min_re = u_eigenvalues(&m)
            .unwrap()
            .iter()
            .map(|z| z.re.abs())
            .fold(f64::INFINITY, f64::min);
        assert!(
            min_re > 1e-8 * scale,
            "case {case}: eigenvalue within {min_re:e} of the axis"
        );
    }
}

/// Bisection certificates agree with the transfer function: accepted
/// bounds dominate a frequency sweep, rejected bounds produce an axis
/// crossing whose frequency attains the rejected level.
#[test]
fn bisection_certificates_match_the_transfer_function() {
    let mut rng = Rng::seed_from(0xA3);
    for case in 0..6 {
        let dims: &[usize] = if case % 2 == 0 { &[2] } else { &[2, 1] };
        let ones = vec![1usize; dims.len()];
        let a = random_stable(&mut rng, dims);
        let b = random_paired(&mut rng, dims, &ones);
        let c = random_paired(&mut rng, &ones, dims);
        let d = PairedTensor::zeros(Shape::new(ones.clone(), ones.clone()).unwrap());
        let sys = MltiSystem::new(a, b, c, d).unwrap();
        let hinf = hinf_norm(&sys, 1e-6).unwrap();

        // accepted: no sweep point reaches an accepted upper bound
        let accepted = 1.01 * hinf;
        assert!(hamiltonian_axis_frequencies(&sys, accepted, 1e-8)
            .unwrap()
            .is_empty());
        let eigs = u_eigenvalues(&sys.a).unwrap();
        let max_mag = eigs.iter().map(|z| z.norm()).fold(1.0f64, f64::max);
        let grid = log_frequency_grid(1e-3 * max_mag, 1e3 * max_mag, 200);
        let sweep = frequency_sweep(&sys, &grid).unwrap();
        assert!(sweep.iter().all(|&s| s < accepted));

        // rejected: the axis crossing frequency attains the level
        let rejected = 0.95 * hinf;
        if rejected > sys.d.spectral_norm().unwrap() {
            let crossings = hamiltonian_axis_frequencies(&sys, rejected, 1e-8).unwrap();
            assert!(!crossings.is_empty(), "case {case}: no crossing found");
            let attained = frequency_sweep(&sys, &crossings)
                .unwrap()
                .into_iter()
                .fold(0.0f64, f64::max);
            assert!(
                attained >= rejected - 1e-6,
                "case {case}: crossing attains {attained}, level {rejected}"
            );
        }
    }
}

/// A three-mode Riccati problem end to end: both solver routes agree and
/// certify the same stabilizing solution.
#[test]
fn three_mode_riccati_round_trip() {
    let mut rng = Rng::seed_from(0xA4);
    let dims = [2usize, 2, 2];
    let problem = random_stabilizable_detectable(&mut rng, &dims);
    let schur = arte_schur_solve(&problem).unwrap();
    assert!(schur.psd_certificate >= -1e-8);
    assert!(schur.closed_loop_eigenvalues.iter().all(|z| z.re < 0.0));
    assert!(schur.residual_history[0] <= 1e-8 * problem.k.frobenius_norm().max(1.0));

    let newton = newton_arte(
        &problem,
        Some(&schur.e.scale(C64::new(1.01, 0.0)).hermitian_part()),
        &NewtonOptions {
            eps: 1e-10,
            inner: LinearSolver::BicgVec,
            inner_tol: 1e-8,
            max_iter: 60,
        },
    )
    .unwrap();
    let diff = newton.e.sub(&schur.e).frobenius_norm() / schur.e.frobenius_norm();
    assert!(diff <= 1e-6, "three-mode disagreement {diff:e}");
}

/// Larger two-mode instance: the iterative inner solvers stay inside their
/// iteration budgets and match the direct route.
#[test]
fn larger_instance_iterative_solvers_agree() {
    let mut rng = Rng::seed_from(0xA5);
    let dims = [3usize, 3];
    let problem = random_stabilizable_detectable(&mut rng, &dims);
    let schur = arte_schur_solve(&problem).unwrap();
    for inner in [LinearSolver::BicgTensor, LinearSolver::BicgVec] {
        let newton = newton_arte(
            &problem,
            Some(&schur.e.scale(C64::new(1.02, 0.0)).hermitian_part()),
            &NewtonOptions {
                eps: 1e-9,
                inner,
                inner_tol: 1e-7,
                max_iter: 60,
            },
        )
        .unwrap();
        let diff = newton.e.sub(&schur.e).frobenius_norm() / schur.e.frobenius_norm();
        assert!(diff <= 1e-6, "{inner:?} disagreement {diff:e}");
    }
}
