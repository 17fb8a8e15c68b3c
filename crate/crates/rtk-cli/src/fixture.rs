//! Built-in demo problem: a rank-one 3x3x2x2 multilinear system used by
//! `rtk demo example1` and the acceptance checks.

use rtk_core::control::MltiSystem;
use rtk_core::dense::Mat;
use rtk_core::equations::ArteProblem;
use rtk_core::structured::GcpdTensor;
use rtk_core::tensor::PairedTensor;
use rtk_core::{Shape, C64};

/// First-mode (3x3) system factor.
pub fn a1() -> Mat {
    Mat::from_rows_real(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0], &[0.2, 0.5, 0.8]])
}

/// Second-mode (2x2) system factor.
pub fn a2() -> Mat {
    Mat::from_rows_real(&[&[0.0, 1.0], &[0.5, 0.0]])
}

pub fn b1() -> Mat {
    Mat::from_rows_real(&[&[0.0], &[0.0], &[1.0]])
}

pub fn b2() -> Mat {
    Mat::from_rows_real(&[&[0.0], &[1.0]])
}

pub fn c1() -> Mat {
    Mat::from_rows_real(&[&[1.0, 0.0, 0.0]])
}

pub fn c2() -> Mat {
    Mat::from_rows_real(&[&[1.0, 0.0]])
}

/// The rank-one coefficient tensors as structured representations.
pub fn gcpd_a() -> GcpdTensor {
    GcpdTensor::rank_one(vec![a1(), a2()]).expect("valid factors")
}

/// The demo system `(A, B, C, D)` with `D = O`.
pub fn system() -> MltiSystem {
    let a = PairedTensor::from_rank_one(&[a1(), a2()]).expect("valid factors");
    let b = PairedTensor::from_rank_one(&[b1(), b2()]).expect("valid factors");
    let c = PairedTensor::from_rank_one(&[c1(), c2()]).expect("valid factors");
    let d = PairedTensor::zeros(Shape::new(vec![1, 1], vec![1, 1]).expect("valid dims"));
    MltiSystem::new(a, b, c, d).expect("conformal system")
}

/// The Riccati problem `G = B*B^H`, `K = C^H*C` for the demo system.
pub fn arte_problem() -> ArteProblem {
    let sys = system();
    ArteProblem::from_system(sys.a, sys.b, sys.c).expect("valid problem")
}

/// Fills a `3x3x2x2` Hermitian tensor from its four real `(i2, j2)` slices,
/// each given in row-major `(i1, j1)` order.
fn from_slices(
    s11: [[f64; 3]; 3],
    s21: [[f64; 3]; 3],
    s12: [[f64; 3]; 3],
    s22: [[f64; 3]; 3],
) -> PairedTensor {
    let shape = Shape::new(vec![3, 2], vec![3, 2]).expect("valid dims");
    let mut t = PairedTensor::zeros(shape);
    for i1 in 0..3 {
        for j1 in 0..3 {
            t.set_entry(&[i1, 0], &[j1, 0], C64::new(s11[i1][j1], 0.0));
            t.set_entry(&[i1, 1], &[j1, 0], C64::new(s21[i1][j1], 0.0));
            t.set_entry(&[i1, 0], &[j1, 1], C64::new(s12[i1][j1], 0.0));
            t.set_entry(&[i1, 1], &[j1, 1], C64::new(s22[i1][j1], 0.0));
        }
    }
    t
}

/// Newton starting value used by the demo.
pub fn e0() -> PairedTensor {
    from_slices(
        [[10.0, 0.0, 0.0], [0.0, 4.0, 0.0], [0.0, 0.0, 13.0]],
        [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [1.0, 0.0, 5.0]],
        [[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [0.0, 0.0, 5.0]],
        [[7.0, 0.0, 1.0], [0.0, 21.0, 5.0], [1.0, 5.0, 4.0]],
    )
}

/// Reference solution of the demo problem (four decimal digits).
pub fn reference_solution() -> PairedTensor {
    from_slices(
        [
            [4.8082, -0.2001, 3.9671],
            [-0.2001, 1.5958, -3.3882],
            [3.9671, -3.3882, 18.7381],
        ],
        [
            [-0.5391, -0.0033, 1.5582],
            [10.0971, -4.2223, 25.4769],
            [1.1050, 0.0067, 5.4633],
        ],
        [
            [-0.5391, 10.0971, 1.1050],
            [-0.0033, -4.2223, 0.0067],
            [1.5582, 25.4769, 5.4633],
        ],
        [
            [0.9711, 0.4996, 0.7895],
            [0.4996, 41.7634, 6.7580],
            [0.7895, 6.7580, 2.9588],
        ],
    )
}

/// Reference closed-loop spectrum (three conjugate pairs).
pub fn reference_closed_loop() -> Vec<C64> {
    vec![
        C64::new(-1.0165, 0.1846),
        C64::new(-1.0165, -0.1846),
        C64::new(-0.4144, 0.4918),
        C64::new(-0.4144, -0.4918),
        C64::new(-0.0485, 0.3339),
        C64::new(-0.0485, -0.3339),
    ]
}

/// Reference residual of the converged solution.
pub const REFERENCE_RESIDUAL: f64 = 6.9709e-7;

/// Reference smallest eigenvalue of the solution.
pub const REFERENCE_SMALLEST_EIGENVALUE: f64 = 0.0063;

/// Reference condition-number upper bounds (real-perturbation variant).
pub const REFERENCE_KAPPA: (f64, f64, f64) = (55.0299, 75.4538, 123.7297);

/// Reference `kappa_i * Delta_i` rows for `delta` in `{1e-8, 2e-7, 3e-6}`.
pub const REFERENCE_BOUND_ROWS: [(f64, f64, f64, f64); 3] = [
    (1e-8, 9.5314e-7, 7.5453e-7, 1.2373e-6),
    (2e-7, 1.9062e-5, 1.5090e-5, 2.4747e-5),
    (3e-6, 2.8594e-4, 2.2636e-4, 3.7121e-4),
];

/// Observed relative errors reported alongside the bound rows.
pub const REFERENCE_OBSERVED_ERRORS: [(f64, f64); 3] =
    [(1e-8, 4.0547e-8), (2e-7, 2.2174e-6), (3e-6, 3.4478e-5)];
