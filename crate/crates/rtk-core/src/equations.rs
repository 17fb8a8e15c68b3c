//! Linear and quadratic tensor-equation solvers: Sylvester and Lyapunov
//! equations, the tensor exponential, and the algebraic Riccati tensor
//! equation by Newton iteration or by the Schur-Hamiltonian invariant
//! subspace method.

use alloc::vec::Vec;

use num_traits::{Float, Zero};

use crate::dense::{expm, herm_eig, schur, LuFactors, Mat};
use crate::error::{Error, Result};
use crate::spectral::{hamiltonian_assemble, schur_hamiltonian, u_eigenvalues, HamiltonianBlocks};
use crate::structured::{unvec, vec as tensor_vec};
use crate::tensor::{PairedTensor, PlainTensor};
use crate::C64;

/// Inner solver for linear tensor equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinearSolver {
    /// Dense LU on the Kronecker form of the vectorized system.
    Direct,
    /// BiCG on the tensor-form operator.
    BicgTensor,
    /// BiCG on the vectorized operator through the Vec isomorphism.
    BicgVec,
}

/// Default solver choice by problem size: direct Kronecker solves up to a
/// 64-dimensional unfolding (the vectorized system is dense and
/// `(|I|^2)^2` in memory), matrix-free BiCG above.
pub fn default_solver(unfolding_dim: usize) -> LinearSolver {
    if unfolding_dim <= 64 {
        LinearSolver::Direct
    } else {
        LinearSolver::BicgTensor
    }
}

/// Which route produced an [`ArteReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArteMethod {
    Newton,
    Schur,
}

/// Coefficients of the Riccati tensor equation
/// `A^H*E + E*A - E*G*E + K = O` with Hermitian `G`, `K`.
///
/// When built from system tensors `B`, `C` (so `G = B*B^H`, `K = C^H*C`)
/// the factors are kept for stabilizability/detectability checks.
#[derive(Debug, Clone)]
pub struct ArteProblem {
    pub a: PairedTensor,
    pub g: PairedTensor,
    pub k: PairedTensor,
    pub b: Option<PairedTensor>,
    pub c: Option<PairedTensor>,
}

impl ArteProblem {
    pub fn new(a: PairedTensor, g: PairedTensor, k: PairedTensor) -> Result<ArteProblem> {
        if !a.is_square() || a.shape() != g.shape() || a.shape() != k.shape() {
            return Err(Error::ShapeMismatch(
                "A, G, K must be square tensors of one shape".into(),
            ));
        }
        if !g.is_hermitian(1e-8) || !k.is_hermitian(1e-8) {
            return Err(Error::NotHermitian);
        }
        Ok(ArteProblem {
            a,
            g,
            k,
            b: None,
            c: None,
        })
    }

    /// Problem with `G = B*B^H` and `K = C^H*C`.
    pub fn from_system(a: PairedTensor, b: PairedTensor, c: PairedTensor) -> Result<ArteProblem> {
        let g = b.einstein(&b.conj_transpose())?.hermitian_part();
        let k = c.conj_transpose().einstein(&c)?.hermitian_part();
        let mut problem = ArteProblem::new(a, g, k)?;
        problem.b = Some(b);
        problem.c = Some(c);
        Ok(problem)
    }
}

/// Options for [`newton_arte`]: outer tolerance `1e-8`, inner tolerance
/// `1e-4`, tensor-form BiCG by default.
#[derive(Debug, Clone)]
pub struct NewtonOptions {
    pub eps: f64,
    pub inner: LinearSolver,
    pub inner_tol: f64,
    pub max_iter: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            eps: 1e-8,
            inner: LinearSolver::BicgTensor,
            inner_tol: 1e-4,
            max_iter: 50,
        }
    }
}

/// Outcome of an ARTE solve.
#[derive(Debug, Clone)]
pub struct ArteReport {
    pub e: PairedTensor,
    /// `||f(E_k)||_F` per iteration, starting at the initial guess.
    pub residual_history: Vec<f64>,
    pub closed_loop_eigenvalues: Vec<C64>,
    /// Smallest eigenvalue of the Hermitian solution.
    pub psd_certificate: f64,
    pub method: ArteMethod,
    pub iterations: usize,
    /// Whether `A - G*E0` was stable for the starting value (Newton only;
    /// stability of the start backs the convergence theory but is not
    /// enforced).
    pub stabilizing_start: Option<bool>,
}

/// Solves the linear tensor system `A * X = B` by LU on the unfolding.
pub fn solve_linear(a: &PairedTensor, b: &PlainTensor) -> Result<PlainTensor> {
    if !a.is_square() || a.shape().col_dims() != b.dims() {
        return Err(Error::ShapeMismatch("solve_linear shapes".into()));
    }
    let lu = LuFactors::factor(a.unfold(), 1e-14 * a.unfold().frobenius_norm())?;
    let x = lu.solve_vec(b.data());
    PlainTensor::from_data(b.dims().to_vec(), x)
}

/// Tensor exponential `exp(t A)` through scaling-and-squaring on the
/// unfolding.
pub fn tensor_exponential(a: &PairedTensor, t: f64) -> Result<PairedTensor> {
    if !a.is_square() {
        return Err(Error::ShapeMismatch(
            "exponential needs a square tensor".into(),
        ));
    }
    let scaled = a.unfold().scale(C64::new(t, 0.0));
    PairedTensor::fold(a.shape().clone(), expm(&scaled))
}

// ---------------------------------------------------------------------------
// BiCG
// ---------------------------------------------------------------------------

fn dot(x: &[C64], y: &[C64]) -> C64 {
    x.iter()
        .zip(y)
        .fold(C64::zero(), |acc, (a, b)| acc + a.conj() * b)
}

fn norm2(x: &[C64]) -> f64 {
    Float::sqrt(x.iter().map(|z| z.norm_sqr()).sum::<f64>())
}

/// Unpreconditioned BiCG with the shadow residual seeded as the conjugate
/// of the initial residual. Stops on `||r|| <= rel_tol * ||r0||`.
fn bicg<F, G>(
    apply: F,
    apply_adjoint: G,
    rhs: &[C64],
    x0: &[C64],
    rel_tol: f64,
    max_iter: usize,
) -> Result<(Vec<C64>, f64, usize)>
where
    F: Fn(&[C64]) -> Vec<C64>,
    G: Fn(&[C64]) -> Vec<C64>,
{
    let mut x = x0.to_vec();
    let ax = apply(&x);
    let mut r: Vec<C64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let r0_norm = norm2(&r);
    if r0_norm == 0.0 {
        return Ok((x, 0.0, 0));
    }
    let threshold = rel_tol * r0_norm;
    let mut r_shadow: Vec<C64> = r.iter().map(|z| z.conj()).collect();
    let mut p = r.clone();
    let mut p_shadow = r_shadow.clone();
    let mut rho = dot(&r_shadow, &r);
    for iter in 1..=max_iter {
        if rho.norm() < 1e-280 {
            return Err(Error::ConvergenceFailure {
                what: "BiCG (rho breakdown)",
                iterations: iter,
            });
        }
        let q = apply(&p);
        let q_shadow = apply_adjoint(&p_shadow);
        let denom = dot(&p_shadow, &q);
        if denom.norm() < 1e-280 {
            return Err(Error::ConvergenceFailure {
                what: "BiCG (pivot breakdown)",
                iterations: iter,
            });
        }
        let alpha = rho / denom;
        for (xi, pi) in x.iter_mut().zip(&p) {
            *xi += alpha * pi;
        }
        for (ri, qi) in r.iter_mut().zip(&q) {
            *ri -= alpha * qi;
        }
        let alpha_conj = alpha.conj();
        for (ri, qi) in r_shadow.iter_mut().zip(&q_shadow) {
            *ri -= alpha_conj * qi;
        }
        let res = norm2(&r);
        if res <= threshold {
            return Ok((x, res, iter));
        }
        let rho_next = dot(&r_shadow, &r);
        let beta = rho_next / rho;
        rho = rho_next;
        for (pi, ri) in p.iter_mut().zip(&r) {
            *pi = ri + beta * *pi;
        }
        let beta_conj = beta.conj();
        for (pi, ri) in p_shadow.iter_mut().zip(&r_shadow) {
            *pi = ri + beta_conj * *pi;
        }
    }
    Err(Error::ConvergenceFailure {
        what: "BiCG",
        iterations: max_iter,
    })
}

// ---------------------------------------------------------------------------
// Sylvester and Lyapunov equations
// ---------------------------------------------------------------------------

fn check_spectra_disjoint(a: &PairedTensor, b: &PairedTensor) -> Result<()> {
    let ea = schur(a.unfold())?.eigenvalues();
    let eb = schur(b.unfold())?.eigenvalues();
    let scale = a.unfold().frobenius_norm() + b.unfold().frobenius_norm();
    let tol = 1e-10 * scale.max(1.0);
    for x in &ea {
        for y in &eb {
            if (x + y).norm() <= tol {
                return Err(Error::NoUniqueSolution);
            }
        }
    }
    Ok(())
}

fn fold_flat(shape: &crate::shape::Shape, data: Vec<C64>) -> PairedTensor {
    let mat = Mat::from_col_major(shape.row_len(), shape.col_len(), data)
        .expect("length preserved by the operator");
    PairedTensor::fold(shape.clone(), mat).expect("shape preserved by the operator")
}

/// Solves the Sylvester tensor equation `A*E + E*B = K` with `A` square of
/// shape `I x I`, `B` square of `J x J` and `K` of shape `I x J`.
///
/// The direct method verifies that `A` and `-B` share no U-eigenvalue,
/// builds the Kronecker form of the vectorized system and solves it by LU;
/// the iterative method runs BiCG on the operator `E -> A*E + E*B` without
/// materializing it.
pub fn sylvester_solve(
    a: &PairedTensor,
    b: &PairedTensor,
    k: &PairedTensor,
    method: LinearSolver,
    tol: f64,
) -> Result<PairedTensor> {
    if !a.is_square() || !b.is_square() {
        return Err(Error::ShapeMismatch("A and B must be square".into()));
    }
    if k.shape().row_dims() != a.shape().row_dims() || k.shape().col_dims() != b.shape().col_dims()
    {
        return Err(Error::ShapeMismatch("K must have shape I x J".into()));
    }
    match method {
        LinearSolver::Direct => {
            check_spectra_disjoint(a, b)?;
            // (I (x) phi(A) + phi(B)^T (x) I) vec(phi(E)) = vec(phi(K));
            // column-major storage already is the stacked vector
            let na = a.unfold().nrows();
            let nb = b.unfold().nrows();
            let op = Mat::identity(nb)
                .kron(a.unfold())
                .add(&b.unfold().transpose().kron(&Mat::identity(na)));
            let lu = LuFactors::factor(&op, 1e-13 * op.frobenius_norm())
                .map_err(|_| Error::NoUniqueSolution)?;
            let x = lu.solve_vec(k.unfold().data());
            Ok(fold_flat(k.shape(), x))
        }
        LinearSolver::BicgTensor | LinearSolver::BicgVec => {
            let shape = k.shape().clone();
            let apply = |x: &[C64]| -> Vec<C64> {
                let e = fold_flat(&shape, x.to_vec());
                a.einstein(&e)
                    .expect("conformal")
                    .add(&e.einstein(b).expect("conformal"))
                    .into_unfold()
                    .into_data()
            };
            let adjoint = |y: &[C64]| -> Vec<C64> {
                let e = fold_flat(&shape, y.to_vec());
                a.conj_transpose()
                    .einstein(&e)
                    .expect("conformal")
                    .add(&e.einstein(&b.conj_transpose()).expect("conformal"))
                    .into_unfold()
                    .into_data()
            };
            let len = k.unfold().data().len();
            let x0 = alloc::vec![C64::zero(); len];
            let max_iter = 10 * len;
            let (x, _, _) = bicg(apply, adjoint, k.unfold().data(), &x0, tol, max_iter)?;
            Ok(fold_flat(k.shape(), x))
        }
    }
}

/// Solves the Lyapunov tensor equation `A^H*E + E*A + Q = O`.
///
/// `tol` is the relative residual target of the iterative methods (the
/// direct method solves to machine precision). With `check_stability` the
/// coefficient is verified to be stable first.
pub fn lyapunov_solve(
    a: &PairedTensor,
    q: &PairedTensor,
    method: LinearSolver,
    tol: f64,
    check_stability: bool,
) -> Result<PairedTensor> {
    lyapunov_solve_from(a, q, method, tol, check_stability, None)
}

/// [`lyapunov_solve`] with a warm start; the iterative stop is relative to
/// the initial residual at the starting value.
pub fn lyapunov_solve_from(
    a: &PairedTensor,
    q: &PairedTensor,
    method: LinearSolver,
    tol: f64,
    check_stability: bool,
    start: Option<&PairedTensor>,
) -> Result<PairedTensor> {
    if !a.is_square() || a.shape() != q.shape() {
        return Err(Error::ShapeMismatch(
            "A and Q must be square tensors of one shape".into(),
        ));
    }
    if check_stability && !crate::spectral::is_stable(a)? {
        return Err(Error::UnstableCoefficient);
    }
    let n = a.unfold().nrows();
    let len = n * n;
    let max_iter = 10 * len;
    match method {
        LinearSolver::Direct => {
            let op = Mat::identity(n)
                .kron(&a.unfold().conj_transpose())
                .add(&a.unfold().transpose().kron(&Mat::identity(n)));
            let lu = LuFactors::factor(&op, 1e-13 * op.frobenius_norm())
                .map_err(|_| Error::NoUniqueSolution)?;
            let rhs: Vec<C64> = q.unfold().data().iter().map(|z| -z).collect();
            let x = lu.solve_vec(&rhs);
            Ok(fold_flat(a.shape(), x))
        }
        LinearSolver::BicgTensor => {
            let ah = a.conj_transpose();
            let shape = a.shape().clone();
            let apply = |x: &[C64]| -> Vec<C64> {
                let e = fold_flat(&shape, x.to_vec());
                ah.einstein(&e)
                    .expect("conformal")
                    .add(&e.einstein(a).expect("conformal"))
                    .into_unfold()
                    .into_data()
            };
            let adjoint = |y: &[C64]| -> Vec<C64> {
                let e = fold_flat(&shape, y.to_vec());
                a.einstein(&e)
                    .expect("conformal")
                    .add(&e.einstein(&ah).expect("conformal"))
                    .into_unfold()
                    .into_data()
            };
            let rhs: Vec<C64> = q.unfold().data().iter().map(|z| -z).collect();
            let x0 = match start {
                Some(e0) => e0.unfold().data().to_vec(),
                None => alloc::vec![C64::zero(); len],
            };
            let (x, _, _) = bicg(apply, adjoint, &rhs, &x0, tol, max_iter)?;
            Ok(fold_flat(a.shape(), x))
        }
        LinearSolver::BicgVec => {
            // the equivalent multilinear system
            // (I (x) A^H + A^T (x) I) * Vec(E) = -Vec(Q), applied through
            // the Vec isomorphism without materializing the operator
            let ah = a.conj_transpose();
            let shape = a.shape().clone();
            let vec_dims: Vec<usize> = shape
                .row_dims()
                .iter()
                .zip(shape.col_dims())
                .map(|(r, c)| r * c)
                .collect();
            let apply = |x: &[C64]| -> Vec<C64> {
                let y =
                    PlainTensor::from_data(vec_dims.clone(), x.to_vec()).expect("length preserved");
                let e = unvec(&y, &shape).expect("factorable dims");
                let image = ah
                    .einstein(&e)
                    .expect("conformal")
                    .add(&e.einstein(a).expect("conformal"));
                tensor_vec(&image).data().to_vec()
            };
            let adjoint = |x: &[C64]| -> Vec<C64> {
                let y =
                    PlainTensor::from_data(vec_dims.clone(), x.to_vec()).expect("length preserved");
                let e = unvec(&y, &shape).expect("factorable dims");
                let image = a
                    .einstein(&e)
                    .expect("conformal")
                    .add(&e.einstein(&ah).expect("conformal"));
                tensor_vec(&image).data().to_vec()
            };
            let rhs_tensor = tensor_vec(&q.neg());
            let x0 = match start {
                Some(e0) => tensor_vec(e0).data().to_vec(),
                None => alloc::vec![C64::zero(); len],
            };
            let (x, _, _) = bicg(apply, adjoint, rhs_tensor.data(), &x0, tol, max_iter)?;
            let y = PlainTensor::from_data(vec_dims, x)?;
            unvec(&y, &shape)
        }
    }
}

// ---------------------------------------------------------------------------
// Algebraic Riccati tensor equation
// ---------------------------------------------------------------------------

/// Residual tensor and its Frobenius norm:
/// `f(E) = A^H*E + E*A - E*G*E + K`.
pub fn arte_residual(problem: &ArteProblem, e: &PairedTensor) -> Result<(PairedTensor, f64)> {
    let f = problem
        .a
        .conj_transpose()
        .einstein(e)?
        .add(&e.einstein(&problem.a)?)
        .sub(&e.einstein(&problem.g)?.einstein(e)?)
        .add(&problem.k);
    let norm = f.frobenius_norm();
    Ok((f, norm))
}

/// Frechet derivative of the residual map at `e` applied to `de`:
/// `L(dE) = (A - G*E)^H * dE + dE * (A - G*E)`.
pub fn arte_frechet(
    problem: &ArteProblem,
    e: &PairedTensor,
    de: &PairedTensor,
) -> Result<PairedTensor> {
    let closed_loop = problem.a.sub(&problem.g.einstein(e)?);
    Ok(closed_loop
        .conj_transpose()
        .einstein(de)?
        .add(&de.einstein(&closed_loop)?))
}

fn finish_report(
    problem: &ArteProblem,
    e: PairedTensor,
    residual_history: Vec<f64>,
    method: ArteMethod,
    iterations: usize,
    stabilizing_start: Option<bool>,
) -> Result<ArteReport> {
    let closed_loop = problem.a.sub(&problem.g.einstein(&e)?);
    let closed_loop_eigenvalues = u_eigenvalues(&closed_loop)?;
    let (w, _) = herm_eig(e.unfold())?;
    Ok(ArteReport {
        e,
        residual_history,
        closed_loop_eigenvalues,
        psd_certificate: w.first().copied().unwrap_or(0.0),
        method,
        iterations,
        stabilizing_start,
    })
}

/// Newton iteration for the ARTE: each step solves the Lyapunov equation
/// `A_k^H E' + E' A_k + K_k = O` with `A_k = A - G*E_k` and
/// `K_k = E_k^H G E_k + K`, warm-started at the current iterate; the
/// iterate is re-Hermitized after each inner solve. Stops when
/// `||f(E)||_F < eps`.
///
/// Without an explicit `e0` the Schur-Hamiltonian solution is used when it
/// is computable, else a large multiple of the identity (with no
/// convergence guarantee).
pub fn newton_arte(
    problem: &ArteProblem,
    e0: Option<&PairedTensor>,
    options: &NewtonOptions,
) -> Result<ArteReport> {
    let start = match e0 {
        Some(e) => {
            if !e.is_hermitian(1e-8) {
                return Err(Error::NotHermitian);
            }
            e.clone()
        }
        None => match arte_schur_solve(problem) {
            Ok(report) => report.e,
            Err(_) => {
                let beta = 10.0 * problem.a.spectral_norm()?.max(1.0);
                PairedTensor::identity(problem.a.shape().row_dims()).scale(C64::new(beta, 0.0))
            }
        },
    };
    let closed0 = problem.a.sub(&problem.g.einstein(&start)?);
    let stabilizing_start = Some(crate::spectral::is_stable(&closed0)?);

    let mut e = start.hermitian_part();
    let (_, mut res) = arte_residual(problem, &e)?;
    let mut history = alloc::vec![res];
    if res < options.eps {
        return finish_report(
            problem,
            e,
            history,
            ArteMethod::Newton,
            0,
            stabilizing_start,
        );
    }
    for iter in 1..=options.max_iter {
        let a_k = problem.a.sub(&problem.g.einstein(&e)?);
        let k_k = e
            .conj_transpose()
            .einstein(&problem.g)?
            .einstein(&e)?
            .add(&problem.k);
        let next = lyapunov_solve_from(
            &a_k,
            &k_k,
            options.inner,
            options.inner_tol,
            false,
            Some(&e),
        )
        .map_err(|err| match err {
            Error::ConvergenceFailure { what, .. } => Error::ConvergenceFailure {
                what,
                iterations: iter,
            },
            other => other,
        })?;
        e = next.hermitian_part();
        res = arte_residual(problem, &e)?.1;
        history.push(res);
        if res < options.eps {
            return finish_report(
                problem,
                e,
                history,
                ArteMethod::Newton,
                iter,
                stabilizing_start,
            );
        }
    }
    Err(Error::MaxIterationsExceeded {
        iterations: options.max_iter,
        residual: res,
    })
}

/// Solves the ARTE through the Schur-Hamiltonian decomposition of
/// `M = [[A, G], [K, -A^H]]`: the stabilizing solution is `E = Q2 * Q1^-1`.
///
/// When the problem carries its `B`, `C` factors the stabilizability and
/// detectability preconditions are verified first.
pub fn arte_schur_solve(problem: &ArteProblem) -> Result<ArteReport> {
    if let Some(b) = &problem.b {
        if !crate::control::is_stabilizable(&problem.a, b)? {
            return Err(Error::NotStabilizable);
        }
    }
    if let Some(c) = &problem.c {
        if !crate::control::is_detectable(c, &problem.a)? {
            return Err(Error::NotDetectable);
        }
    }
    let m = hamiltonian_assemble(&HamiltonianBlocks {
        a: problem.a.clone(),
        g: problem.g.clone(),
        k: problem.k.clone(),
    })?;
    let dec = schur_hamiltonian(&m, None)?;
    let q1_inv = dec.q1.inverse().map_err(|err| match err {
        Error::SingularTensor => Error::SingularQ1,
        other => other,
    })?;
    let e = dec.q2.einstein(&q1_inv)?.hermitian_part();
    let (_, res) = arte_residual(problem, &e)?;
    finish_report(problem, e, alloc::vec![res], ArteMethod::Schur, 1, None)
}
