//! Eigenstructure of paired tensors through the unfolding: U-eigenvalues,
//! tensor Schur and SVD, Hamiltonian/symplectic structure, the
//! Schur-Hamiltonian decomposition and the symplectic tensor SVD.

use alloc::vec::Vec;

use num_traits::{Float, Zero};

use crate::dense::{herm_eig, reorder_schur, schur, svd_full, LuFactors, Mat};
use crate::error::{Error, Result};
use crate::shape::Shape;
use crate::tensor::{block2x2_n, shuffle_permutation, PairedTensor, PlainTensor};
use crate::C64;

/// Relative tolerance classifying a U-eigenvalue as purely imaginary.
pub const DEFAULT_IMAG_TOL: f64 = 1e-8;

/// Tensor Schur decomposition `A = Q * T * Q^H`.
#[derive(Debug, Clone)]
pub struct TensorSchur {
    pub q: PairedTensor,
    pub t: PairedTensor,
    pub eigenvalues: Vec<C64>,
}

/// Tensor SVD `A = U * D * V^H` with paired-diagonal `D`.
#[derive(Debug, Clone)]
pub struct TensorSvd {
    pub u: PairedTensor,
    pub d: PairedTensor,
    pub v: PairedTensor,
    pub singular_values: Vec<f64>,
}

/// Blocks of a Hamiltonian tensor `[[A, G], [K, -A^H]]` with Hermitian G, K.
#[derive(Debug, Clone)]
pub struct HamiltonianBlocks {
    pub a: PairedTensor,
    pub g: PairedTensor,
    pub k: PairedTensor,
}

/// Schur-Hamiltonian decomposition `Q^H * M * Q = [[T, R], [O, -T^H]]`
/// with unitary symplectic `Q = [[Q1, Q2], [-Q2, Q1]]` and stable `T`.
#[derive(Debug, Clone)]
pub struct SchurHamiltonian {
    pub q: PairedTensor,
    pub q1: PairedTensor,
    pub q2: PairedTensor,
    pub t: PairedTensor,
    pub r: PairedTensor,
}

/// Symplectic SVD of a unitary symplectic tensor: diagonal `S`, `D` with
/// `blockdiag(U^H, U^H) * Q * blockdiag(V, V) = [[S, D], [-D, S]]`.
#[derive(Debug, Clone)]
pub struct SymplecticSvd {
    pub u: PairedTensor,
    pub v: PairedTensor,
    pub s: PairedTensor,
    pub d: PairedTensor,
}

/// Eigenvalue target for the Rayleigh quotient iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extreme {
    Smallest,
    Largest,
}

fn require_square(a: &PairedTensor) -> Result<()> {
    if !a.is_square() {
        return Err(Error::ShapeMismatch(
            "operation requires row dims = col dims".into(),
        ));
    }
    Ok(())
}

/// U-eigenvalues of a square paired tensor, sorted by nonincreasing real
/// part (ties by nonincreasing imaginary part).
pub fn u_eigenvalues(a: &PairedTensor) -> Result<Vec<C64>> {
    require_square(a)?;
    let mut eigs = schur(a.unfold())?.eigenvalues();
    eigs.sort_by(|x, y| {
        (y.re, y.im)
            .partial_cmp(&(x.re, x.im))
            .expect("eigenvalues are finite")
    });
    Ok(eigs)
}

/// True when every U-eigenvalue lies in the open left half plane.
pub fn is_stable(a: &PairedTensor) -> Result<bool> {
    Ok(u_eigenvalues(a)?.iter().all(|z| z.re < 0.0))
}

/// U-eigenvalue/eigentensor pairs computed from the Schur form, one pair
/// per diagonal entry.
#[allow(clippy::needless_range_loop)]
pub fn u_eigenpairs(a: &PairedTensor) -> Result<Vec<(C64, PlainTensor)>> {
    require_square(a)?;
    let dec = schur(a.unfold())?;
    let n = dec.t.nrows();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let lambda = dec.t[(i, i)];
        // back substitution on the triangular factor
        let mut z = alloc::vec![C64::zero(); n];
        z[i] = C64::new(1.0, 0.0);
        for k in (0..i).rev() {
            let mut rhs = C64::zero();
            for j in k + 1..=i {
                rhs += dec.t[(k, j)] * z[j];
            }
            let mut denom = dec.t[(k, k)] - lambda;
            if denom.norm() < 1e-300 {
                denom = C64::new(1e-300, 0.0);
            }
            z[k] = -rhs / denom;
        }
        let v = dec.q.matvec(&z);
        let norm = Float::sqrt(v.iter().map(|c| c.norm_sqr()).sum::<f64>());
        let data: Vec<C64> = v.iter().map(|c| c / norm).collect();
        let tensor = PlainTensor::from_data(a.shape().row_dims().to_vec(), data)?;
        out.push((lambda, tensor));
    }
    Ok(out)
}

/// Tensor Schur decomposition via the complex Schur form of the unfolding.
pub fn tensor_schur(a: &PairedTensor) -> Result<TensorSchur> {
    require_square(a)?;
    let dec = schur(a.unfold())?;
    let eigenvalues = dec.eigenvalues();
    let q = PairedTensor::fold(a.shape().clone(), dec.q)?;
    let t = PairedTensor::fold(a.shape().clone(), dec.t)?;
    Ok(TensorSchur { q, t, eigenvalues })
}

/// Tensor SVD via the full SVD of the unfolding.
pub fn tensor_svd(a: &PairedTensor) -> Result<TensorSvd> {
    let svd = svd_full(a.unfold())?;
    let ushape = Shape::square(a.shape().row_dims().to_vec())?;
    let vshape = Shape::square(a.shape().col_dims().to_vec())?;
    let u = PairedTensor::fold(ushape, svd.u.clone())?;
    let v = PairedTensor::fold(vshape, svd.v.clone())?;
    let d = PairedTensor::fold(
        a.shape().clone(),
        svd.sigma_mat(a.unfold().nrows(), a.unfold().ncols()),
    )?;
    Ok(TensorSvd {
        u,
        d,
        v,
        singular_values: svd.s,
    })
}

/// Extreme U-eigenvalue of a Hermitian tensor by shifted inverse iteration
/// with Rayleigh-quotient refinement, starting from `x0`.
///
/// A fixed shift just outside the Gershgorin interval targets the wanted
/// end of the spectrum first (one factorization, reused); Rayleigh shifts
/// then polish the enriched iterate. Near-degenerate extreme eigenvalues
/// may converge to any member of the cluster.
pub fn rayleigh_quotient_extreme(
    a: &PairedTensor,
    mode: Extreme,
    x0: &PlainTensor,
    tol: f64,
    max_iter: usize,
) -> Result<(f64, PlainTensor)> {
    require_square(a)?;
    if !a.is_hermitian(1e-8) {
        return Err(Error::NotHermitian);
    }
    let m = a.unfold();
    let n = m.nrows();
    let spectral_scale = a.spectral_norm()?.max(f64::MIN_POSITIVE);

    // Gershgorin bounds put the fixed shift outside the spectrum, next to
    // the target end
    let mut lower = f64::INFINITY;
    let mut upper = f64::NEG_INFINITY;
    for i in 0..n {
        let center = m[(i, i)].re;
        let radius: f64 = (0..n).filter(|&j| j != i).map(|j| m[(i, j)].norm()).sum();
        lower = lower.min(center - radius);
        upper = upper.max(center + radius);
    }
    let margin = 1e-2 * (upper - lower).max(1e-6 * spectral_scale);
    let base_shift = match mode {
        Extreme::Smallest => lower - margin,
        Extreme::Largest => upper + margin,
    };

    let norm0 = x0.frobenius_norm();
    if norm0 == 0.0 {
        return Err(Error::ShapeMismatch("starting tensor is zero".into()));
    }
    let mut x: Vec<C64> = x0.data().iter().map(|z| z / norm0).collect();

    let shifted_lu = |shift: f64| -> Result<LuFactors> {
        let mut shifted = m.clone();
        for i in 0..n {
            shifted[(i, i)] -= C64::new(shift, 0.0);
        }
        LuFactors::factor(&shifted, f64::MIN_POSITIVE)
    };
    let rayleigh = |x: &[C64]| -> (f64, f64) {
        let ax = m.matvec(x);
        let lambda = x
            .iter()
            .zip(&ax)
            .fold(C64::zero(), |acc, (xi, axi)| acc + xi.conj() * axi)
            .re;
        let mut residual = 0.0f64;
        for (axi, xi) in ax.iter().zip(x) {
            residual += (axi - xi * C64::new(lambda, 0.0)).norm_sqr();
        }
        (lambda, Float::sqrt(residual))
    };

    // enrichment phase: fixed shift, one factorization
    let lu = shifted_lu(base_shift)?;
    let mut previous = f64::INFINITY;
    for _ in 0..1000 {
        let y = lu.solve_vec(&x);
        let norm = Float::sqrt(y.iter().map(|c| c.norm_sqr()).sum::<f64>());
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / norm;
        }
        let (rho, residual) = rayleigh(&x);
        if residual <= tol * spectral_scale || Float::abs(rho - previous) <= 1e-9 * spectral_scale {
            break;
        }
        previous = rho;
    }

    // Rayleigh polish: cubic convergence around the enriched iterate
    for _ in 0..max_iter {
        let (rho, residual) = rayleigh(&x);
        if residual <= tol * spectral_scale {
            let tensor = PlainTensor::from_data(a.shape().row_dims().to_vec(), x)?;
            return Ok((rho, tensor));
        }
        let lu = match shifted_lu(rho) {
            Ok(lu) => lu,
            // the shift hit an eigenvalue exactly; nudge it off
            Err(_) => shifted_lu(rho + 1e-11 * spectral_scale)?,
        };
        let y = lu.solve_vec(&x);
        let norm = Float::sqrt(y.iter().map(|c| c.norm_sqr()).sum::<f64>());
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / norm;
        }
    }
    Err(Error::ConvergenceFailure {
        what: "Rayleigh quotient iteration",
        iterations: max_iter,
    })
}

/// First-mode dims of a block-doubled tensor, with the doubling removed.
fn halved_dims(m: &PairedTensor) -> Result<Vec<usize>> {
    require_square(m)?;
    let dims = m.shape().row_dims();
    if !dims[0].is_multiple_of(2) {
        return Err(Error::ShapeMismatch(
            "first mode dimension must be even".into(),
        ));
    }
    let mut base = dims.to_vec();
    base[0] /= 2;
    Ok(base)
}

/// The structure tensor `J = [[O, I], [-I, O]]` on base dims `dims`.
pub fn j_tensor(dims: &[usize]) -> PairedTensor {
    let eye = PairedTensor::identity(dims);
    let zero = PairedTensor::zeros(Shape::square(dims.to_vec()).expect("valid dims"));
    block2x2_n(&zero, &eye, &eye.neg(), &zero, 1).expect("conformal blocks")
}

/// Assembles `[[A, G], [K, -A^H]]` on mode 1, requiring Hermitian G and K.
pub fn hamiltonian_assemble(blocks: &HamiltonianBlocks) -> Result<PairedTensor> {
    if !blocks.g.is_hermitian(1e-8) || !blocks.k.is_hermitian(1e-8) {
        return Err(Error::NotHermitianBlocks);
    }
    block2x2_n(
        &blocks.a,
        &blocks.g,
        &blocks.k,
        &blocks.a.conj_transpose().neg(),
        1,
    )
}

/// Checks the Hamiltonian structure equation `(J*M)^H = J*M`.
pub fn hamiltonian_check(m: &PairedTensor, rel_tol: f64) -> Result<bool> {
    let base = halved_dims(m)?;
    let j = j_tensor(&base);
    let jm = j.einstein(m)?;
    let diff = jm.sub(&jm.conj_transpose()).frobenius_norm();
    Ok(diff <= rel_tol * jm.frobenius_norm().max(f64::MIN_POSITIVE))
}

/// Checks `S^H * J * S = J`.
pub fn symplectic_check(s: &PairedTensor, rel_tol: f64) -> Result<bool> {
    let base = halved_dims(s)?;
    let j = j_tensor(&base);
    let lhs = s.conj_transpose().einstein(&j)?.einstein(s)?;
    let diff = lhs.sub(&j).frobenius_norm();
    Ok(diff <= rel_tol * j.frobenius_norm())
}

/// Extracts the four mode-1 blocks of a block-doubled square tensor.
pub fn split_blocks(
    m: &PairedTensor,
) -> Result<(PairedTensor, PairedTensor, PairedTensor, PairedTensor)> {
    let base = halved_dims(m)?;
    let p = shuffle_permutation(1, &base);
    let unf = p.transpose().matmul(m.unfold()).matmul(&p);
    let half = base.iter().product::<usize>();
    let shape = Shape::square(base.clone())?;
    let tl = PairedTensor::fold(shape.clone(), unf.submatrix(0, 0, half, half))?;
    let tr = PairedTensor::fold(shape.clone(), unf.submatrix(0, half, half, half))?;
    let bl = PairedTensor::fold(shape.clone(), unf.submatrix(half, 0, half, half))?;
    let br = PairedTensor::fold(shape, unf.submatrix(half, half, half, half))?;
    Ok((tl, tr, bl, br))
}

/// Schur-Hamiltonian decomposition of a Hamiltonian tensor with no
/// U-eigenvalues on the imaginary axis.
///
/// The stable invariant subspace `W = [W1; W2]` of the blocked unfolding is
/// isotropic, so `[W, -J W]` is unitary symplectic; the returned blocks are
/// `Q1 = W1`, `Q2 = -W2`.
pub fn schur_hamiltonian(m: &PairedTensor, imag_tol: Option<f64>) -> Result<SchurHamiltonian> {
    let base = halved_dims(m)?;
    if !hamiltonian_check(m, 1e-6)? {
        return Err(Error::NotHamiltonian);
    }
    let p = shuffle_permutation(1, &base);
    let m_block = p.transpose().matmul(m.unfold()).matmul(&p);
    let half: usize = base.iter().product();

    let dec = schur(&m_block)?;
    let spectral_scale = svd_full(&m_block)?.sigma_max().max(f64::MIN_POSITIVE);
    let threshold = imag_tol.unwrap_or(DEFAULT_IMAG_TOL) * spectral_scale;
    let eigs = dec.eigenvalues();
    if eigs.iter().any(|z| Float::abs(z.re) <= threshold) {
        return Err(Error::ImaginaryAxisEigenvalue);
    }
    let select: Vec<bool> = eigs.iter().map(|z| z.re < 0.0).collect();
    let stable = select.iter().filter(|&&s| s).count();
    if stable != half {
        return Err(Error::ImaginaryAxisEigenvalue);
    }
    let (mut t_mat, mut q_mat) = (dec.t, dec.q);
    reorder_schur(&mut t_mat, &mut q_mat, &select);

    let w = q_mat.submatrix(0, 0, 2 * half, half);
    let w1 = w.submatrix(0, 0, half, half);
    let w2 = w.submatrix(half, 0, half, half);
    // Q = [W, -J W] = [[W1, -W2], [W2, W1]]
    let q_block = Mat::block2x2(&w1, &w2.neg(), &w2, &w1);
    let t = t_mat.submatrix(0, 0, half, half);
    // R is the (1,2) block of Q^H M Q
    let minus_jw = q_block.submatrix(0, half, 2 * half, half);
    let r = w.conj_transpose().matmul(&m_block).matmul(&minus_jw);

    let shape = Shape::square(base.clone())?;
    let q = PairedTensor::fold(m.shape().clone(), p.matmul(&q_block).matmul(&p.transpose()))?;
    Ok(SchurHamiltonian {
        q,
        q1: PairedTensor::fold(shape.clone(), w1)?,
        q2: PairedTensor::fold(shape.clone(), w2.neg())?,
        t: PairedTensor::fold(shape.clone(), t)?,
        r: PairedTensor::fold(shape, r)?,
    })
}

/// Symplectic SVD of a unitary symplectic tensor in the block form
/// `[[Q1, Q2], [-Q2, Q1]]`.
pub fn symplectic_svd(q: &PairedTensor) -> Result<SymplecticSvd> {
    let base = halved_dims(q)?;
    let scale = q.frobenius_norm().max(f64::MIN_POSITIVE);
    let (q11, q12, q21, q22) = split_blocks(q)?;
    let block_form_defect = q21.add(&q12).frobenius_norm() + q22.sub(&q11).frobenius_norm();
    if block_form_defect > 1e-8 * scale || !symplectic_check(q, 1e-8)? {
        return Err(Error::NotSymplectic);
    }
    let n: usize = base.iter().product();
    let svd = svd_full(q11.unfold())?;
    let mut u = svd.u;
    let s = svd.s;
    let mut v = svd.v;
    let d_raw = u.conj_transpose().matmul(q12.unfold()).matmul(&v);

    // the SVD of Q1 leaves a unitary freedom inside groups of coinciding
    // singular values; use it to diagonalize the matching block of D.
    // Within an s > 0 group the block is Hermitian (rotate U and V by its
    // eigenbasis, which commutes with s I); on the kernel of Q1 the block
    // is unitary (absorb it into U alone).
    let group_tol = 1e-8;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (s[end - 1] - s[end]).abs() <= group_tol {
            end += 1;
        }
        let len = end - start;
        if len > 1 || s[start] <= group_tol {
            let block = d_raw.submatrix(start, start, len, len);
            let (x_u, x_v) = if s[start] <= group_tol {
                (block, None)
            } else {
                let (_, vecs) = herm_eig(&block)?;
                (vecs.clone(), Some(vecs))
            };
            let u_cols = u.submatrix(0, start, u.nrows(), len).matmul(&x_u);
            u.set_submatrix(0, start, &u_cols);
            if let Some(x_v) = x_v {
                let v_cols = v.submatrix(0, start, v.nrows(), len).matmul(&x_v);
                v.set_submatrix(0, start, &v_cols);
            }
        }
        start = end;
    }
    let mut d = u.conj_transpose().matmul(q12.unfold()).matmul(&v);

    // D must now be diagonal
    let mut off = 0.0f64;
    for j in 0..n {
        for i in 0..n {
            if i != j {
                off += d[(i, j)].norm_sqr();
            }
        }
    }
    if Float::sqrt(off) > 1e-7 * scale.max(1.0) {
        return Err(Error::NotSymplectic);
    }
    for j in 0..n {
        for i in 0..n {
            if i != j {
                d[(i, j)] = C64::zero();
            }
        }
    }

    let shape = Shape::square(base)?;
    let mut s_mat = Mat::zeros(n, n);
    for (i, &si) in s.iter().enumerate() {
        s_mat[(i, i)] = C64::new(si, 0.0);
    }
    Ok(SymplecticSvd {
        u: PairedTensor::fold(shape.clone(), u)?,
        v: PairedTensor::fold(shape.clone(), v)?,
        s: PairedTensor::fold(shape.clone(), s_mat)?,
        d: PairedTensor::fold(shape, d)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;
    use crate::shape::multi_indices;
    use crate::tensor::testutil::{assert_tensor_close, random_hermitian_paired, random_paired};

    fn random_hamiltonian(rng: &mut Rng, dims: &[usize]) -> (HamiltonianBlocks, PairedTensor) {
        let a = random_paired(rng, dims, dims);
        let g = random_hermitian_paired(rng, dims);
        let k = random_hermitian_paired(rng, dims);
        let blocks = HamiltonianBlocks {
            a: a.clone(),
            g: g.clone(),
            k: k.clone(),
        };
        let m = hamiltonian_assemble(&blocks).unwrap();
        (blocks, m)
    }

    #[test]
    fn eigenvalues_of_diagonal_tensor() {
        let mut d = PairedTensor::identity(&[2, 2]);
        let values = [3.0, -1.0, 0.5, 2.0];
        for (pos, idx) in multi_indices(&[2, 2]).enumerate() {
            d.set_entry(&idx, &idx, C64::new(values[pos], 0.0));
        }
        let eigs = u_eigenvalues(&d).unwrap();
        let got: Vec<f64> = eigs.iter().map(|z| z.re).collect();
        assert_eq!(got, alloc::vec![3.0, 2.0, 0.5, -1.0]);
    }

    #[test]
    fn rank_one_eigenvalues_are_products() {
        let mut rng = Rng::seed_from(301);
        let a1 = crate::dense::testutil::random_mat(&mut rng, 2, 2);
        let a2 = crate::dense::testutil::random_mat(&mut rng, 3, 3);
        let a = PairedTensor::from_rank_one(&[a1.clone(), a2.clone()]).unwrap();
        let mut got = u_eigenvalues(&a).unwrap();
        let e1 = schur(&a1).unwrap().eigenvalues();
        let e2 = schur(&a2).unwrap().eigenvalues();
        for &x in &e1 {
            for &y in &e2 {
                let want = x * y;
                let pos = got
                    .iter()
                    .position(|z| (z - want).norm() < 1e-8)
                    .expect("product eigenvalue missing");
                got.remove(pos);
            }
        }
        assert!(got.is_empty());
    }

    #[test]
    fn tensor_schur_reconstructs() {
        let mut rng = Rng::seed_from(302);
        let a = random_paired(&mut rng, &[2, 2], &[2, 2]);
        let dec = tensor_schur(&a).unwrap();
        let rebuilt = dec
            .q
            .einstein(&dec.t)
            .unwrap()
            .einstein(&dec.q.conj_transpose())
            .unwrap();
        assert_tensor_close(&rebuilt, &a, 1e-10);
        // upper triangular in the ivec order
        let dims = [2usize, 2];
        for i in multi_indices(&dims) {
            for j in multi_indices(&dims) {
                if crate::shape::ivec0(&i, &dims) > crate::shape::ivec0(&j, &dims) {
                    assert!(dec.t.entry(&i, &j).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn tensor_schur_kronecker_diagonal_is_product_multiset() {
        let mut rng = Rng::seed_from(303);
        let b = random_paired(&mut rng, &[2], &[2]);
        let c = random_paired(&mut rng, &[2], &[2]);
        let a = crate::structured::kron(&b, &c);
        let dec = tensor_schur(&a).unwrap();
        let mut got = dec.eigenvalues.clone();
        let eb = tensor_schur(&b).unwrap().eigenvalues;
        let ec = tensor_schur(&c).unwrap().eigenvalues;
        for &x in &eb {
            for &y in &ec {
                let pos = got
                    .iter()
                    .position(|z| (z - x * y).norm() < 1e-8)
                    .expect("kron eigenvalue missing");
                got.remove(pos);
            }
        }
        assert!(got.is_empty());
    }

    #[test]
    fn tensor_svd_reconstructs_and_matches_norm() {
        let mut rng = Rng::seed_from(304);
        let a = random_paired(&mut rng, &[2, 3], &[2, 2]);
        let dec = tensor_svd(&a).unwrap();
        let rebuilt = dec
            .u
            .einstein(&dec.d)
            .unwrap()
            .einstein(&dec.v.conj_transpose())
            .unwrap();
        assert_tensor_close(&rebuilt, &a, 1e-10);
        assert!((dec.singular_values[0] - a.spectral_norm().unwrap()).abs() < 1e-10);
        // sigma_max^2 equals the largest eigenvalue of A^H * A
        let gram = a.conj_transpose().einstein(&a).unwrap();
        let (w, _) = herm_eig(gram.unfold()).unwrap();
        let lam_max = w.last().copied().unwrap();
        assert!((dec.singular_values[0] - Float::sqrt(lam_max.max(0.0))).abs() < 1e-9);
    }

    #[test]
    fn tensor_svd_identity_and_unitary_rank_one() {
        let id = PairedTensor::identity(&[2, 2]);
        let dec = tensor_svd(&id).unwrap();
        assert!(dec.singular_values.iter().all(|&s| (s - 1.0).abs() < 1e-12));

        let mut rng = Rng::seed_from(305);
        let (q1, _) = crate::dense::qr_full(&crate::dense::testutil::random_mat(&mut rng, 2, 2));
        let (q2, _) = crate::dense::qr_full(&crate::dense::testutil::random_mat(&mut rng, 3, 3));
        let u = PairedTensor::from_rank_one(&[q1, q2]).unwrap();
        let dec = tensor_svd(&u).unwrap();
        assert!(dec.singular_values.iter().all(|&s| (s - 1.0).abs() < 1e-10));
    }

    #[test]
    fn rayleigh_iteration_identity_and_diagonal() {
        let id = PairedTensor::identity(&[2, 2]);
        let x0 = PlainTensor::constant(alloc::vec![2, 2], C64::new(1.0, 0.0));
        let (lambda, _) =
            rayleigh_quotient_extreme(&id, Extreme::Largest, &x0, 1e-10, 100).unwrap();
        assert!((lambda - 1.0).abs() < 1e-10);

        let mut d = PairedTensor::identity(&[3]);
        d.set_entry(&[1], &[1], C64::new(2.0, 0.0));
        d.set_entry(&[2], &[2], C64::new(3.0, 0.0));
        let x0 = PlainTensor::constant(alloc::vec![3], C64::new(1.0, 0.0));
        let (largest, vec_l) =
            rayleigh_quotient_extreme(&d, Extreme::Largest, &x0, 1e-10, 100).unwrap();
        assert!((largest - 3.0).abs() < 1e-9);
        assert!((vec_l.entry(&[2]).norm() - 1.0).abs() < 1e-8);
        let (smallest, _) =
            rayleigh_quotient_extreme(&d, Extreme::Smallest, &x0, 1e-10, 100).unwrap();
        assert!((smallest - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rayleigh_matches_dense_on_random_hermitian() {
        let mut rng = Rng::seed_from(306);
        let a = random_hermitian_paired(&mut rng, &[2, 2]);
        let (w, _) = herm_eig(a.unfold()).unwrap();
        let x0 = crate::tensor::testutil::random_plain(&mut rng, &[2, 2]);
        let (smallest, xs) =
            rayleigh_quotient_extreme(&a, Extreme::Smallest, &x0, 1e-10, 200).unwrap();
        assert!((smallest - w[0]).abs() < 1e-8);
        let res = a
            .apply(&xs)
            .unwrap()
            .sub(&xs.scale(C64::new(smallest, 0.0)))
            .frobenius_norm();
        assert!(res < 1e-8 * a.spectral_norm().unwrap().max(1.0));
        let (largest, _) =
            rayleigh_quotient_extreme(&a, Extreme::Largest, &x0, 1e-10, 200).unwrap();
        assert!((largest - w[w.len() - 1]).abs() < 1e-8);
    }

    #[test]
    fn hamiltonian_assemble_and_check() {
        let mut rng = Rng::seed_from(307);
        let (_, m) = random_hamiltonian(&mut rng, &[2, 2]);
        assert!(hamiltonian_check(&m, 1e-10).unwrap());
        // a generic tensor is not Hamiltonian
        let random = random_paired(&mut rng, &[4, 2], &[4, 2]);
        assert!(!hamiltonian_check(&random, 1e-10).unwrap());
        // non-Hermitian blocks are rejected
        let bad = HamiltonianBlocks {
            a: random_paired(&mut rng, &[2, 2], &[2, 2]),
            g: random_paired(&mut rng, &[2, 2], &[2, 2]),
            k: random_hermitian_paired(&mut rng, &[2, 2]),
        };
        assert!(matches!(
            hamiltonian_assemble(&bad),
            Err(Error::NotHermitianBlocks)
        ));
    }

    #[test]
    fn hamiltonian_zero_a_identity_gk() {
        // A = O, G = K = I: eigenvalues +-1, each with multiplicity |I|
        let dims = [2usize, 2];
        let blocks = HamiltonianBlocks {
            a: PairedTensor::zeros(Shape::square(dims.to_vec()).unwrap()),
            g: PairedTensor::identity(&dims),
            k: PairedTensor::identity(&dims),
        };
        let m = hamiltonian_assemble(&blocks).unwrap();
        let eigs = u_eigenvalues(&m).unwrap();
        let plus = eigs
            .iter()
            .filter(|z| (*z - C64::new(1.0, 0.0)).norm() < 1e-9)
            .count();
        let minus = eigs
            .iter()
            .filter(|z| (*z + C64::new(1.0, 0.0)).norm() < 1e-9)
            .count();
        assert_eq!(plus, 4);
        assert_eq!(minus, 4);
    }

    #[test]
    fn hamiltonian_spectrum_symmetric_under_reflection() {
        let mut rng = Rng::seed_from(308);
        let (_, m) = random_hamiltonian(&mut rng, &[2, 2]);
        let eigs = u_eigenvalues(&m).unwrap();
        let mut pool = eigs.clone();
        for z in &eigs {
            let want = C64::new(-z.re, z.im);
            let pos = pool
                .iter()
                .position(|p| (p - want).norm() < 1e-7)
                .expect("spectrum not symmetric");
            pool.remove(pos);
        }
        assert!(pool.is_empty());
    }

    #[test]
    fn hamiltonian_eigenpair_identity() {
        // X^H K X + Y^H G Y = (lambda + conj(lambda)) X^H Y per eigenpair
        let mut rng = Rng::seed_from(309);
        let (blocks, m) = random_hamiltonian(&mut rng, &[2, 2]);
        let scale = m.frobenius_norm();
        for (lambda, xy) in u_eigenpairs(&m).unwrap() {
            let x = xy.mode_window(1, 0, 2);
            let y = xy.mode_window(1, 2, 2);
            let lhs = blocks.k.quadratic_form(&x).unwrap() + blocks.g.quadratic_form(&y).unwrap();
            let rhs = (lambda + lambda.conj()) * x.inner_product(&y).unwrap();
            assert!(
                (lhs - rhs).norm() <= 1e-8 * scale.max(1.0),
                "identity violated: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn j_tensor_is_symplectic_and_scaled_identity_is_not() {
        let dims = [2usize, 2];
        let j = j_tensor(&dims);
        assert!(symplectic_check(&j, 1e-12).unwrap());
        let two_eye = PairedTensor::identity(&[4, 2]).scale(C64::new(2.0, 0.0));
        assert!(!symplectic_check(&two_eye, 1e-12).unwrap());
    }

    #[test]
    fn block_form_symplectic_construction() {
        // [[Q1, Q2], [-Q2, Q1]] with Q1^H Q2 Hermitian and
        // Q1^H Q1 + Q2^H Q2 = I is unitary symplectic; take
        // Q1 = cos(H), Q2 = sin(H) for Hermitian H
        let mut rng = Rng::seed_from(310);
        let dims = [2usize, 2];
        let h = random_hermitian_paired(&mut rng, &dims);
        let (w, v) = herm_eig(h.unfold()).unwrap();
        let n = w.len();
        let mut cos_m = Mat::zeros(n, n);
        let mut sin_m = Mat::zeros(n, n);
        for (i, &wi) in w.iter().enumerate() {
            cos_m[(i, i)] = C64::new(Float::cos(wi), 0.0);
            sin_m[(i, i)] = C64::new(Float::sin(wi), 0.0);
        }
        let cos_h = v.matmul(&cos_m).matmul(&v.conj_transpose());
        let sin_h = v.matmul(&sin_m).matmul(&v.conj_transpose());
        let shape = Shape::square(dims.to_vec()).unwrap();
        let q1 = PairedTensor::fold(shape.clone(), cos_h).unwrap();
        let q2 = PairedTensor::fold(shape, sin_h).unwrap();
        let s = block2x2_n(&q1, &q2, &q2.neg(), &q1, 1).unwrap();
        assert!(symplectic_check(&s, 1e-10).unwrap());
        let prod = s.conj_transpose().einstein(&s).unwrap();
        assert_tensor_close(&prod, &PairedTensor::identity(&[4, 2]), 1e-10);
    }

    #[test]
    fn schur_hamiltonian_block_diagonal_case() {
        // A = -I, G = K = O: T = -I, R = O
        let dims = [2usize, 2];
        let blocks = HamiltonianBlocks {
            a: PairedTensor::identity(&dims).neg(),
            g: PairedTensor::zeros(Shape::square(dims.to_vec()).unwrap()),
            k: PairedTensor::zeros(Shape::square(dims.to_vec()).unwrap()),
        };
        let m = hamiltonian_assemble(&blocks).unwrap();
        let dec = schur_hamiltonian(&m, None).unwrap();
        assert_tensor_close(&dec.t, &PairedTensor::identity(&dims).neg(), 1e-10);
        assert!(dec.r.frobenius_norm() < 1e-10);
    }

    #[test]
    fn schur_hamiltonian_invariants_on_random_input() {
        let mut rng = Rng::seed_from(311);
        let dims = [2usize, 2];
        let a = random_paired(&mut rng, &dims, &dims);
        let b = random_paired(&mut rng, &dims, &dims);
        let c = random_paired(&mut rng, &dims, &dims);
        let g = b.einstein(&b.conj_transpose()).unwrap();
        let k = c.conj_transpose().einstein(&c).unwrap();
        let m = hamiltonian_assemble(&HamiltonianBlocks { a, g, k }).unwrap();
        let dec = schur_hamiltonian(&m, None).unwrap();

        // Q unitary symplectic
        let qhq = dec.q.conj_transpose().einstein(&dec.q).unwrap();
        assert_tensor_close(&qhq, &PairedTensor::identity(&[4, 2]), 1e-8);
        assert!(symplectic_check(&dec.q, 1e-8).unwrap());

        // Q^H M Q = [[T, R], [O, -T^H]]
        let lhs = dec
            .q
            .conj_transpose()
            .einstein(&m)
            .unwrap()
            .einstein(&dec.q)
            .unwrap();
        let rhs = block2x2_n(
            &dec.t,
            &dec.r,
            &PairedTensor::zeros(Shape::square(dims.to_vec()).unwrap()),
            &dec.t.conj_transpose().neg(),
            1,
        )
        .unwrap();
        assert_tensor_close(&lhs, &rhs, 1e-8);

        // T stable, R Hermitian
        assert!(is_stable(&dec.t).unwrap());
        assert!(dec.r.is_hermitian(1e-8));

        // blocks match the assembled Q
        let assembled = block2x2_n(&dec.q1, &dec.q2, &dec.q2.neg(), &dec.q1, 1).unwrap();
        assert_tensor_close(&assembled, &dec.q, 1e-10);
    }

    #[test]
    fn schur_hamiltonian_with_defective_clustered_spectrum() {
        // A = -I + J (one Jordan chain), G = K = O: every stable
        // eigenvalue equals -1 and the block is defective
        let dims = [2usize, 2];
        let mut a_mat = Mat::identity(4).neg();
        for i in 0..3 {
            a_mat[(i, i + 1)] = C64::new(1.0, 0.0);
        }
        let shape = Shape::square(dims.to_vec()).unwrap();
        let a = PairedTensor::fold(shape.clone(), a_mat).unwrap();
        let blocks = HamiltonianBlocks {
            a,
            g: PairedTensor::zeros(shape.clone()),
            k: PairedTensor::zeros(shape),
        };
        let m = hamiltonian_assemble(&blocks).unwrap();
        let dec = schur_hamiltonian(&m, None).unwrap();
        assert!(is_stable(&dec.t).unwrap());
        let lhs = dec
            .q
            .conj_transpose()
            .einstein(&m)
            .unwrap()
            .einstein(&dec.q)
            .unwrap();
        let rhs = block2x2_n(
            &dec.t,
            &dec.r,
            &PairedTensor::zeros(Shape::square(dims.to_vec()).unwrap()),
            &dec.t.conj_transpose().neg(),
            1,
        )
        .unwrap();
        assert_tensor_close(&lhs, &rhs, 1e-8);
    }

    #[test]
    fn schur_hamiltonian_rejects_imaginary_axis() {
        // A = 0 (1x1), G = K = O: the only eigenvalue sits on the axis
        let blocks = HamiltonianBlocks {
            a: PairedTensor::zeros(Shape::square(alloc::vec![1]).unwrap()),
            g: PairedTensor::zeros(Shape::square(alloc::vec![1]).unwrap()),
            k: PairedTensor::zeros(Shape::square(alloc::vec![1]).unwrap()),
        };
        let m = hamiltonian_assemble(&blocks).unwrap();
        assert!(matches!(
            schur_hamiltonian(&m, None),
            Err(Error::ImaginaryAxisEigenvalue)
        ));
    }

    #[test]
    fn symplectic_svd_identity_and_j() {
        let dims = [2usize, 2];
        let id = PairedTensor::identity(&[4, 2]);
        let dec = symplectic_svd(&id).unwrap();
        assert_tensor_close(&dec.s, &PairedTensor::identity(&dims), 1e-10);
        assert!(dec.d.frobenius_norm() < 1e-10);

        let j = j_tensor(&dims);
        let dec = symplectic_svd(&j).unwrap();
        assert!(dec.s.frobenius_norm() < 1e-10);
        for idx in multi_indices(&dims) {
            assert!((dec.d.entry(&idx, &idx).norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn symplectic_svd_of_schur_hamiltonian_q() {
        let mut rng = Rng::seed_from(312);
        let dims = [2usize, 2];
        let a = random_paired(&mut rng, &dims, &dims);
        let b = random_paired(&mut rng, &dims, &dims);
        let c = random_paired(&mut rng, &dims, &dims);
        let g = b.einstein(&b.conj_transpose()).unwrap();
        let k = c.conj_transpose().einstein(&c).unwrap();
        let m = hamiltonian_assemble(&HamiltonianBlocks { a, g, k }).unwrap();
        let ham = schur_hamiltonian(&m, None).unwrap();
        let dec = symplectic_svd(&ham.q).unwrap();

        // diagonal identities: S real in [0,1], S^2 + |D|^2 = I
        for idx in multi_indices(&dims) {
            let s = dec.s.entry(&idx, &idx);
            let d = dec.d.entry(&idx, &idx);
            assert!(s.im.abs() < 1e-10);
            assert!(s.re >= -1e-10 && s.re <= 1.0 + 1e-10);
            assert!((s.re * s.re + d.norm_sqr() - 1.0).abs() < 1e-10);
        }
        // reconstruction through the block identity
        let zero = PairedTensor::zeros(Shape::square(dims.to_vec()).unwrap());
        let left = block2x2_n(
            &dec.u.conj_transpose(),
            &zero,
            &zero,
            &dec.u.conj_transpose(),
            1,
        )
        .unwrap();
        let right = block2x2_n(&dec.v, &zero, &zero, &dec.v, 1).unwrap();
        let lhs = left.einstein(&ham.q).unwrap().einstein(&right).unwrap();
        let rhs = block2x2_n(&dec.s, &dec.d, &dec.d.neg(), &dec.s, 1).unwrap();
        assert_tensor_close(&lhs, &rhs, 1e-9);
    }

    #[test]
    fn symplectic_svd_with_repeated_singular_values() {
        // Q1 = cos(H), Q2 = sin(H) for Hermitian H with a doubly
        // degenerate spectrum: the singular values of Q1 coincide in
        // pairs, exercising the group rediagonalization
        let mut rng = Rng::seed_from(315);
        let dims = [2usize, 2];
        let n = 4;
        let basis = {
            let h = crate::tensor::testutil::random_hermitian_paired(&mut rng, &dims);
            herm_eig(h.unfold()).unwrap().1
        };
        let angles = [0.3f64, 0.3, 1.1, 1.1];
        let mut cos_m = Mat::zeros(n, n);
        let mut sin_m = Mat::zeros(n, n);
        for (i, &t) in angles.iter().enumerate() {
            cos_m[(i, i)] = C64::new(Float::cos(t), 0.0);
            sin_m[(i, i)] = C64::new(Float::sin(t), 0.0);
        }
        let q1_mat = basis.matmul(&cos_m).matmul(&basis.conj_transpose());
        let q2_mat = basis.matmul(&sin_m).matmul(&basis.conj_transpose());
        let shape = Shape::square(dims.to_vec()).unwrap();
        let q1 = PairedTensor::fold(shape.clone(), q1_mat).unwrap();
        let q2 = PairedTensor::fold(shape, q2_mat).unwrap();
        let q = block2x2_n(&q1, &q2, &q2.neg(), &q1, 1).unwrap();
        assert!(symplectic_check(&q, 1e-10).unwrap());

        let dec = symplectic_svd(&q).unwrap();
        for idx in crate::shape::multi_indices(&dims) {
            let s = dec.s.entry(&idx, &idx);
            let d = dec.d.entry(&idx, &idx);
            assert!(s.im.abs() < 1e-10);
            assert!((s.re * s.re + d.norm_sqr() - 1.0).abs() < 1e-10);
        }
        let zero = PairedTensor::zeros(Shape::square(dims.to_vec()).unwrap());
        let left = block2x2_n(
            &dec.u.conj_transpose(),
            &zero,
            &zero,
            &dec.u.conj_transpose(),
            1,
        )
        .unwrap();
        let right = block2x2_n(&dec.v, &zero, &zero, &dec.v, 1).unwrap();
        let lhs = left.einstein(&q).unwrap().einstein(&right).unwrap();
        let rhs = block2x2_n(&dec.s, &dec.d, &dec.d.neg(), &dec.s, 1).unwrap();
        assert_tensor_close(&lhs, &rhs, 1e-9);
    }

    #[test]
    fn split_blocks_recovers_assembly() {
        let mut rng = Rng::seed_from(313);
        let dims = [2usize, 2];
        let a = random_paired(&mut rng, &dims, &dims);
        let b = random_paired(&mut rng, &dims, &dims);
        let c = random_paired(&mut rng, &dims, &dims);
        let d = random_paired(&mut rng, &dims, &dims);
        let m = block2x2_n(&a, &b, &c, &d, 1).unwrap();
        let (tl, tr, bl, br) = split_blocks(&m).unwrap();
        assert_tensor_close(&tl, &a, 1e-14);
        assert_tensor_close(&tr, &b, 1e-14);
        assert_tensor_close(&bl, &c, 1e-14);
        assert_tensor_close(&br, &d, 1e-14);
    }

    #[test]
    fn eigentensor_pairs_satisfy_definition() {
        let mut rng = Rng::seed_from(314);
        let a = random_paired(&mut rng, &[2, 2], &[2, 2]);
        for (lambda, x) in u_eigenpairs(&a).unwrap() {
            let ax = a.apply(&x).unwrap();
            let res = ax.sub(&x.scale(lambda)).frobenius_norm();
            assert!(res < 1e-8 * a.frobenius_norm(), "residual {res}");
        }
    }
}
