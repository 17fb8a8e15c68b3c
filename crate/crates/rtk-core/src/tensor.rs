//! Even-order paired tensors and order-N tensors over the complex field.
//!
//! A [`PairedTensor`] stores its entries in the column-major layout of its
//! unfolding matrix, with multi-indices linearized by [`ivec`](crate::ivec)
//! (first index fastest). The unfolding map is therefore zero-copy and the
//! Einstein product is matrix multiplication on storage.

use alloc::format;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::dense::{herm_eig, svd_full, LuFactors, Mat};
use crate::error::{Error, Result};
use crate::shape::{ivec0, multi_indices, Blocking, Shape};
use crate::C64;

/// Dense order-N tensor; carrier for states, eigentensors and Vec images.
#[derive(Debug, Clone, PartialEq)]
pub struct PlainTensor {
    dims: Vec<usize>,
    data: Vec<C64>,
}

impl PlainTensor {
    pub fn zeros(dims: Vec<usize>) -> PlainTensor {
        let len = dims.iter().product();
        PlainTensor {
            dims,
            data: alloc::vec![C64::zero(); len],
        }
    }

    pub fn from_data(dims: Vec<usize>, data: Vec<C64>) -> Result<PlainTensor> {
        let len: usize = dims.iter().product();
        if data.len() != len {
            return Err(Error::ShapeMismatch(format!(
                "data length {} does not match dimensions {:?}",
                data.len(),
                dims
            )));
        }
        Ok(PlainTensor { dims, data })
    }

    pub fn constant(dims: Vec<usize>, value: C64) -> PlainTensor {
        let len = dims.iter().product();
        PlainTensor {
            dims,
            data: alloc::vec![value; len],
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    /// Entry at a 0-based multi-index.
    pub fn entry(&self, index: &[usize]) -> C64 {
        self.data[ivec0(index, &self.dims)]
    }

    pub fn set_entry(&mut self, index: &[usize], value: C64) {
        self.data[ivec0(index, &self.dims)] = value;
    }

    pub fn add(&self, other: &PlainTensor) -> PlainTensor {
        debug_assert_eq!(self.dims, other.dims);
        PlainTensor {
            dims: self.dims.clone(),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &PlainTensor) -> PlainTensor {
        debug_assert_eq!(self.dims, other.dims);
        PlainTensor {
            dims: self.dims.clone(),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, factor: C64) -> PlainTensor {
        PlainTensor {
            dims: self.dims.clone(),
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data
            .iter()
            .map(|z| z.norm_sqr())
            .fold(0.0, |a, b| a + b)
            .sqrt()
    }

    /// `<X, Y> = sum conj(X) .* Y`.
    pub fn inner_product(&self, other: &PlainTensor) -> Result<C64> {
        if self.dims != other.dims {
            return Err(Error::ShapeMismatch(format!(
                "inner product dims {:?} vs {:?}",
                self.dims, other.dims
            )));
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .fold(C64::zero(), |acc, (x, y)| acc + x.conj() * y))
    }

    /// Contiguous window `start..start+len` along mode `n` (1-based, like
    /// every mode number in this crate).
    pub fn mode_window(&self, n: usize, start: usize, len: usize) -> PlainTensor {
        let m = n - 1;
        let mut dims = self.dims.clone();
        dims[m] = len;
        let mut out = PlainTensor::zeros(dims);
        for idx in multi_indices(out.dims()) {
            let mut src = idx.clone();
            src[m] += start;
            let value = self.entry(&src);
            out.set_entry(&idx, value);
        }
        out
    }
}

/// Dense even-order paired tensor: the tensor analogue of a matrix, with
/// interleaved row/column modes.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedTensor {
    shape: Shape,
    mat: Mat,
}

impl PairedTensor {
    pub fn zeros(shape: Shape) -> PairedTensor {
        let mat = Mat::zeros(shape.row_len(), shape.col_len());
        PairedTensor { shape, mat }
    }

    /// Identity tensor on square dimensions `dims`.
    pub fn identity(dims: &[usize]) -> PairedTensor {
        let shape = Shape::square(dims.to_vec()).expect("valid dims");
        let mat = Mat::identity(shape.row_len());
        PairedTensor { shape, mat }
    }

    /// Folds an unfolding matrix back into a paired tensor (zero-copy).
    pub fn fold(shape: Shape, mat: Mat) -> Result<PairedTensor> {
        if mat.nrows() != shape.row_len() || mat.ncols() != shape.col_len() {
            return Err(Error::ShapeMismatch(format!(
                "matrix {}x{} does not unfold shape {:?}x{:?}",
                mat.nrows(),
                mat.ncols(),
                shape.row_dims(),
                shape.col_dims()
            )));
        }
        Ok(PairedTensor { shape, mat })
    }

    /// Rank-one paired tensor `A_1 ∘ A_2 ∘ ... ∘ A_N` from factor matrices.
    pub fn from_rank_one(factors: &[Mat]) -> Result<PairedTensor> {
        if factors.is_empty() {
            return Err(Error::ShapeMismatch("no factors".into()));
        }
        let row_dims: Vec<usize> = factors.iter().map(|f| f.nrows()).collect();
        let col_dims: Vec<usize> = factors.iter().map(|f| f.ncols()).collect();
        let shape = Shape::new(row_dims, col_dims)?;
        let mut out = PairedTensor::zeros(shape);
        for i in multi_indices(out.shape.row_dims()) {
            for j in multi_indices(out.shape.col_dims()) {
                let mut value = C64::new(1.0, 0.0);
                for (n, f) in factors.iter().enumerate() {
                    value *= f[(i[n], j[n])];
                }
                out.set_entry(&i, &j, value);
            }
        }
        Ok(out)
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn order(&self) -> usize {
        self.shape.order()
    }

    pub fn is_square(&self) -> bool {
        self.shape.is_square()
    }

    /// The unfolding matrix (zero-copy view of storage).
    pub fn unfold(&self) -> &Mat {
        &self.mat
    }

    /// Mutable access to the unfolding.
    pub fn unfold_mut(&mut self) -> &mut Mat {
        &mut self.mat
    }

    pub fn into_unfold(self) -> Mat {
        self.mat
    }

    /// Entry at 0-based row multi-index `i` and column multi-index `j`.
    pub fn entry(&self, i: &[usize], j: &[usize]) -> C64 {
        self.mat[(
            ivec0(i, self.shape.row_dims()),
            ivec0(j, self.shape.col_dims()),
        )]
    }

    pub fn set_entry(&mut self, i: &[usize], j: &[usize], value: C64) {
        let r = ivec0(i, self.shape.row_dims());
        let c = ivec0(j, self.shape.col_dims());
        self.mat[(r, c)] = value;
    }

    pub fn add(&self, other: &PairedTensor) -> PairedTensor {
        debug_assert_eq!(self.shape, other.shape);
        PairedTensor {
            shape: self.shape.clone(),
            mat: self.mat.add(&other.mat),
        }
    }

    pub fn sub(&self, other: &PairedTensor) -> PairedTensor {
        debug_assert_eq!(self.shape, other.shape);
        PairedTensor {
            shape: self.shape.clone(),
            mat: self.mat.sub(&other.mat),
        }
    }

    pub fn scale(&self, factor: C64) -> PairedTensor {
        PairedTensor {
            shape: self.shape.clone(),
            mat: self.mat.scale(factor),
        }
    }

    pub fn neg(&self) -> PairedTensor {
        self.scale(C64::new(-1.0, 0.0))
    }

    /// Einstein product `self * other`, contracting column modes of `self`
    /// against row modes of `other`.
    pub fn einstein(&self, other: &PairedTensor) -> Result<PairedTensor> {
        if self.shape.col_dims() != other.shape.row_dims() {
            return Err(Error::ShapeMismatch(format!(
                "einstein product: column dims {:?} vs row dims {:?}",
                self.shape.col_dims(),
                other.shape.row_dims()
            )));
        }
        let shape = Shape::new(
            self.shape.row_dims().to_vec(),
            other.shape.col_dims().to_vec(),
        )?;
        Ok(PairedTensor {
            shape,
            mat: self.mat.matmul(&other.mat),
        })
    }

    /// Applies the tensor to an order-N tensor, contracting all column modes.
    pub fn apply(&self, x: &PlainTensor) -> Result<PlainTensor> {
        if self.shape.col_dims() != x.dims() {
            return Err(Error::ShapeMismatch(format!(
                "apply: column dims {:?} vs operand dims {:?}",
                self.shape.col_dims(),
                x.dims()
            )));
        }
        let data = self.mat.matvec(x.data());
        PlainTensor::from_data(self.shape.row_dims().to_vec(), data)
    }

    /// `<X, A*X>`, the quadratic form behind definiteness tests.
    pub fn quadratic_form(&self, x: &PlainTensor) -> Result<C64> {
        x.inner_product(&self.apply(x)?)
    }

    pub fn transpose(&self) -> PairedTensor {
        PairedTensor {
            shape: self.shape.transposed(),
            mat: self.mat.transpose(),
        }
    }

    pub fn conj_transpose(&self) -> PairedTensor {
        PairedTensor {
            shape: self.shape.transposed(),
            mat: self.mat.conj_transpose(),
        }
    }

    /// Hermitian average `(A + A^H) / 2`.
    pub fn hermitian_part(&self) -> PairedTensor {
        self.add(&self.conj_transpose()).scale(C64::new(0.5, 0.0))
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.is_square() && self.mat.is_hermitian(rel_tol)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.frobenius_norm()
    }

    pub fn inner_product(&self, other: &PairedTensor) -> Result<C64> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch("inner product shapes differ".into()));
        }
        Ok(self
            .mat
            .data()
            .iter()
            .zip(other.mat.data())
            .fold(C64::zero(), |acc, (x, y)| acc + x.conj() * y))
    }

    /// Largest singular value of the unfolding.
    pub fn spectral_norm(&self) -> Result<f64> {
        Ok(svd_full(&self.mat)?.sigma_max())
    }

    /// Inverse through LU on the unfolding. Fails with
    /// [`Error::SingularTensor`] when a pivot falls below
    /// `1e-12 * ||A||_F`.
    pub fn inverse(&self) -> Result<PairedTensor> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch(
                "inverse requires row dims = col dims".into(),
            ));
        }
        let lu = LuFactors::factor(&self.mat, 1e-12 * self.mat.frobenius_norm())?;
        Ok(PairedTensor {
            shape: self.shape.clone(),
            mat: lu.inverse(),
        })
    }

    /// Positive semidefiniteness of a Hermitian tensor: returns the verdict
    /// together with the smallest eigenvalue of the Hermitian unfolding.
    pub fn is_positive_semidefinite(&self, tol: f64) -> Result<(bool, f64)> {
        if !self.is_hermitian(1e-8) {
            return Err(Error::NotHermitian);
        }
        let (w, _) = herm_eig(&self.mat)?;
        let smallest = w.first().copied().unwrap_or(0.0);
        Ok((smallest >= -tol, smallest))
    }
}

/// n-mode row block tensor `[A_1 A_2 ... A_k]_n` (mode `n` is 1-based):
/// operands share every dimension and are laid side by side along the
/// n-mode column.
pub fn concat_row_n(blocks: &[&PairedTensor], n: usize) -> Result<PairedTensor> {
    if blocks.is_empty() {
        return Err(Error::ShapeMismatch("empty concatenation".into()));
    }
    let shape0 = blocks[0].shape();
    if n == 0 || n > shape0.order() {
        return Err(Error::IndexOutOfRange(format!(
            "mode {n} of order {}",
            shape0.order()
        )));
    }
    if blocks.iter().any(|b| b.shape() != shape0) {
        return Err(Error::ShapeMismatch(
            "row block operands must share a shape".into(),
        ));
    }
    let m = n - 1;
    let jn = shape0.col_dims()[m];
    let mut col_dims = shape0.col_dims().to_vec();
    col_dims[m] = jn * blocks.len();
    let shape = Shape::new(shape0.row_dims().to_vec(), col_dims)?;
    let mut out = PairedTensor::zeros(shape);
    for i in multi_indices(shape0.row_dims()) {
        for j in multi_indices(out.shape.col_dims()) {
            let block = j[m] / jn;
            let mut jj = j.clone();
            jj[m] = j[m] % jn;
            let value = blocks[block].entry(&i, &jj);
            out.set_entry(&i, &j, value);
        }
    }
    Ok(out)
}

/// n-mode column block tensor `[A_1; A_2; ...; A_k]_n`, defined through the
/// transposed row concatenation.
pub fn concat_col_n(blocks: &[&PairedTensor], n: usize) -> Result<PairedTensor> {
    let transposed: Vec<PairedTensor> = blocks.iter().map(|b| b.transpose()).collect();
    let refs: Vec<&PairedTensor> = transposed.iter().collect();
    Ok(concat_row_n(&refs, n)?.transpose())
}

/// 2x2 block tensor `[[A, B], [C, D]]_n`; doubles both mode-n dimensions.
pub fn block2x2_n(
    a: &PairedTensor,
    b: &PairedTensor,
    c: &PairedTensor,
    d: &PairedTensor,
    n: usize,
) -> Result<PairedTensor> {
    let top = concat_row_n(&[a, b], n)?;
    let bottom = concat_row_n(&[c, d], n)?;
    concat_col_n(&[&top, &bottom], n)
}

/// Extracts block `index` (0-based per interleaved mode) of a blocking of
/// the paired tensor's interleaved dimensions.
pub fn extract_block(
    tensor: &PairedTensor,
    blocking: &Blocking,
    index: &[usize],
) -> Result<PairedTensor> {
    let interleaved = tensor.shape().interleaved();
    if index.len() != interleaved.len() {
        return Err(Error::ShapeMismatch(format!(
            "block index has {} entries, tensor has {} interleaved modes",
            index.len(),
            interleaved.len()
        )));
    }
    let order = tensor.order();
    let mut row_start = Vec::with_capacity(order);
    let mut col_start = Vec::with_capacity(order);
    let mut row_dims = Vec::with_capacity(order);
    let mut col_dims = Vec::with_capacity(order);
    for k in 0..order {
        let (rs, rl) = blocking.window(2 * k, index[2 * k])?;
        let (cs, cl) = blocking.window(2 * k + 1, index[2 * k + 1])?;
        row_start.push(rs);
        col_start.push(cs);
        row_dims.push(rl);
        col_dims.push(cl);
    }
    let shape = Shape::new(row_dims, col_dims)?;
    let mut out = PairedTensor::zeros(shape);
    for i in multi_indices(out.shape.row_dims()) {
        for j in multi_indices(out.shape.col_dims()) {
            let src_i: Vec<usize> = i.iter().zip(&row_start).map(|(a, s)| a + s).collect();
            let src_j: Vec<usize> = j.iter().zip(&col_start).map(|(a, s)| a + s).collect();
            let value = tensor.entry(&src_i, &src_j);
            out.set_entry(&i, &j, value);
        }
    }
    Ok(out)
}

/// Mode-n column block of order-N tensors `[X_1; ...; X_k]_n` (n 1-based).
pub fn concat_plain_n(blocks: &[&PlainTensor], n: usize) -> Result<PlainTensor> {
    if blocks.is_empty() {
        return Err(Error::ShapeMismatch("empty concatenation".into()));
    }
    let dims0 = blocks[0].dims().to_vec();
    if n == 0 || n > dims0.len() {
        return Err(Error::IndexOutOfRange(format!(
            "mode {n} of order {}",
            dims0.len()
        )));
    }
    if blocks.iter().any(|b| b.dims() != dims0) {
        return Err(Error::ShapeMismatch(
            "stacked operands must share dimensions".into(),
        ));
    }
    let m = n - 1;
    let jn = dims0[m];
    let mut dims = dims0.clone();
    dims[m] = jn * blocks.len();
    let mut out = PlainTensor::zeros(dims);
    for idx in multi_indices(out.dims()) {
        let block = idx[m] / jn;
        let mut src = idx.clone();
        src[m] = idx[m] % jn;
        let value = blocks[block].entry(&src);
        out.set_entry(&idx, value);
    }
    Ok(out)
}

/// Perfect shuffle permutation `Pi_{q,r}` of size `q*r`: sends
/// `z` to `[z(1:r:s); z(2:r:s); ...; z(r:r:s)]`.
pub fn perfect_shuffle(q: usize, r: usize) -> Mat {
    let s = q * r;
    let mut p = Mat::zeros(s, s);
    for i in 0..r {
        for j in 0..q {
            p[(i * q + j, i + j * r)] = C64::new(1.0, 0.0);
        }
    }
    p
}

/// Permutation matrix `P` relating the unfolding of an n-mode 2x2 block
/// tensor (square dims `dims`, mode `n` 1-based) to the 2x2 block matrix
/// of the blocks' unfoldings:
/// `unfold([[A,B],[C,D]]_n) = P [[phi(A), phi(B)], [phi(C), phi(D)]] P^T`.
///
/// In block-matrix coordinates the block index is the slowest digit; in
/// the tensor it sits directly above the mode-n digit. `P` therefore
/// factors as shuffle stages `Q_k = I_{I_{k+1}..I_N} (x) Pi_{2,I_k} (x)
/// I_{I_1..I_{k-1}}` that carry the block digit inward past one mode at a
/// time, applied for k = N down to n+1: `P = Q_{n+1} Q_{n+2} ... Q_N`.
pub fn shuffle_permutation(n: usize, dims: &[usize]) -> Mat {
    let order = dims.len();
    let total: usize = 2 * dims.iter().product::<usize>();
    let mut p = Mat::identity(total);
    for k in (n + 1)..=order {
        let left: usize = dims[k..].iter().product();
        let right: usize = dims[..k - 1].iter().product();
        let qk = Mat::identity(left)
            .kron(&perfect_shuffle(2, dims[k - 1]))
            .kron(&Mat::identity(right));
        p = p.matmul(&qk);
    }
    p
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;
    use crate::rng::Rng;

    pub fn random_paired(rng: &mut Rng, row_dims: &[usize], col_dims: &[usize]) -> PairedTensor {
        let shape = Shape::new(row_dims.to_vec(), col_dims.to_vec()).unwrap();
        let mut t = PairedTensor::zeros(shape);
        for k in 0..t.unfold().data().len() {
            let v = C64::new(rng.normal(), rng.normal());
            t.mat.data_mut()[k] = v;
        }
        t
    }

    pub fn random_hermitian_paired(rng: &mut Rng, dims: &[usize]) -> PairedTensor {
        let a = random_paired(rng, dims, dims);
        a.hermitian_part()
    }

    pub fn random_plain(rng: &mut Rng, dims: &[usize]) -> PlainTensor {
        let mut t = PlainTensor::zeros(dims.to_vec());
        for v in t.data_mut() {
            *v = C64::new(rng.normal(), rng.normal());
        }
        t
    }

    pub fn assert_tensor_close(a: &PairedTensor, b: &PairedTensor, tol: f64) {
        assert_eq!(a.shape(), b.shape(), "shapes differ");
        let scale = a.frobenius_norm().max(b.frobenius_norm()).max(1.0);
        let diff = a.sub(b).frobenius_norm();
        assert!(
            diff <= tol * scale,
            "tensors differ by {diff:e} (scale {scale:e})"
        );
    }

    /// Nested-loop contraction straight from the definition of the Einstein
    /// product; the independent oracle for the matmul-backed implementation.
    pub fn einstein_oracle(a: &PairedTensor, b: &PairedTensor) -> PairedTensor {
        let shape =
            Shape::new(a.shape().row_dims().to_vec(), b.shape().col_dims().to_vec()).unwrap();
        let mut out = PairedTensor::zeros(shape);
        for i in multi_indices(a.shape().row_dims()) {
            for k in multi_indices(b.shape().col_dims()) {
                let mut sum = C64::new(0.0, 0.0);
                for j in multi_indices(a.shape().col_dims()) {
                    sum += a.entry(&i, &j) * b.entry(&j, &k);
                }
                out.set_entry(&i, &k, sum);
            }
        }
        out
    }
}
