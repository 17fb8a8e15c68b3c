//! Structured tensor formats and operations: generalized CPD (sums of
//! matrix outer products), the tensor Kronecker product, the Vec operation
//! and its permutation/Kronecker-sum companions.
//!
//! Structured arithmetic is exact: every operation here has a densified
//! counterpart, and the representation keeps factor matrices so products
//! and Kronecker constructions stay cheap.

use alloc::format;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::dense::{svd_full, Mat};
use crate::error::{Error, Result};
use crate::shape::{multi_indices, Shape};
use crate::tensor::{PairedTensor, PlainTensor};
use crate::C64;

/// Even-order paired tensor in generalized CPD format: a sum of
/// `terms` matrix outer products `A_r^(1) ∘ ... ∘ A_r^(N)`.
///
/// The number of terms is a representation rank; it is not reduced after
/// arithmetic and is never claimed to be the minimal CP rank.
#[derive(Debug, Clone, PartialEq)]
pub struct GcpdTensor {
    // terms[r][n] is the mode-n factor of term r, size I_n x J_n
    factors: Vec<Vec<Mat>>,
}

impl GcpdTensor {
    pub fn new(factors: Vec<Vec<Mat>>) -> Result<GcpdTensor> {
        if factors.is_empty() || factors[0].is_empty() {
            return Err(Error::ShapeMismatch(
                "a GCPD needs at least one term with at least one mode".into(),
            ));
        }
        let order = factors[0].len();
        for (r, term) in factors.iter().enumerate() {
            if term.len() != order {
                return Err(Error::ShapeMismatch(format!(
                    "term {r} has {} modes, expected {order}",
                    term.len()
                )));
            }
            for (n, f) in term.iter().enumerate() {
                if f.nrows() != factors[0][n].nrows() || f.ncols() != factors[0][n].ncols() {
                    return Err(Error::ShapeMismatch(format!(
                        "term {r} mode {} factor is {}x{}, expected {}x{}",
                        n + 1,
                        f.nrows(),
                        f.ncols(),
                        factors[0][n].nrows(),
                        factors[0][n].ncols()
                    )));
                }
            }
        }
        Ok(GcpdTensor { factors })
    }

    pub fn rank_one(factors: Vec<Mat>) -> Result<GcpdTensor> {
        GcpdTensor::new(alloc::vec![factors])
    }

    /// Number of outer-product terms in the representation.
    pub fn terms(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> usize {
        self.factors[0].len()
    }

    /// Mode-`mode` factor of a term (mode 1-based).
    pub fn factor(&self, term: usize, mode: usize) -> &Mat {
        &self.factors[term][mode - 1]
    }

    pub fn shape(&self) -> Shape {
        let row_dims = self.factors[0].iter().map(|f| f.nrows()).collect();
        let col_dims = self.factors[0].iter().map(|f| f.ncols()).collect();
        Shape::new(row_dims, col_dims).expect("validated at construction")
    }

    /// Expands the sum of outer products into a dense paired tensor.
    pub fn densify(&self) -> PairedTensor {
        let shape = self.shape();
        let mut out = PairedTensor::zeros(shape.clone());
        for i in multi_indices(shape.row_dims()) {
            for j in multi_indices(shape.col_dims()) {
                let mut sum = C64::zero();
                for term in &self.factors {
                    let mut prod = C64::new(1.0, 0.0);
                    for (n, f) in term.iter().enumerate() {
                        prod *= f[(i[n], j[n])];
                    }
                    sum += prod;
                }
                out.set_entry(&i, &j, sum);
            }
        }
        out
    }

    /// Structure-preserving Einstein product: term `(r, s)` of the result
    /// has mode-n factor `A_r^(n) B_s^(n)`; the output has `R*S` terms
    /// ordered by `ivec((r, s), (R, S))`.
    pub fn einstein(&self, other: &GcpdTensor) -> Result<GcpdTensor> {
        if self.order() != other.order() {
            return Err(Error::ShapeMismatch("GCPD orders differ".into()));
        }
        for n in 0..self.order() {
            if self.factors[0][n].ncols() != other.factors[0][n].nrows() {
                return Err(Error::ShapeMismatch(format!(
                    "mode {} factors are not conformal",
                    n + 1
                )));
            }
        }
        let mut terms = Vec::with_capacity(self.terms() * other.terms());
        for s in 0..other.terms() {
            for r in 0..self.terms() {
                let product: Vec<Mat> = self.factors[r]
                    .iter()
                    .zip(&other.factors[s])
                    .map(|(a, b)| a.matmul(b))
                    .collect();
                terms.push(product);
            }
        }
        GcpdTensor::new(terms)
    }

    /// Factor-wise conjugate transpose.
    pub fn conj_transpose(&self) -> GcpdTensor {
        GcpdTensor {
            factors: self
                .factors
                .iter()
                .map(|term| term.iter().map(|f| f.conj_transpose()).collect())
                .collect(),
        }
    }

    /// Factor-wise Kronecker product; term counts multiply.
    pub fn kron(&self, other: &GcpdTensor) -> Result<GcpdTensor> {
        if self.order() != other.order() {
            return Err(Error::ShapeMismatch("GCPD orders differ".into()));
        }
        let mut terms = Vec::with_capacity(self.terms() * other.terms());
        for a in &self.factors {
            for b in &other.factors {
                let term: Vec<Mat> = a.iter().zip(b).map(|(x, y)| x.kron(y)).collect();
                terms.push(term);
            }
        }
        GcpdTensor::new(terms)
    }

    /// Structured Vec image: term r becomes the outer product of the
    /// column-stacked factors.
    pub fn vec(&self) -> CpTensor {
        let dims: Vec<usize> = self.factors[0]
            .iter()
            .map(|f| f.nrows() * f.ncols())
            .collect();
        let terms = self
            .factors
            .iter()
            .map(|term| {
                term.iter()
                    .map(|f| f.data().to_vec()) // column-major = classical vec
                    .collect()
            })
            .collect();
        CpTensor { dims, terms }
    }

    /// Frobenius or spectral norm of a rank-one representation: the product
    /// of the factor norms.
    pub fn rank_one_norm(&self, which: NormKind) -> Result<f64> {
        if self.terms() != 1 {
            return Err(Error::NotRankOne { rank: self.terms() });
        }
        let mut out = 1.0;
        for f in &self.factors[0] {
            out *= match which {
                NormKind::Frobenius => f.frobenius_norm(),
                NormKind::Spectral => svd_full(f)?.sigma_max(),
            };
        }
        Ok(out)
    }
}

/// Norm selector for [`GcpdTensor::rank_one_norm`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    Frobenius,
    Spectral,
}

/// Order-N tensor in CP format: a sum of vector outer products. Produced by
/// the structured Vec operation.
#[derive(Debug, Clone, PartialEq)]
pub struct CpTensor {
    dims: Vec<usize>,
    // terms[r][n] is the mode-n vector of term r
    terms: Vec<Vec<Vec<C64>>>,
}

impl CpTensor {
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn terms(&self) -> usize {
        self.terms.len()
    }

    pub fn densify(&self) -> PlainTensor {
        let mut out = PlainTensor::zeros(self.dims.clone());
        for idx in multi_indices(&self.dims) {
            let mut sum = C64::zero();
            for term in &self.terms {
                let mut prod = C64::new(1.0, 0.0);
                for (n, v) in term.iter().enumerate() {
                    prod *= v[idx[n]];
                }
                sum += prod;
            }
            out.set_entry(&idx, sum);
        }
        out
    }
}

/// Mode-n product of an order-N tensor with a matrix (`n` 1-based):
/// contracts mode n of `x` against the columns of `m`.
pub fn mode_product(x: &PlainTensor, n: usize, m: &Mat) -> Result<PlainTensor> {
    let (dims, data) = mode_product_raw(x.dims(), x.data(), n, m)?;
    PlainTensor::from_data(dims, data)
}

fn mode_product_raw(
    dims: &[usize],
    data: &[C64],
    n: usize,
    m: &Mat,
) -> Result<(Vec<usize>, Vec<C64>)> {
    if n == 0 || n > dims.len() {
        return Err(Error::IndexOutOfRange(format!(
            "mode {n} of an order-{} tensor",
            dims.len()
        )));
    }
    let axis = n - 1;
    if m.ncols() != dims[axis] {
        return Err(Error::ShapeMismatch(format!(
            "mode-{n} product: matrix has {} columns, mode has dimension {}",
            m.ncols(),
            dims[axis]
        )));
    }
    let mut out_dims = dims.to_vec();
    out_dims[axis] = m.nrows();
    let inner: usize = dims[..axis].iter().product();
    let outer: usize = dims[axis + 1..].iter().product();
    let dim = dims[axis];
    let new_dim = m.nrows();
    let mut out = alloc::vec![C64::zero(); inner * new_dim * outer];
    for o in 0..outer {
        for j in 0..new_dim {
            for k in 0..dim {
                let coeff = m[(j, k)];
                if coeff.is_zero() {
                    continue;
                }
                let src = (o * dim + k) * inner;
                let dst = (o * new_dim + j) * inner;
                for i in 0..inner {
                    out[dst + i] += coeff * data[src + i];
                }
            }
        }
    }
    Ok((out_dims, out))
}

/// `A * E` for rank-one `A = A_1 ∘ ... ∘ A_N`: mode products on the odd
/// (row) modes of `E`, never densifying `A`.
pub fn rankone_left_apply(a: &GcpdTensor, e: &PairedTensor) -> Result<PairedTensor> {
    if a.terms() != 1 {
        return Err(Error::NotRankOne { rank: a.terms() });
    }
    if a.order() != e.order() {
        return Err(Error::ShapeMismatch("orders differ".into()));
    }
    let (mut dims, mut data) = to_interleaved(e);
    for (n, f) in a.factors[0].iter().enumerate() {
        let (d, v) = mode_product_raw(&dims, &data, 2 * n + 1, f)?;
        dims = d;
        data = v;
    }
    fold_interleaved(&dims, &data)
}

/// `E * A` for rank-one `A`: mode products with transposed factors on the
/// even (column) modes of `E`.
pub fn rankone_right_apply(e: &PairedTensor, a: &GcpdTensor) -> Result<PairedTensor> {
    if a.terms() != 1 {
        return Err(Error::NotRankOne { rank: a.terms() });
    }
    if a.order() != e.order() {
        return Err(Error::ShapeMismatch("orders differ".into()));
    }
    let (mut dims, mut data) = to_interleaved(e);
    for (n, f) in a.factors[0].iter().enumerate() {
        let (d, v) = mode_product_raw(&dims, &data, 2 * n + 2, &f.transpose())?;
        dims = d;
        data = v;
    }
    fold_interleaved(&dims, &data)
}

// The unfolding layout orders all row modes before all column modes; the
// mode-product kernel wants plain ivec order over the interleaved dims.
fn to_interleaved(e: &PairedTensor) -> (Vec<usize>, Vec<C64>) {
    let dims = e.shape().interleaved();
    let len: usize = dims.iter().product();
    let mut data = alloc::vec![C64::zero(); len];
    for (pos, idx) in multi_indices(&dims).enumerate() {
        let i: Vec<usize> = idx.iter().step_by(2).copied().collect();
        let j: Vec<usize> = idx.iter().skip(1).step_by(2).copied().collect();
        data[pos] = e.entry(&i, &j);
    }
    (dims, data)
}

fn fold_interleaved(dims: &[usize], data: &[C64]) -> Result<PairedTensor> {
    let row_dims: Vec<usize> = dims.iter().step_by(2).copied().collect();
    let col_dims: Vec<usize> = dims.iter().skip(1).step_by(2).copied().collect();
    let shape = Shape::new(row_dims, col_dims)?;
    let mut out = PairedTensor::zeros(shape);
    for (pos, idx) in multi_indices(dims).enumerate() {
        let i: Vec<usize> = idx.iter().step_by(2).copied().collect();
        let j: Vec<usize> = idx.iter().skip(1).step_by(2).copied().collect();
        out.set_entry(&i, &j, data[pos]);
    }
    Ok(out)
}

/// Interprets a paired tensor of lower order as one of order `order` by
/// appending trailing unit modes. The flat layout is unchanged.
pub fn pad_order(a: &PairedTensor, order: usize) -> PairedTensor {
    if a.order() >= order {
        return a.clone();
    }
    let mut row_dims = a.shape().row_dims().to_vec();
    let mut col_dims = a.shape().col_dims().to_vec();
    row_dims.resize(order, 1);
    col_dims.resize(order, 1);
    let shape = Shape::new(row_dims, col_dims).expect("padded dims valid");
    PairedTensor::fold(shape, a.unfold().clone()).expect("layout unchanged")
}

/// Tensor Kronecker product of paired tensors: block `(i, j)` of the result
/// is `A_{ij} * B`. Operands of different orders are padded with trailing
/// unit modes first.
pub fn kron(a: &PairedTensor, b: &PairedTensor) -> PairedTensor {
    let order = a.order().max(b.order());
    let a = pad_order(a, order);
    let b = pad_order(b, order);
    let row_dims: Vec<usize> = a
        .shape()
        .row_dims()
        .iter()
        .zip(b.shape().row_dims())
        .map(|(x, y)| x * y)
        .collect();
    let col_dims: Vec<usize> = a
        .shape()
        .col_dims()
        .iter()
        .zip(b.shape().col_dims())
        .map(|(x, y)| x * y)
        .collect();
    let shape = Shape::new(row_dims, col_dims).expect("kron dims valid");
    let mut out = PairedTensor::zeros(shape);
    let bi = b.shape().row_dims().to_vec();
    let bj = b.shape().col_dims().to_vec();
    for i in multi_indices(a.shape().row_dims()) {
        for j in multi_indices(a.shape().col_dims()) {
            let aij = a.entry(&i, &j);
            if aij.is_zero() {
                continue;
            }
            for k in multi_indices(&bi) {
                for l in multi_indices(&bj) {
                    let row: Vec<usize> = i
                        .iter()
                        .zip(&k)
                        .zip(&bi)
                        .map(|((ii, kk), d)| ii * d + kk)
                        .collect();
                    let col: Vec<usize> = j
                        .iter()
                        .zip(&l)
                        .zip(&bj)
                        .map(|((jj, ll), d)| jj * d + ll)
                        .collect();
                    let value = aij * b.entry(&k, &l);
                    out.set_entry(&row, &col, value);
                }
            }
        }
    }
    out
}

/// Vec operation: sends a paired tensor with row dims `J` and column dims
/// `K` to the order-N tensor of dimensions `K_n * J_n` whose `k`-th block is
/// the subtensor at column multi-index `k`. Reduces to column stacking for
/// N = 1.
pub fn vec(x: &PairedTensor) -> PlainTensor {
    let jdims = x.shape().row_dims();
    let kdims = x.shape().col_dims();
    let dims: Vec<usize> = jdims.iter().zip(kdims).map(|(j, k)| j * k).collect();
    let mut out = PlainTensor::zeros(dims);
    for k in multi_indices(kdims) {
        for j in multi_indices(jdims) {
            let idx: Vec<usize> = j
                .iter()
                .zip(&k)
                .zip(jdims)
                .map(|((jj, kk), jdim)| kk * jdim + jj)
                .collect();
            let value = x.entry(&j, &k);
            out.set_entry(&idx, value);
        }
    }
    out
}

/// Inverse of [`vec`] for the given target shape.
pub fn unvec(y: &PlainTensor, shape: &Shape) -> Result<PairedTensor> {
    let jdims = shape.row_dims();
    let kdims = shape.col_dims();
    let expected: Vec<usize> = jdims.iter().zip(kdims).map(|(j, k)| j * k).collect();
    if y.dims() != expected {
        return Err(Error::ShapeMismatch(format!(
            "unvec: dims {:?} do not factor as {:?}",
            y.dims(),
            expected
        )));
    }
    let mut out = PairedTensor::zeros(shape.clone());
    for k in multi_indices(kdims) {
        for j in multi_indices(jdims) {
            let idx: Vec<usize> = j
                .iter()
                .zip(&k)
                .zip(jdims)
                .map(|((jj, kk), jdim)| kk * jdim + jj)
                .collect();
            let value = y.entry(&idx);
            out.set_entry(&j, &k, value);
        }
    }
    Ok(out)
}

/// The permutation tensor `P` with `vec(E^T) = P * vec(E)` for every square
/// paired tensor `E` on dims `I`. Materialized densely: the unfolding is
/// `|I|^2 x |I|^2`.
pub fn transpose_permutation_tensor(dims: &[usize]) -> PairedTensor {
    let sq: Vec<usize> = dims.iter().map(|d| d * d).collect();
    let shape = Shape::square(sq).expect("valid dims");
    let mut out = PairedTensor::zeros(shape);
    for i in multi_indices(dims) {
        for j in multi_indices(dims) {
            let row: Vec<usize> = j
                .iter()
                .zip(&i)
                .zip(dims)
                .map(|((jj, ii), d)| jj * d + ii)
                .collect();
            let col: Vec<usize> = i
                .iter()
                .zip(&j)
                .zip(dims)
                .map(|((ii, jj), d)| ii * d + jj)
                .collect();
            out.set_entry(&row, &col, C64::new(1.0, 0.0));
        }
    }
    out
}

/// Kronecker-sum tensor `A^T ∘ I ∘ ... ∘ I + I ∘ A^T ∘ ... ∘ I + ...`
/// (N terms) for a square matrix `A`. Its U-eigenvalues are the N-fold sums
/// of eigenvalues of `A`.
pub fn kronsum_tensor(a: &Mat, order: usize) -> Result<GcpdTensor> {
    if !a.is_square() || order == 0 {
        return Err(Error::ShapeMismatch(
            "kronsum needs a square matrix and order >= 1".into(),
        ));
    }
    let m = a.nrows();
    let at = a.transpose();
    let mut terms = Vec::with_capacity(order);
    for n in 0..order {
        let term: Vec<Mat> = (0..order)
            .map(|k| if k == n { at.clone() } else { Mat::identity(m) })
            .collect();
        terms.push(term);
    }
    GcpdTensor::new(terms)
}
