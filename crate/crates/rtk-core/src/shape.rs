//! Mode dimensions, multi-index linearization and tensor blockings.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Linearizes a 1-based multi-index `i` against mode dimensions `dims`,
/// first index varying fastest: `ivec(i, I) = i_1 + sum_k (i_k - 1) I_1...I_{k-1}`.
///
/// The result is 1-based and ranges over `1..=|I|`.
pub fn ivec(index: &[usize], dims: &[usize]) -> Result<usize> {
    if index.len() != dims.len() {
        return Err(Error::ShapeMismatch(format!(
            "index has {} entries, dimensions have {}",
            index.len(),
            dims.len()
        )));
    }
    let mut out = 0usize;
    let mut stride = 1usize;
    for (k, (&i, &d)) in index.iter().zip(dims).enumerate() {
        if i < 1 || i > d {
            return Err(Error::IndexOutOfRange(format!(
                "index {i} at mode {} outside 1..={d}",
                k + 1
            )));
        }
        out += (i - 1) * stride;
        stride *= d;
    }
    Ok(out + 1)
}

/// 0-based companion of [`ivec`]: no validation, `i` 0-based, result 0-based.
#[inline]
pub(crate) fn ivec0(index: &[usize], dims: &[usize]) -> usize {
    let mut out = 0usize;
    let mut stride = 1usize;
    for (&i, &d) in index.iter().zip(dims) {
        out += i * stride;
        stride *= d;
    }
    out
}

/// Iterates all 0-based multi-indices of `dims` in ivec order
/// (first mode fastest). Yields `|dims|` index vectors.
pub(crate) fn multi_indices(dims: &[usize]) -> MultiIndexIter {
    MultiIndexIter {
        dims: dims.to_vec(),
        next: Some(alloc::vec![0; dims.len()]),
    }
}

pub(crate) struct MultiIndexIter {
    dims: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl Iterator for MultiIndexIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        for k in 0..self.dims.len() {
            succ[k] += 1;
            if succ[k] < self.dims[k] {
                self.next = Some(succ);
                return Some(current);
            }
            succ[k] = 0;
        }
        // wrapped around every mode: `current` was the last index
        if self.dims.contains(&0) {
            return None;
        }
        Some(current)
    }
}

/// Interleaved mode dimensions of an even-order paired tensor:
/// `row_dims = (I_1, ..., I_N)`, `col_dims = (J_1, ..., J_N)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shape {
    row_dims: Vec<usize>,
    col_dims: Vec<usize>,
}

impl Shape {
    /// Builds a shape, validating that both dimension lists are nonempty,
    /// of equal length, and strictly positive.
    pub fn new(row_dims: Vec<usize>, col_dims: Vec<usize>) -> Result<Self> {
        if row_dims.is_empty() || row_dims.len() != col_dims.len() {
            return Err(Error::ShapeMismatch(format!(
                "row/column mode counts {} vs {} (need equal, >= 1)",
                row_dims.len(),
                col_dims.len()
            )));
        }
        if row_dims.iter().chain(&col_dims).any(|&d| d == 0) {
            return Err(Error::ShapeMismatch("mode dimensions must be >= 1".into()));
        }
        Ok(Shape { row_dims, col_dims })
    }

    /// Square shape with `col_dims = row_dims`.
    pub fn square(dims: Vec<usize>) -> Result<Self> {
        Shape::new(dims.clone(), dims)
    }

    /// Number of index pairs N.
    pub fn order(&self) -> usize {
        self.row_dims.len()
    }

    pub fn row_dims(&self) -> &[usize] {
        &self.row_dims
    }

    pub fn col_dims(&self) -> &[usize] {
        &self.col_dims
    }

    /// Product of row dimensions `|I|`.
    pub fn row_len(&self) -> usize {
        self.row_dims.iter().product()
    }

    /// Product of column dimensions `|J|`.
    pub fn col_len(&self) -> usize {
        self.col_dims.iter().product()
    }

    /// True when every row dimension equals its column dimension.
    pub fn is_square(&self) -> bool {
        self.row_dims == self.col_dims
    }

    /// Shape of the (conjugate) transpose: row and column modes swapped.
    pub fn transposed(&self) -> Shape {
        Shape {
            row_dims: self.col_dims.clone(),
            col_dims: self.row_dims.clone(),
        }
    }

    /// Interleaved dimension list `(I_1, J_1, ..., I_N, J_N)`.
    pub fn interleaved(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(2 * self.order());
        for n in 0..self.order() {
            out.push(self.row_dims[n]);
            out.push(self.col_dims[n]);
        }
        out
    }
}

/// A blocking of a dense tensor: one partition vector per mode, each summing
/// to the mode dimension. Identifies the tensor as a block tensor whose
/// blocks are contiguous index windows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Blocking {
    parts: Vec<Vec<usize>>,
}

impl Blocking {
    /// Builds a blocking for the given mode dimensions, validating that each
    /// partition consists of positive parts summing to the mode dimension.
    pub fn new(parts: Vec<Vec<usize>>, dims: &[usize]) -> Result<Self> {
        if parts.len() != dims.len() {
            return Err(Error::ShapeMismatch(format!(
                "blocking has {} mode partitions, tensor has {} modes",
                parts.len(),
                dims.len()
            )));
        }
        for (n, (p, &d)) in parts.iter().zip(dims).enumerate() {
            if p.is_empty() || p.contains(&0) {
                return Err(Error::ShapeMismatch(format!(
                    "mode {} partition must be nonempty with positive parts",
                    n + 1
                )));
            }
            let total: usize = p.iter().sum();
            if total != d {
                return Err(Error::ShapeMismatch(format!(
                    "mode {} partition sums to {total}, dimension is {d}",
                    n + 1
                )));
            }
        }
        Ok(Blocking { parts })
    }

    /// Uniform blocking splitting mode `n` into `counts[n]` equal parts.
    pub fn uniform(counts: &[usize], dims: &[usize]) -> Result<Self> {
        let mut parts = Vec::with_capacity(dims.len());
        for (n, (&c, &d)) in counts.iter().zip(dims).enumerate() {
            if c == 0 || d % c != 0 {
                return Err(Error::ShapeMismatch(format!(
                    "mode {} dimension {d} not divisible into {c} equal parts",
                    n + 1
                )));
            }
            parts.push(alloc::vec![d / c; c]);
        }
        Blocking::new(parts, dims)
    }

    /// Number of blocks along each mode.
    pub fn block_counts(&self) -> Vec<usize> {
        self.parts.iter().map(|p| p.len()).collect()
    }

    /// Partition vector of mode `n` (0-based).
    pub fn mode_parts(&self, n: usize) -> &[usize] {
        &self.parts[n]
    }

    /// 0-based start offset and length of block `b` (0-based) in mode `n`.
    pub fn window(&self, n: usize, b: usize) -> Result<(usize, usize)> {
        let p = self
            .parts
            .get(n)
            .ok_or_else(|| Error::IndexOutOfRange(format!("mode {n} outside blocking")))?;
        if b >= p.len() {
            return Err(Error::IndexOutOfRange(format!(
                "block {b} outside 0..{} in mode {n}",
                p.len()
            )));
        }
        let start = p[..b].iter().sum();
        Ok((start, p[b]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ivec_first_and_last() {
        assert_eq!(ivec(&[1, 1], &[3, 2]).unwrap(), 1);
        assert_eq!(ivec(&[3, 2], &[3, 2]).unwrap(), 6);
    }

    #[test]
    fn ivec_matches_enumeration_order() {
        // enumerate all tuples of (2,3,2) fastest-first and confirm position
        let dims = [2usize, 3, 2];
        let mut position = 1;
        for i3 in 1..=2 {
            for i2 in 1..=3 {
                for i1 in 1..=2 {
                    assert_eq!(ivec(&[i1, i2, i3], &dims).unwrap(), position);
                    position += 1;
                }
            }
        }
        assert_eq!(ivec(&[2, 1, 2], &dims).unwrap(), 8);
    }

    #[test]
    fn ivec_rejects_bad_indices() {
        assert!(matches!(
            ivec(&[0, 1], &[3, 2]),
            Err(Error::IndexOutOfRange(_))
        ));
        assert!(matches!(
            ivec(&[1, 3], &[3, 2]),
            Err(Error::IndexOutOfRange(_))
        ));
        assert!(matches!(ivec(&[1], &[3, 2]), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn multi_index_iteration_is_bijective() {
        let dims = [3usize, 2, 2];
        let indices: Vec<_> = multi_indices(&dims).collect();
        assert_eq!(indices.len(), 12);
        for (pos, idx) in indices.iter().enumerate() {
            assert_eq!(ivec0(idx, &dims), pos);
        }
    }

    #[test]
    fn blocking_windows() {
        let blocking =
            Blocking::new(alloc::vec![alloc::vec![2, 1], alloc::vec![2]], &[3, 2]).unwrap();
        assert_eq!(blocking.window(0, 0).unwrap(), (0, 2));
        assert_eq!(blocking.window(0, 1).unwrap(), (2, 1));
        assert!(blocking.window(0, 2).is_err());
        assert!(Blocking::new(alloc::vec![alloc::vec![2, 2], alloc::vec![2]], &[3, 2]).is_err());
    }

    #[test]
    fn shape_validation() {
        assert!(Shape::new(alloc::vec![3, 2], alloc::vec![3, 2]).is_ok());
        assert!(Shape::new(alloc::vec![3, 0], alloc::vec![3, 2]).is_err());
        assert!(Shape::new(alloc::vec![3], alloc::vec![3, 2]).is_err());
        let s = Shape::new(alloc::vec![3, 2], alloc::vec![1, 1]).unwrap();
        assert_eq!(s.row_len(), 6);
        assert_eq!(s.col_len(), 1);
        assert_eq!(s.interleaved(), alloc::vec![3, 1, 2, 1]);
    }
}
