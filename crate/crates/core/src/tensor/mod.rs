//! Dense tensors over R^d with lexicographic multi-index layout, plus the
//! Hermite machinery built on them.
//!
//! Entry `(i_1, ..., i_t)` of an order-`t` tensor lives at flat offset
//! `sum_j i_j * d^(t-1-j)`, so the first index varies slowest.

mod hermite;
mod linalg;
mod moments;
mod packed;
pub mod quadrature;

pub use hermite::{
    hermite_kernel, hermite_scalar, hermite_table, hermite_tensor, hermite_tensor_factored,
    hermite_tensor_partition, hermite_tensor_with_cap,
};
pub use linalg::{orthonormalize, symmetric_eigen, top_left_singular_vectors, Eigen, SingularBasis};
pub use moments::{expected_hksq, gaussian_moment_tensor, hermite_second_moment};
pub use packed::PackedLayout;
pub use quadrature::GaussHermite;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default cap on the number of dense entries any constructed tensor may hold.
pub const DEFAULT_ENTRY_CAP: usize = 10_000_000;

/// Highest tensor order supported by the kernel.
pub const MAX_ORDER: usize = 8;

/// Number of entries `d^t`, or an error if it exceeds `cap`.
pub fn entry_count(dim: usize, order: usize, cap: usize) -> Result<usize> {
    let too_large = Error::TensorTooLarge { order, dim, cap };
    let n = u32::try_from(order)
        .ok()
        .and_then(|o| dim.checked_pow(o))
        .ok_or_else(|| too_large.clone())?;
    if n > cap {
        return Err(too_large);
    }
    Ok(n)
}

/// Writes the base-`dim` digits of `flat` into `out` (most significant first).
#[inline]
pub fn decode_index(mut flat: usize, dim: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = flat % dim;
        flat /= dim;
    }
}

#[inline]
pub fn encode_index(idx: &[usize], dim: usize) -> usize {
    idx.iter().fold(0, |acc, &i| acc * dim + i)
}

/// Dense order-`t` tensor over R^d.
///
/// Tensors built by the Hermite and moment routines are permutation
/// symmetric; [`SymmetricTensor::outer`] is the one constructor that is not
/// (it is the plain tensor product used in flattening identities).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetricTensor<F> {
    order: usize,
    dim: usize,
    data: Vec<F>,
}

impl<F: Scalar> SymmetricTensor<F> {
    pub fn zeros(order: usize, dim: usize) -> Result<Self> {
        Self::zeros_with_cap(order, dim, DEFAULT_ENTRY_CAP)
    }

    pub fn zeros_with_cap(order: usize, dim: usize, cap: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParam("tensor dimension must be positive".into()));
        }
        let n = entry_count(dim, order, cap)?;
        Ok(Self { order, dim, data: vec![F::zero(); n] })
    }

    pub fn scalar(value: F, dim: usize) -> Self {
        Self { order: 0, dim, data: vec![value] }
    }

    pub fn vector(v: &[F]) -> Self {
        Self { order: 1, dim: v.len(), data: v.to_vec() }
    }

    pub fn identity(dim: usize) -> Self {
        let mut data = vec![F::zero(); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = F::one();
        }
        Self { order: 2, dim, data }
    }

    pub fn from_data(order: usize, dim: usize, data: Vec<F>) -> Result<Self> {
        let n = entry_count(dim, order, usize::MAX)?;
        if data.len() != n {
            return Err(Error::DimMismatch { expected: n, actual: data.len() });
        }
        Ok(Self { order, dim, data })
    }

    /// `v^{⊗k}`.
    pub fn power(v: &[F], k: usize) -> Result<Self> {
        let dim = v.len();
        let mut out = Self::zeros(k, dim)?;
        let mut idx = vec![0usize; k];
        for (flat, slot) in out.data.iter_mut().enumerate() {
            decode_index(flat, dim, &mut idx);
            *slot = idx.iter().fold(F::one(), |acc, &i| acc * v[i]);
        }
        Ok(out)
    }

    /// Plain tensor product `a ⊗ b` (first `a.order` indices belong to `a`).
    pub fn outer(a: &Self, b: &Self) -> Result<Self> {
        if a.dim != b.dim {
            return Err(Error::DimMismatch { expected: a.dim, actual: b.dim });
        }
        let mut out = Self::zeros(a.order + b.order, a.dim)?;
        let nb = b.data.len();
        for (i, &x) in a.data.iter().enumerate() {
            for (j, &y) in b.data.iter().enumerate() {
                out.data[i * nb + j] = x * y;
            }
        }
        Ok(out)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[F] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [F] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<F> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, idx: &[usize]) -> F {
        debug_assert_eq!(idx.len(), self.order);
        self.data[encode_index(idx, self.dim)]
    }

    /// Euclidean norm of the data array (Frobenius norm of the tensor).
    pub fn norm(&self) -> F {
        crate::scalar::norm(&self.data)
    }

    pub fn inner(&self, other: &Self) -> Result<F> {
        self.check_same_shape(other)?;
        Ok(crate::scalar::dot(&self.data, &other.data))
    }

    /// `⟨T, v^{⊗t}⟩`, contracting one mode at a time.
    pub fn contract_power(&self, v: &[F]) -> Result<F> {
        if v.len() != self.dim {
            return Err(Error::DimMismatch { expected: self.dim, actual: v.len() });
        }
        let mut cur = self.data.clone();
        for _ in 0..self.order {
            let next_len = cur.len() / self.dim;
            let mut next = vec![F::zero(); next_len];
            for (r, slot) in next.iter_mut().enumerate() {
                let row = &cur[r * self.dim..(r + 1) * self.dim];
                *slot = crate::scalar::dot(row, v);
            }
            cur = next;
        }
        Ok(cur[0])
    }

    pub fn add_assign(&mut self, other: &Self) -> Result<()> {
        self.check_same_shape(other)?;
        self.data.iter_mut().zip(&other.data).for_each(|(a, &b)| *a += b);
        Ok(())
    }

    pub fn sub_assign(&mut self, other: &Self) -> Result<()> {
        self.check_same_shape(other)?;
        self.data.iter_mut().zip(&other.data).for_each(|(a, &b)| *a -= b);
        Ok(())
    }

    pub fn scale(&mut self, s: F) {
        self.data.iter_mut().for_each(|a| *a *= s);
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<F> {
        self.check_same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .fold(F::zero(), |m, (&a, &b)| m.max((a - b).abs())))
    }

    /// True when every entry equals the entry at its sorted multi-index to
    /// within `tol`, which is equivalent to invariance under all index
    /// permutations.
    pub fn is_symmetric(&self, tol: F) -> bool {
        let mut idx = vec![0usize; self.order];
        for (flat, &v) in self.data.iter().enumerate() {
            decode_index(flat, self.dim, &mut idx);
            idx.sort_unstable();
            if (self.data[encode_index(&idx, self.dim)] - v).abs() > tol {
                return false;
            }
        }
        true
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch { expected: self.dim, actual: other.dim });
        }
        if self.order != other.order {
            return Err(Error::DimMismatch { expected: self.order, actual: other.order });
        }
        Ok(())
    }
}

/// All ways of choosing which `k` of `t` output positions come from the first
/// factor, as `(positions_of_a, positions_of_b)` in increasing order.
fn index_splits(t: usize, k: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << t) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let (a, b): (Vec<usize>, Vec<usize>) = (0..t).partition(|&p| mask & (1 << p) != 0);
        out.push((a, b));
    }
    out
}

/// `Sym(a ⊗ b)`: the average of `a^{S_1} ⊗ b^{S_2}` over all splits of the
/// output positions into `|S_1| = order(a)` and `|S_2| = order(b)`.
pub fn sym_outer<F: Scalar>(a: &SymmetricTensor<F>, b: &SymmetricTensor<F>) -> Result<SymmetricTensor<F>> {
    sym_outer_with_cap(a, b, DEFAULT_ENTRY_CAP)
}

pub fn sym_outer_with_cap<F: Scalar>(
    a: &SymmetricTensor<F>,
    b: &SymmetricTensor<F>,
    cap: usize,
) -> Result<SymmetricTensor<F>> {
    if a.dim != b.dim {
        return Err(Error::DimMismatch { expected: a.dim, actual: b.dim });
    }
    let dim = a.dim;
    let t = a.order + b.order;
    let mut out = SymmetricTensor::zeros_with_cap(t, dim, cap)?;
    let splits = index_splits(t, a.order);
    let norm = F::lit(1.0 / splits.len() as f64);
    let mut idx = vec![0usize; t];
    for (flat, slot) in out.data.iter_mut().enumerate() {
        decode_index(flat, dim, &mut idx);
        let mut acc = F::zero();
        for (pa, pb) in &splits {
            let ia = pa.iter().fold(0, |s, &p| s * dim + idx[p]);
            let ib = pb.iter().fold(0, |s, &p| s * dim + idx[p]);
            acc += a.data[ia] * b.data[ib];
        }
        *slot = acc * norm;
    }
    Ok(out)
}

/// First-mode flattening: a `d × d^(t-1)` row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct FlatMatrix<F> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<F>,
}

impl<F: Scalar> FlatMatrix<F> {
    pub fn new(rows: usize, cols: usize, data: Vec<F>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimMismatch { expected: rows * cols, actual: data.len() });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn frobenius(&self) -> F {
        crate::scalar::norm(&self.data)
    }

    /// `M Mᵀ`, a `rows × rows` symmetric matrix.
    pub fn gram(&self) -> Vec<F> {
        let r = self.rows;
        let mut g = vec![F::zero(); r * r];
        for i in 0..r {
            for j in i..r {
                let v = crate::scalar::dot(self.row(i), self.row(j));
                g[i * r + j] = v;
                g[j * r + i] = v;
            }
        }
        g
    }
}

/// Lexicographic layout makes the first-mode flattening a reshape.
pub fn flatten<F: Scalar>(t: &SymmetricTensor<F>) -> Result<FlatMatrix<F>> {
    if t.order == 0 {
        return Err(Error::FlattenScalar);
    }
    let cols = t.data.len() / t.dim;
    FlatMatrix::new(t.dim, cols, t.data.clone())
}
