//! Dense real square tensors of arbitrary order.
//!
//! A tensor of order `m` and dimension `n` stores all `n^m` entries in
//! row-major order (first index slowest). No symmetry is assumed or
//! exploited: contractions honor the exact index pattern of the input.

use crate::error::{GpcpError, Result};

/// An `m`-th order, `n`-dimensional real square tensor with dense storage.
///
/// Immutable after construction; all entries are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    order: usize,
    dim: usize,
    entries: Vec<f64>,
}

impl DenseTensor {
    /// Builds a tensor from a flat row-major entry array of length `dim^order`.
    ///
    /// Rejects empty shapes and non-finite entries.
    pub fn new(order: usize, dim: usize, entries: Vec<f64>) -> Result<Self> {
        if order == 0 || dim == 0 {
            return Err(GpcpError::Validation(format!(
                "tensor order and dim must be positive, got order {order}, dim {dim}"
            )));
        }
        let expected = dim.checked_pow(order as u32).ok_or_else(|| {
            GpcpError::Validation(format!("tensor size {dim}^{order} overflows"))
        })?;
        if entries.len() != expected {
            return Err(GpcpError::Dimension {
                context: "tensor entry array",
                expected,
                found: entries.len(),
            });
        }
        if let Some((index, &value)) = entries.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(GpcpError::NonFinite { index, value });
        }
        Ok(Self { order, dim, entries })
    }

    /// The all-zero tensor of the given shape.
    pub fn zeros(order: usize, dim: usize) -> Self {
        Self::new(order, dim, vec![0.0; dim.pow(order as u32)])
            .expect("zero tensor shape is valid")
    }

    /// The unit tensor: 1 where all indices coincide, 0 elsewhere.
    ///
    /// Order 2 yields the identity matrix.
    pub fn unit(order: usize, dim: usize) -> Self {
        let mut t = Self::zeros(order, dim);
        // diagonal entry (j,...,j) has flat index j * (n^{m-1} + ... + n + 1)
        let stride: usize = (0..order).map(|k| dim.pow(k as u32)).sum();
        for j in 0..dim {
            t.entries[j * stride] = 1.0;
        }
        t
    }

    /// Builds a tensor from a sparse list of (0-based multi-index, value)
    /// pairs; unlisted entries are zero. Later pairs overwrite earlier ones.
    pub fn from_sparse(order: usize, dim: usize, nonzeros: &[(&[usize], f64)]) -> Result<Self> {
        let mut t = Self::zeros(order, dim);
        for (idx, value) in nonzeros {
            let flat = t.flat_index(idx)?;
            if !value.is_finite() {
                return Err(GpcpError::NonFinite { index: flat, value: *value });
            }
            t.entries[flat] = *value;
        }
        Ok(t)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Flat row-major entry array, first index slowest.
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    fn flat_index(&self, idx: &[usize]) -> Result<usize> {
        if idx.len() != self.order {
            return Err(GpcpError::Dimension {
                context: "tensor multi-index",
                expected: self.order,
                found: idx.len(),
            });
        }
        let mut flat = 0;
        for &i in idx {
            if i >= self.dim {
                return Err(GpcpError::Validation(format!(
                    "index {i} out of range for dimension {}",
                    self.dim
                )));
            }
            flat = flat * self.dim + i;
        }
        Ok(flat)
    }

    /// Entry at a 0-based multi-index.
    pub fn get(&self, idx: &[usize]) -> Result<f64> {
        Ok(self.entries[self.flat_index(idx)?])
    }

    /// Contracts against `x` in every slot but the first, returning the
    /// vector whose j-th component is sum over (j2..jm) of
    /// `a[j,j2,..,jm] * x[j2] * .. * x[jm]`.
    ///
    /// Order 1 returns the tensor's own entries (empty product); order 2 is
    /// the matrix-vector product.
    pub fn contract_to_vector(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        // Fold the last index repeatedly: row-major layout makes each pass a
        // (rows x dim) matrix-vector product against x.
        let mut cur = self.entries.clone();
        for _ in 0..self.order - 1 {
            let rows = cur.len() / self.dim;
            for r in 0..rows {
                let off = r * self.dim;
                let mut acc = 0.0;
                for c in 0..self.dim {
                    acc += cur[off + c] * x[c];
                }
                cur[r] = acc;
            }
            cur.truncate(rows);
        }
        Ok(cur)
    }

    /// The homogeneous form value `<x, contract_to_vector(x)>`.
    pub fn contract_to_scalar(&self, x: &[f64]) -> Result<f64> {
        let v = self.contract_to_vector(x)?;
        Ok(v.iter().zip(x).map(|(a, b)| a * b).sum())
    }

    /// Square root of the sum of squared entries.
    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Entrywise scaling by a finite factor.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.order,
            self.dim,
            self.entries.iter().map(|v| v * factor).collect(),
        )
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(GpcpError::Dimension {
                context: "tensor contraction vector",
                expected: self.dim,
                found: x.len(),
            });
        }
        Ok(())
    }
}
