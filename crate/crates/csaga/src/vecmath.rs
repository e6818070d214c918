//! Dense and sparse vectors with the handful of operations the solvers
//! and diagnostics need. Not a general linear algebra layer.

use crate::error::{Error, Result};

/// A dense vector of 64-bit floats: iterates, gradients, table averages.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseVec(pub Vec<f64>);

impl DenseVec {
    pub fn zeros(d: usize) -> Self {
        DenseVec(vec![0.0; d])
    }

    pub fn from_vec(values: Vec<f64>) -> Self {
        DenseVec(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    /// `self += alpha * other`.
    pub fn add_scaled(&mut self, alpha: f64, other: &DenseVec) -> Result<()> {
        check_len(self.len(), other.len())?;
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += alpha * b;
        }
        Ok(())
    }

    pub fn scale(&mut self, c: f64) {
        for a in &mut self.0 {
            *a *= c;
        }
    }

    pub fn fill_zero(&mut self) {
        self.0.fill(0.0);
    }

    pub fn copy_from(&mut self, other: &DenseVec) -> Result<()> {
        check_len(self.len(), other.len())?;
        self.0.copy_from_slice(&other.0);
        Ok(())
    }

    pub fn sq_norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum()
    }

    pub fn all_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl std::ops::Index<usize> for DenseVec {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl std::ops::IndexMut<usize> for DenseVec {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

/// A sparse vector with strictly increasing 0-based indices and finite,
/// nonzero values. Feature rows of a dataset are stored this way.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseVec {
    dim: usize,
    idx: Vec<usize>,
    val: Vec<f64>,
}

impl SparseVec {
    pub fn new(dim: usize, idx: Vec<usize>, val: Vec<f64>) -> Result<Self> {
        if idx.len() != val.len() {
            return Err(Error::InvalidArgument(format!(
                "sparse index/value length mismatch: {} vs {}",
                idx.len(),
                val.len()
            )));
        }
        let mut prev: Option<usize> = None;
        for &j in &idx {
            if j >= dim {
                return Err(Error::InvalidArgument(format!(
                    "sparse index {j} out of range for dim {dim}"
                )));
            }
            if let Some(p) = prev {
                if j <= p {
                    return Err(Error::InvalidArgument(format!(
                        "sparse indices not strictly increasing at {j}"
                    )));
                }
            }
            prev = Some(j);
        }
        for &v in &val {
            if !v.is_finite() || v == 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "sparse value {v} must be finite and nonzero"
                )));
            }
        }
        Ok(SparseVec { dim, idx, val })
    }

    pub fn empty(dim: usize) -> Self {
        SparseVec {
            dim,
            idx: Vec::new(),
            val: Vec::new(),
        }
    }

    /// Sparse encoding of a dense slice (drops exact zeros).
    pub fn from_dense(values: &[f64]) -> Result<Self> {
        let mut idx = Vec::new();
        let mut val = Vec::new();
        for (j, &v) in values.iter().enumerate() {
            if v != 0.0 {
                idx.push(j);
                val.push(v);
            }
        }
        SparseVec::new(values.len(), idx, val)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.idx.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.idx
    }

    pub fn values(&self) -> &[f64] {
        &self.val
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.idx.iter().copied().zip(self.val.iter().copied())
    }

    pub fn sq_norm(&self) -> f64 {
        self.val.iter().map(|v| v * v).sum()
    }
}

/// Inner product of a sparse vector with a dense one.
pub fn dot(a: &SparseVec, x: &DenseVec) -> Result<f64> {
    check_len(a.dim(), x.len())?;
    let mut s = 0.0;
    for (j, v) in a.iter() {
        s += v * x[j];
    }
    Ok(s)
}

/// `x[j] += alpha * v` for every entry `(j, v)` of `a`; other coordinates
/// are untouched.
pub fn axpy_sparse(alpha: f64, a: &SparseVec, x: &mut DenseVec) -> Result<()> {
    check_len(a.dim(), x.len())?;
    for (j, v) in a.iter() {
        x[j] += alpha * v;
    }
    Ok(())
}

/// Squared Euclidean distance `‖x − y‖²`.
pub fn sq_dist(x: &DenseVec, y: &DenseVec) -> Result<f64> {
    check_len(x.len(), y.len())?;
    let mut s = 0.0;
    for (a, b) in x.0.iter().zip(&y.0) {
        let d = a - b;
        s += d * d;
    }
    Ok(s)
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}
