//! Batched vector and matrix-vector operations.
//!
//! Every reduction here accumulates sequentially in ascending index order.
//! That single rule is what makes the whole crate bitwise reproducible: a
//! batch op, the same op inside a fused solver loop, and the same op run
//! under any worker partitioning all perform the identical float additions
//! in the identical order. The [`entry`] module holds the per-entry slice
//! kernels; the batch-level wrappers validate shapes and loop over entries.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::formats::{BatchMatrix, BatchMultiVector};

/// One scalar per batch entry, e.g. a dot product or a norm.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchScalar {
    num_systems: usize,
    values: Vec<f64>,
}

impl BatchScalar {
    pub fn constant(num_systems: usize, value: f64) -> Self {
        BatchScalar {
            num_systems,
            values: vec![value; num_systems],
        }
    }

    pub fn from_values(values: Vec<f64>) -> Self {
        BatchScalar {
            num_systems: values.len(),
            values,
        }
    }

    pub fn num_systems(&self) -> usize {
        self.num_systems
    }

    pub fn value(&self, k: usize) -> f64 {
        self.values[k]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Per-entry slice kernels.
///
/// These are the exact loops the fused solvers run; the batch wrappers below
/// reuse them so both paths are the same arithmetic.
pub mod entry {
    /// Dot product, accumulated left to right.
    #[inline]
    pub fn dot(x: &[f64], y: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), y.len());
        let mut acc = 0.0;
        for i in 0..x.len() {
            acc += x[i] * y[i];
        }
        acc
    }

    /// Euclidean norm via the plain sum of squares.
    #[inline]
    pub fn norm2(x: &[f64]) -> f64 {
        libm::sqrt(dot(x, x))
    }

    /// `y[i] += alpha * x[i]`.
    #[inline]
    pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), y.len());
        for i in 0..x.len() {
            y[i] += alpha * x[i];
        }
    }

    /// `x[i] *= alpha`.
    #[inline]
    pub fn scale(alpha: f64, x: &mut [f64]) {
        for v in x {
            *v *= alpha;
        }
    }

    /// `|| b - ax ||_2` without materializing the difference.
    #[inline]
    pub fn residual_norm(b: &[f64], ax: &[f64]) -> f64 {
        debug_assert_eq!(b.len(), ax.len());
        let mut acc = 0.0;
        for i in 0..b.len() {
            let d = b[i] - ax[i];
            acc += d * d;
        }
        libm::sqrt(acc)
    }
}

fn check_same_shape(what: &str, x: &BatchMultiVector, y: &BatchMultiVector) -> Result<(), Error> {
    if x.num_systems() != y.num_systems() || x.length() != y.length() {
        return Err(Error::ShapeMismatch(format!(
            "{what}: {} systems of length {} vs {} systems of length {}",
            x.num_systems(),
            x.length(),
            y.num_systems(),
            y.length()
        )));
    }
    Ok(())
}

fn check_scalar(what: &str, alpha: &BatchScalar, x: &BatchMultiVector) -> Result<(), Error> {
    if alpha.num_systems() != x.num_systems() {
        return Err(Error::ShapeMismatch(format!(
            "{what}: {} scalars for {} systems",
            alpha.num_systems(),
            x.num_systems()
        )));
    }
    Ok(())
}

/// `y_k = A_k * x_k` for every entry `k`.
pub fn spmv<M: BatchMatrix>(a: &M, x: &BatchMultiVector) -> Result<BatchMultiVector, Error> {
    if a.num_systems() != x.num_systems() || a.num_cols() != x.length() {
        return Err(Error::ShapeMismatch(format!(
            "spmv: matrix batch {} x ({} x {}) against vector batch {} x {}",
            a.num_systems(),
            a.num_rows(),
            a.num_cols(),
            x.num_systems(),
            x.length()
        )));
    }
    let mut y = BatchMultiVector::zeros(a.num_systems(), a.num_rows());
    for k in 0..a.num_systems() {
        a.spmv_entry(k, x.entry(k), y.entry_mut(k));
    }
    Ok(y)
}

/// SpMV over one entry, driven in chunks of `row_chunk` rows.
///
/// This mirrors how a work-group sized kernel walks a matrix taller than the
/// group. Chunking is numerically inert: each row is still one contiguous
/// ascending accumulation, so any chunk size gives bitwise-equal results.
pub fn spmv_entry_chunked<M: BatchMatrix>(
    a: &M,
    entry: usize,
    x: &[f64],
    y: &mut [f64],
    row_chunk: usize,
) {
    let n = a.num_rows();
    debug_assert!(row_chunk > 0);
    let mut start = 0;
    while start < n {
        let end = (start + row_chunk).min(n);
        a.spmv_row_range(entry, start..end, x, y);
        start = end;
    }
}

/// Per-entry dot products.
pub fn dot(x: &BatchMultiVector, y: &BatchMultiVector) -> Result<BatchScalar, Error> {
    check_same_shape("dot", x, y)?;
    let mut out = Vec::with_capacity(x.num_systems());
    for k in 0..x.num_systems() {
        out.push(entry::dot(x.entry(k), y.entry(k)));
    }
    Ok(BatchScalar::from_values(out))
}

/// Per-entry Euclidean norms.
pub fn norm2(x: &BatchMultiVector) -> BatchScalar {
    let mut out = Vec::with_capacity(x.num_systems());
    for k in 0..x.num_systems() {
        out.push(entry::norm2(x.entry(k)));
    }
    BatchScalar::from_values(out)
}

/// `y_k += alpha_k * x_k` for every entry `k`.
pub fn axpy(
    alpha: &BatchScalar,
    x: &BatchMultiVector,
    y: &mut BatchMultiVector,
) -> Result<(), Error> {
    check_same_shape("axpy", x, y)?;
    check_scalar("axpy", alpha, x)?;
    for k in 0..x.num_systems() {
        entry::axpy(alpha.value(k), x.entry(k), y.entry_mut(k));
    }
    Ok(())
}

/// `x_k *= alpha_k` for every entry `k`.
pub fn scale(alpha: &BatchScalar, x: &mut BatchMultiVector) -> Result<(), Error> {
    check_scalar("scale", alpha, x)?;
    for k in 0..x.num_systems() {
        entry::scale(alpha.value(k), x.entry_mut(k));
    }
    Ok(())
}
