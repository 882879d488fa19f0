//! Batch storage formats.
//!
//! A *batch* holds `num_systems` small matrices that all share one sparsity
//! pattern and one shape. Structural data (row pointers, column indexes) is
//! stored once; only the numeric values are replicated per entry. Values are
//! laid out entry-major: entry `k` owns one contiguous plane, so per-entry
//! kernels touch disjoint memory and can run on independent workers.

mod csr;
mod dense;
mod ell;
mod multivector;
mod stencil;

pub use csr::BatchCsr;
pub use dense::BatchDense;
pub use ell::{BatchEll, ELL_PADDING};
pub use multivector::BatchMultiVector;
pub use stencil::generate_stencil_batch;

use alloc::string::String;
use alloc::vec::Vec;
use core::ops::Range;

/// Element counts of a batch format, split by the three storage classes.
///
/// Counts are in elements, not bytes, so callers can price value and index
/// types separately.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StorageReport {
    /// Per-entry numeric values: replicated `num_systems` times.
    pub value_count: usize,
    /// Column indexes, stored once for the whole batch.
    pub index_count: usize,
    /// Row pointers, stored once for the whole batch.
    pub pointer_count: usize,
}

impl StorageReport {
    /// Total footprint in bytes given the widths of the value and index types.
    /// Row pointers are priced at the index width.
    pub fn total_bytes(&self, value_bytes: usize, index_bytes: usize) -> usize {
        self.value_count * value_bytes + (self.index_count + self.pointer_count) * index_bytes
    }
}

/// One violated invariant found by [`BatchMatrix::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Name of the invariant that failed, e.g. `"row_ptrs nondecreasing"`.
    pub invariant: &'static str,
    /// Human-readable location of the first offending element.
    pub detail: String,
}

/// Common interface over the batch matrix formats.
///
/// `spmv_row_range` is the only required kernel; it must accumulate each row
/// sequentially in ascending stored order so that results are bitwise
/// reproducible regardless of how rows are chunked across calls.
pub trait BatchMatrix {
    /// Number of matrices in the batch.
    fn num_systems(&self) -> usize;
    /// Rows per matrix.
    fn num_rows(&self) -> usize;
    /// Columns per matrix.
    fn num_cols(&self) -> usize;

    /// `y[r] = sum_j A_k[r, j] * x[j]` for every row `r` in `rows`.
    ///
    /// Rows outside `rows` are left untouched. Panics if `entry`, the range,
    /// or the slice lengths are out of bounds; shape checking belongs to the
    /// batch-level wrappers in [`crate::blas`].
    fn spmv_row_range(&self, entry: usize, rows: Range<usize>, x: &[f64], y: &mut [f64]);

    /// `y = A_k * x` over all rows of entry `k`.
    fn spmv_entry(&self, entry: usize, x: &[f64], y: &mut [f64]) {
        self.spmv_row_range(entry, 0..self.num_rows(), x, y);
    }

    /// Stored value at `(row, row)` of entry `k`, or `None` if the pattern
    /// has no diagonal slot there. An explicit stored zero is `Some(0.0)`.
    fn diag_value(&self, entry: usize, row: usize) -> Option<f64>;

    /// Element counts per the format's storage model.
    fn storage_report(&self) -> StorageReport;

    /// Check structural invariants, returning every violation found.
    ///
    /// Constructors run this and refuse malformed input, so a matrix obtained
    /// from this crate always validates clean; the method exists for data that
    /// was mutated in place or assembled elsewhere.
    fn validate(&self) -> Vec<Violation>;
}

/// Runtime-chosen batch format.
///
/// Harness-level code that picks the format from a string holds one of these;
/// solver entry points match on it once and then run fully monomorphized on
/// the concrete format, so the dispatch cost is hoisted out of all per-row
/// and per-iteration work.
#[derive(Debug, Clone)]
pub enum AnyBatchMatrix {
    Csr(BatchCsr),
    Ell(BatchEll),
    Dense(BatchDense),
}

impl AnyBatchMatrix {
    /// Short lowercase format name, matching the CLI `--format` values.
    pub fn format_name(&self) -> &'static str {
        match self {
            AnyBatchMatrix::Csr(_) => "csr",
            AnyBatchMatrix::Ell(_) => "ell",
            AnyBatchMatrix::Dense(_) => "dense",
        }
    }
}

/// Expand any batch format to dense, with zeros in unstored positions.
pub fn dense_of(m: &AnyBatchMatrix) -> BatchDense {
    match m {
        AnyBatchMatrix::Csr(c) => c.to_dense(),
        AnyBatchMatrix::Ell(e) => e.to_dense(),
        AnyBatchMatrix::Dense(d) => d.clone(),
    }
}

impl From<BatchCsr> for AnyBatchMatrix {
    fn from(m: BatchCsr) -> Self {
        AnyBatchMatrix::Csr(m)
    }
}

impl From<BatchEll> for AnyBatchMatrix {
    fn from(m: BatchEll) -> Self {
        AnyBatchMatrix::Ell(m)
    }
}

impl From<BatchDense> for AnyBatchMatrix {
    fn from(m: BatchDense) -> Self {
        AnyBatchMatrix::Dense(m)
    }
}

macro_rules! delegate {
    ($self:ident, $m:ident => $body:expr) => {
        match $self {
            AnyBatchMatrix::Csr($m) => $body,
            AnyBatchMatrix::Ell($m) => $body,
            AnyBatchMatrix::Dense($m) => $body,
        }
    };
}

impl BatchMatrix for AnyBatchMatrix {
    fn num_systems(&self) -> usize {
        delegate!(self, m => m.num_systems())
    }

    fn num_rows(&self) -> usize {
        delegate!(self, m => m.num_rows())
    }

    fn num_cols(&self) -> usize {
        delegate!(self, m => m.num_cols())
    }

    fn spmv_row_range(&self, entry: usize, rows: Range<usize>, x: &[f64], y: &mut [f64]) {
        delegate!(self, m => m.spmv_row_range(entry, rows, x, y))
    }

    fn diag_value(&self, entry: usize, row: usize) -> Option<f64> {
        delegate!(self, m => m.diag_value(entry, row))
    }

    fn storage_report(&self) -> StorageReport {
        delegate!(self, m => m.storage_report())
    }

    fn validate(&self) -> Vec<Violation> {
        delegate!(self, m => m.validate())
    }
}
