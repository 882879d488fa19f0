use alloc::format;
use alloc::vec::Vec;
use core::ops::Range;

use super::dense::BatchDense;
use super::{BatchMatrix, StorageReport, Violation};
use crate::error::Error;

/// Batch of sparse matrices in compressed-sparse-row form with one shared
/// pattern.
///
/// `row_ptrs` and `col_idxs` describe the pattern once; `values` holds one
/// plane of `nnz` coefficients per entry, entry-major. Column indexes are
/// strictly increasing within each row, which fixes the accumulation order
/// of every row product and makes results bitwise reproducible.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchCsr {
    num_systems: usize,
    num_rows: usize,
    num_cols: usize,
    row_ptrs: Vec<usize>,
    col_idxs: Vec<usize>,
    values: Vec<f64>,
}

impl BatchCsr {
    /// Build a batch CSR matrix, rejecting any structural defect.
    pub fn new(
        num_systems: usize,
        num_rows: usize,
        num_cols: usize,
        row_ptrs: Vec<usize>,
        col_idxs: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self, Error> {
        if num_systems == 0 || num_rows == 0 || num_cols == 0 {
            return Err(Error::InvalidDimension(format!(
                "batch shape {num_systems} x ({num_rows} x {num_cols}) has a zero extent"
            )));
        }
        let m = BatchCsr {
            num_systems,
            num_rows,
            num_cols,
            row_ptrs,
            col_idxs,
            values,
        };
        match m.validate().into_iter().next() {
            None => Ok(m),
            Some(v) => Err(Error::InvalidStructure(format!(
                "{}: {}",
                v.invariant, v.detail
            ))),
        }
    }

    /// Build without checking invariants. Intended for data that was already
    /// validated (e.g. planes copied from an existing batch); [`Self::validate`]
    /// can audit the result.
    pub fn from_parts_unchecked(
        num_systems: usize,
        num_rows: usize,
        num_cols: usize,
        row_ptrs: Vec<usize>,
        col_idxs: Vec<usize>,
        values: Vec<f64>,
    ) -> Self {
        BatchCsr {
            num_systems,
            num_rows,
            num_cols,
            row_ptrs,
            col_idxs,
            values,
        }
    }

    /// Convert a dense batch, keeping every position that is nonzero in *any*
    /// entry so the single shared pattern covers the whole batch. Positions
    /// zero in all entries are dropped; a position kept for one entry stores
    /// explicit zeros for the others.
    pub fn from_dense(m: &BatchDense) -> Result<Self, Error> {
        let (ns, nr, nc) = (m.num_systems(), m.num_rows(), m.num_cols());
        let mut row_ptrs = Vec::with_capacity(nr + 1);
        let mut col_idxs = Vec::new();
        row_ptrs.push(0usize);
        for r in 0..nr {
            for c in 0..nc {
                if (0..ns).any(|k| m.get(k, r, c) != 0.0) {
                    col_idxs.push(c);
                }
            }
            row_ptrs.push(col_idxs.len());
        }
        let nnz = col_idxs.len();
        let mut values = Vec::with_capacity(ns * nnz);
        for k in 0..ns {
            for r in 0..nr {
                for &c in &col_idxs[row_ptrs[r]..row_ptrs[r + 1]] {
                    values.push(m.get(k, r, c));
                }
            }
        }
        BatchCsr::new(ns, nr, nc, row_ptrs, col_idxs, values)
    }

    /// Expand to a dense batch with zeros in unstored positions.
    pub fn to_dense(&self) -> BatchDense {
        let mut d = BatchDense::zeros(self.num_systems, self.num_rows, self.num_cols);
        for k in 0..self.num_systems {
            for r in 0..self.num_rows {
                for i in self.row_ptrs[r]..self.row_ptrs[r + 1] {
                    d.set(k, r, self.col_idxs[i], self.values[k * self.nnz() + i]);
                }
            }
        }
        d
    }

    /// Stored nonzeros per entry.
    pub fn nnz(&self) -> usize {
        self.col_idxs.len()
    }

    pub fn row_ptrs(&self) -> &[usize] {
        &self.row_ptrs
    }

    pub fn col_idxs(&self) -> &[usize] {
        &self.col_idxs
    }

    /// All value planes, entry-major.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Value plane of entry `k`.
    pub fn values_entry(&self, k: usize) -> &[f64] {
        let nnz = self.nnz();
        &self.values[k * nnz..(k + 1) * nnz]
    }

    pub fn values_entry_mut(&mut self, k: usize) -> &mut [f64] {
        let nnz = self.nnz();
        &mut self.values[k * nnz..(k + 1) * nnz]
    }
}

impl BatchMatrix for BatchCsr {
    fn num_systems(&self) -> usize {
        self.num_systems
    }

    fn num_rows(&self) -> usize {
        self.num_rows
    }

    fn num_cols(&self) -> usize {
        self.num_cols
    }

    fn spmv_row_range(&self, entry: usize, rows: Range<usize>, x: &[f64], y: &mut [f64]) {
        let vals = self.values_entry(entry);
        for r in rows {
            let mut acc = 0.0;
            for i in self.row_ptrs[r]..self.row_ptrs[r + 1] {
                acc += vals[i] * x[self.col_idxs[i]];
            }
            y[r] = acc;
        }
    }

    fn diag_value(&self, entry: usize, row: usize) -> Option<f64> {
        let span = self.row_ptrs[row]..self.row_ptrs[row + 1];
        let cols = &self.col_idxs[span.clone()];
        cols.binary_search(&row)
            .ok()
            .map(|pos| self.values_entry(entry)[span.start + pos])
    }

    fn storage_report(&self) -> StorageReport {
        StorageReport {
            value_count: self.num_systems * self.nnz(),
            index_count: self.nnz(),
            pointer_count: self.num_rows + 1,
        }
    }

    fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.row_ptrs.len() != self.num_rows + 1 {
            out.push(Violation {
                invariant: "row_ptrs length",
                detail: format!(
                    "expected {} pointers for {} rows, found {}",
                    self.num_rows + 1,
                    self.num_rows,
                    self.row_ptrs.len()
                ),
            });
            return out;
        }
        if self.row_ptrs[0] != 0 {
            out.push(Violation {
                invariant: "row_ptrs starts at zero",
                detail: format!("row_ptrs[0] = {}", self.row_ptrs[0]),
            });
        }
        for r in 0..self.num_rows {
            if self.row_ptrs[r + 1] < self.row_ptrs[r] {
                out.push(Violation {
                    invariant: "row_ptrs nondecreasing",
                    detail: format!(
                        "row_ptrs[{}] = {} > row_ptrs[{}] = {}",
                        r,
                        self.row_ptrs[r],
                        r + 1,
                        self.row_ptrs[r + 1]
                    ),
                });
                return out;
            }
        }
        if self.row_ptrs[self.num_rows] != self.col_idxs.len() {
            out.push(Violation {
                invariant: "row_ptrs ends at nnz",
                detail: format!(
                    "row_ptrs[{}] = {} but col_idxs holds {} indexes",
                    self.num_rows,
                    self.row_ptrs[self.num_rows],
                    self.col_idxs.len()
                ),
            });
            return out;
        }
        for r in 0..self.num_rows {
            let row = &self.col_idxs[self.row_ptrs[r]..self.row_ptrs[r + 1]];
            for (i, &c) in row.iter().enumerate() {
                if c >= self.num_cols {
                    out.push(Violation {
                        invariant: "column index in bounds",
                        detail: format!("row {r}, slot {i}: column {c} >= {}", self.num_cols),
                    });
                }
                if i > 0 && row[i - 1] >= c {
                    out.push(Violation {
                        invariant: "columns strictly increasing within row",
                        detail: format!("row {r}, slot {i}: {} then {c}", row[i - 1]),
                    });
                }
            }
        }
        if self.values.len() != self.num_systems * self.col_idxs.len() {
            out.push(Violation {
                invariant: "values length",
                detail: format!(
                    "expected {} systems * {} nnz = {}, found {}",
                    self.num_systems,
                    self.col_idxs.len(),
                    self.num_systems * self.col_idxs.len(),
                    self.values.len()
                ),
            });
        }
        out
    }
}
