use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use super::{BatchMatrix, StorageReport, Violation};
use crate::error::Error;

/// Batch of dense matrices, row-major within each entry, entry-major overall.
///
/// Entry `k` owns `values[k * rows * cols .. (k + 1) * rows * cols]`. Dense
/// storage has no shared structure to deduplicate; it exists as the baseline
/// format and as the exchange point for conversions.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchDense {
    num_systems: usize,
    num_rows: usize,
    num_cols: usize,
    values: Vec<f64>,
}

impl BatchDense {
    /// Zero-filled batch.
    pub fn zeros(num_systems: usize, num_rows: usize, num_cols: usize) -> Self {
        BatchDense {
            num_systems,
            num_rows,
            num_cols,
            values: vec![0.0; num_systems * num_rows * num_cols],
        }
    }

    /// Wrap an entry-major, row-major value buffer of length
    /// `num_systems * num_rows * num_cols`.
    pub fn from_values(
        num_systems: usize,
        num_rows: usize,
        num_cols: usize,
        values: Vec<f64>,
    ) -> Result<Self, Error> {
        if num_systems == 0 || num_rows == 0 || num_cols == 0 {
            return Err(Error::InvalidDimension(format!(
                "batch shape {num_systems} x ({num_rows} x {num_cols}) has a zero extent"
            )));
        }
        if values.len() != num_systems * num_rows * num_cols {
            return Err(Error::InvalidDimension(format!(
                "value buffer holds {} elements, expected {}",
                values.len(),
                num_systems * num_rows * num_cols
            )));
        }
        Ok(BatchDense {
            num_systems,
            num_rows,
            num_cols,
            values,
        })
    }

    pub fn get(&self, entry: usize, row: usize, col: usize) -> f64 {
        self.values[self.offset(entry, row, col)]
    }

    pub fn set(&mut self, entry: usize, row: usize, col: usize, value: f64) {
        let at = self.offset(entry, row, col);
        self.values[at] = value;
    }

    fn offset(&self, entry: usize, row: usize, col: usize) -> usize {
        debug_assert!(entry < self.num_systems && row < self.num_rows && col < self.num_cols);
        (entry * self.num_rows + row) * self.num_cols + col
    }

    /// Value plane of entry `k`, row-major.
    pub fn values_entry(&self, k: usize) -> &[f64] {
        let plane = self.num_rows * self.num_cols;
        &self.values[k * plane..(k + 1) * plane]
    }

    pub fn values_entry_mut(&mut self, k: usize) -> &mut [f64] {
        let plane = self.num_rows * self.num_cols;
        &mut self.values[k * plane..(k + 1) * plane]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

impl BatchMatrix for BatchDense {
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
        let plane = self.values_entry(entry);
        for r in rows {
            let row = &plane[r * self.num_cols..(r + 1) * self.num_cols];
            let mut acc = 0.0;
            for (a, xi) in row.iter().zip(x) {
                acc += a * xi;
            }
            y[r] = acc;
        }
    }

    fn diag_value(&self, entry: usize, row: usize) -> Option<f64> {
        if row < self.num_cols {
            Some(self.get(entry, row, row))
        } else {
            None
        }
    }

    fn storage_report(&self) -> StorageReport {
        StorageReport {
            value_count: self.num_systems * self.num_rows * self.num_cols,
            index_count: 0,
            pointer_count: 0,
        }
    }

    fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let expected = self.num_systems * self.num_rows * self.num_cols;
        if self.values.len() != expected {
            out.push(Violation {
                invariant: "values length",
                detail: format!("expected {expected}, found {}", self.values.len()),
            });
        }
        out
    }
}
