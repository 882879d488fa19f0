use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;

/// One dense vector of fixed length per batch entry, stored entry-major.
///
/// Entry `k` owns the contiguous plane `values[k * length .. (k + 1) * length]`.
/// Right-hand sides, solutions, and solver workspace all use this layout, so a
/// per-entry solve reads and writes a single contiguous span.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchMultiVector {
    num_systems: usize,
    length: usize,
    values: Vec<f64>,
}

impl BatchMultiVector {
    /// Zero-filled batch of `num_systems` vectors of `length` elements.
    pub fn zeros(num_systems: usize, length: usize) -> Self {
        BatchMultiVector {
            num_systems,
            length,
            values: vec![0.0; num_systems * length],
        }
    }

    /// Batch with every element set to `value`.
    pub fn constant(num_systems: usize, length: usize, value: f64) -> Self {
        BatchMultiVector {
            num_systems,
            length,
            values: vec![value; num_systems * length],
        }
    }

    /// Wrap an entry-major value buffer; its length must be
    /// `num_systems * length`.
    pub fn from_values(num_systems: usize, length: usize, values: Vec<f64>) -> Result<Self, Error> {
        if values.len() != num_systems * length {
            return Err(Error::InvalidDimension(format!(
                "value buffer holds {} elements, expected {} systems * {} rows = {}",
                values.len(),
                num_systems,
                length,
                num_systems * length
            )));
        }
        Ok(BatchMultiVector {
            num_systems,
            length,
            values,
        })
    }

    pub fn num_systems(&self) -> usize {
        self.num_systems
    }

    /// Elements per entry.
    pub fn length(&self) -> usize {
        self.length
    }

    /// Contiguous plane of entry `k`.
    pub fn entry(&self, k: usize) -> &[f64] {
        &self.values[k * self.length..(k + 1) * self.length]
    }

    pub fn entry_mut(&mut self, k: usize) -> &mut [f64] {
        &mut self.values[k * self.length..(k + 1) * self.length]
    }

    /// Full entry-major buffer.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Iterate over entry planes in index order.
    pub fn entries(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.length.max(1))
    }
}
