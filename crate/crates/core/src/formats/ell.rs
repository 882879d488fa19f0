use alloc::format;
use alloc::vec::Vec;
use core::ops::Range;

use super::csr::BatchCsr;
use super::dense::BatchDense;
use super::{BatchMatrix, StorageReport, Violation};
use crate::error::Error;

/// Column index marking an unused ELL slot (the all-ones pattern of a signed
/// -1 reinterpreted as `usize`). Padded slots store the value 0.0 so that a
/// kernel which multiplies through the padding anyway gets the right sum.
pub const ELL_PADDING: usize = usize::MAX;

/// Batch of sparse matrices in ELL form with one shared pattern.
///
/// Every row stores exactly `nnz_per_row` slots; shorter rows are padded at
/// the tail. Slot `s` of row `r` lives at `s * num_rows + r`, i.e. the slot
/// table is column-major, so consecutive rows of one slot are adjacent in
/// memory. Real columns ascend within each row and precede all padding,
/// which fixes the accumulation order just as CSR does.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchEll {
    num_systems: usize,
    num_rows: usize,
    num_cols: usize,
    nnz_per_row: usize,
    col_idxs: Vec<usize>,
    values: Vec<f64>,
}

impl BatchEll {
    /// Build a batch ELL matrix, rejecting any structural defect.
    pub fn new(
        num_systems: usize,
        num_rows: usize,
        num_cols: usize,
        nnz_per_row: usize,
        col_idxs: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self, Error> {
        if num_systems == 0 || num_rows == 0 || num_cols == 0 {
            return Err(Error::InvalidDimension(format!(
                "batch shape {num_systems} x ({num_rows} x {num_cols}) has a zero extent"
            )));
        }
        let m = BatchEll {
            num_systems,
            num_rows,
            num_cols,
            nnz_per_row,
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

    /// Convert from CSR. `nnz_per_row` becomes the longest CSR row; shorter
    /// rows are padded with [`ELL_PADDING`] indexes and 0.0 values.
    pub fn from_csr(src: &BatchCsr) -> Self {
        let (ns, nr, nc) = (src.num_systems(), src.num_rows(), src.num_cols());
        let ptrs = src.row_ptrs();
        let npr = (0..nr).map(|r| ptrs[r + 1] - ptrs[r]).max().unwrap_or(0);
        let mut col_idxs = alloc::vec![ELL_PADDING; nr * npr];
        let mut values = alloc::vec![0.0; ns * nr * npr];
        for r in 0..nr {
            for (s, i) in (ptrs[r]..ptrs[r + 1]).enumerate() {
                col_idxs[s * nr + r] = src.col_idxs()[i];
            }
        }
        for k in 0..ns {
            let plane = &mut values[k * nr * npr..(k + 1) * nr * npr];
            let src_vals = src.values_entry(k);
            for r in 0..nr {
                for (s, i) in (ptrs[r]..ptrs[r + 1]).enumerate() {
                    plane[s * nr + r] = src_vals[i];
                }
            }
        }
        BatchEll {
            num_systems: ns,
            num_rows: nr,
            num_cols: nc,
            nnz_per_row: npr,
            col_idxs,
            values,
        }
    }

    /// Expand to a dense batch with zeros in unstored positions.
    pub fn to_dense(&self) -> BatchDense {
        let mut d = BatchDense::zeros(self.num_systems, self.num_rows, self.num_cols);
        for k in 0..self.num_systems {
            for r in 0..self.num_rows {
                for s in 0..self.nnz_per_row {
                    let c = self.col_at(s, r);
                    if c == ELL_PADDING {
                        break;
                    }
                    d.set(k, r, c, self.value_at(k, s, r));
                }
            }
        }
        d
    }

    /// Uniform slot count per row.
    pub fn nnz_per_row(&self) -> usize {
        self.nnz_per_row
    }

    /// Shared slot-major column table, `num_rows * nnz_per_row` long.
    pub fn col_idxs(&self) -> &[usize] {
        &self.col_idxs
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column index of slot `s` in row `r`.
    pub fn col_at(&self, slot: usize, row: usize) -> usize {
        self.col_idxs[slot * self.num_rows + row]
    }

    /// Value of slot `s` in row `r` of entry `k`.
    pub fn value_at(&self, entry: usize, slot: usize, row: usize) -> f64 {
        self.values_entry(entry)[slot * self.num_rows + row]
    }

    /// Value plane of entry `k`, slot-major.
    pub fn values_entry(&self, k: usize) -> &[f64] {
        let plane = self.num_rows * self.nnz_per_row;
        &self.values[k * plane..(k + 1) * plane]
    }

    pub fn values_entry_mut(&mut self, k: usize) -> &mut [f64] {
        let plane = self.num_rows * self.nnz_per_row;
        &mut self.values[k * plane..(k + 1) * plane]
    }
}

impl BatchMatrix for BatchEll {
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
            for s in 0..self.nnz_per_row {
                let c = self.col_idxs[s * self.num_rows + r];
                if c == ELL_PADDING {
                    break;
                }
                acc += vals[s * self.num_rows + r] * x[c];
            }
            y[r] = acc;
        }
    }

    fn diag_value(&self, entry: usize, row: usize) -> Option<f64> {
        for s in 0..self.nnz_per_row {
            let c = self.col_at(s, row);
            if c == ELL_PADDING || c > row {
                break;
            }
            if c == row {
                return Some(self.value_at(entry, s, row));
            }
        }
        None
    }

    fn storage_report(&self) -> StorageReport {
        StorageReport {
            value_count: self.num_systems * self.num_rows * self.nnz_per_row,
            index_count: self.num_rows * self.nnz_per_row,
            pointer_count: 0,
        }
    }

    fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.col_idxs.len() != self.num_rows * self.nnz_per_row {
            out.push(Violation {
                invariant: "col_idxs length",
                detail: format!(
                    "expected {} rows * {} slots = {}, found {}",
                    self.num_rows,
                    self.nnz_per_row,
                    self.num_rows * self.nnz_per_row,
                    self.col_idxs.len()
                ),
            });
            return out;
        }
        if self.values.len() != self.num_systems * self.col_idxs.len() {
            out.push(Violation {
                invariant: "values length",
                detail: format!(
                    "expected {} systems * {} slots = {}, found {}",
                    self.num_systems,
                    self.col_idxs.len(),
                    self.num_systems * self.col_idxs.len(),
                    self.values.len()
                ),
            });
            return out;
        }
        for r in 0..self.num_rows {
            let mut seen_padding = false;
            let mut prev = None;
            for s in 0..self.nnz_per_row {
                let c = self.col_at(s, r);
                if c == ELL_PADDING {
                    seen_padding = true;
                    for k in 0..self.num_systems {
                        if self.value_at(k, s, r) != 0.0 {
                            out.push(Violation {
                                invariant: "padding values zero",
                                detail: format!(
                                    "entry {k}, row {r}, slot {s}: padded slot stores {}",
                                    self.value_at(k, s, r)
                                ),
                            });
                        }
                    }
                    continue;
                }
                if seen_padding {
                    out.push(Violation {
                        invariant: "padding trails real columns",
                        detail: format!("row {r}, slot {s}: column {c} follows padding"),
                    });
                }
                if c >= self.num_cols {
                    out.push(Violation {
                        invariant: "column index in bounds",
                        detail: format!("row {r}, slot {s}: column {c} >= {}", self.num_cols),
                    });
                }
                if let Some(p) = prev {
                    if p >= c {
                        out.push(Violation {
                            invariant: "columns strictly increasing within row",
                            detail: format!("row {r}, slot {s}: {p} then {c}"),
                        });
                    }
                }
                prev = Some(c);
            }
        }
        out
    }
}
