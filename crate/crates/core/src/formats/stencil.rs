use alloc::format;
use alloc::vec::Vec;

use super::csr::BatchCsr;
use crate::error::Error;

/// Generate a batch of 1-D three-point stencil matrices in CSR form.
///
/// Every entry is tridiagonal with off-diagonals -1.0 and diagonal
/// `2.0 + delta_k`, where `delta_k` perturbs entry `k` so the systems share
/// a pattern but not values. `seed = 0` means `delta_k = 0` for all entries:
/// the unperturbed stencil, identical in every entry, which is the worst
/// conditioned case (condition number grows like `num_rows^2`). A nonzero
/// seed draws `delta_k` deterministically from `(0, 0.5]`, so the matrices
/// stay symmetric positive definite and strictly diagonally dominant.
///
/// The pattern has `3 * num_rows - 2` stored values per entry.
pub fn generate_stencil_batch(
    num_systems: usize,
    num_rows: usize,
    seed: u64,
) -> Result<BatchCsr, Error> {
    if num_systems == 0 || num_rows == 0 {
        return Err(Error::InvalidDimension(format!(
            "stencil batch needs positive extents, got {num_systems} systems of {num_rows} rows"
        )));
    }
    let nnz = 3 * num_rows - 2;
    let mut row_ptrs = Vec::with_capacity(num_rows + 1);
    let mut col_idxs = Vec::with_capacity(nnz);
    row_ptrs.push(0usize);
    for r in 0..num_rows {
        if r > 0 {
            col_idxs.push(r - 1);
        }
        col_idxs.push(r);
        if r + 1 < num_rows {
            col_idxs.push(r + 1);
        }
        row_ptrs.push(col_idxs.len());
    }
    let mut values = Vec::with_capacity(num_systems * nnz);
    for k in 0..num_systems {
        let diag = 2.0 + diagonal_shift(seed, k);
        for r in 0..num_rows {
            if r > 0 {
                values.push(-1.0);
            }
            values.push(diag);
            if r + 1 < num_rows {
                values.push(-1.0);
            }
        }
    }
    BatchCsr::new(num_systems, num_rows, num_rows, row_ptrs, col_idxs, values)
}

/// Per-entry diagonal perturbation: 0 for seed 0, otherwise a value in
/// `(0, 0.5]` derived from `(seed, entry)` by a splitmix64 hash.
fn diagonal_shift(seed: u64, entry: usize) -> f64 {
    if seed == 0 {
        return 0.0;
    }
    let h = splitmix64(seed.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(entry as u64 + 1)));
    // Top 53 bits give a uniform u in [0, 1); map to (0, 0.5].
    let u = (h >> 11) as f64 / (1u64 << 53) as f64;
    0.5 * (1.0 - u)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
