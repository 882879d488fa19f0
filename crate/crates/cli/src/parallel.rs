//! Multi-worker batch driver.
//!
//! Entries are independent, so the batch is split across a worker pool with
//! one preallocated workspace per worker. Every entry still runs the same
//! sequential fused kernel, so results are bitwise identical for any worker
//! count, including 1.

use batchsolve_core::{
    prepare, BatchMatrix, BatchMultiVector, BatchSolveResult, EntryOutcome, SolveConfig,
};
use rayon::prelude::*;

use crate::error::HarnessError;

/// Solve the batch on `workers` threads (0 means one per available core).
pub fn solve_batch_parallel<M: BatchMatrix + Sync>(
    a: &M,
    b: &BatchMultiVector,
    x0: Option<&BatchMultiVector>,
    config: &SolveConfig,
    workers: usize,
) -> Result<BatchSolveResult, HarnessError> {
    if b.num_systems() != a.num_systems() || b.length() != a.num_rows() {
        return Err(HarnessError::from(batchsolve_core::Error::ShapeMismatch(
            format!(
                "rhs batch {} x {} against matrix batch {} x ({} x {})",
                b.num_systems(),
                b.length(),
                a.num_systems(),
                a.num_rows(),
                a.num_cols()
            ),
        )));
    }
    if let Some(x0) = x0 {
        if x0.num_systems() != a.num_systems() || x0.length() != a.num_cols() {
            return Err(HarnessError::from(batchsolve_core::Error::ShapeMismatch(
                format!(
                    "initial guess batch {} x {} against matrix batch {} x ({} x {})",
                    x0.num_systems(),
                    x0.length(),
                    a.num_systems(),
                    a.num_rows(),
                    a.num_cols()
                ),
            )));
        }
    }

    let prepared = prepare(a, config)?;
    let ns = a.num_systems();
    let n = a.num_rows();
    let mut x = match x0 {
        Some(v) => v.clone(),
        None => BatchMultiVector::zeros(ns, n),
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| HarnessError::usage(format!("cannot build worker pool: {e}")))?;

    let outcomes: Vec<EntryOutcome> = pool.install(|| {
        x.values_mut()
            .par_chunks_mut(n)
            .enumerate()
            .map_init(
                || prepared.make_workspace(),
                |ws, (k, xk)| prepared.solve_entry(k, b.entry(k), xk, ws),
            )
            .collect()
    });

    Ok(BatchSolveResult {
        x,
        iters: outcomes.iter().map(|o| o.iters).collect(),
        converged: outcomes.iter().map(|o| o.converged).collect(),
        final_metric: outcomes.iter().map(|o| o.final_metric).collect(),
        true_residual_norm: outcomes.iter().map(|o| o.true_residual_norm).collect(),
    })
}
