//! Batched sparse iterative solvers.
//!
//! This crate solves many small independent linear systems that share one
//! sparsity pattern, the workload shape of combustion and other operator
//! splitting codes where each grid cell carries its own small Jacobian.
//! Storage formats deduplicate the shared structure
//! ([`formats::BatchCsr`], [`formats::BatchEll`], with
//! [`formats::BatchDense`] as the baseline), the solvers
//! ([`solver::SolverKind::Cg`], [`solver::SolverKind::Bicgstab`]) run one
//! fused allocation-free loop per entry, and the [`tuning`] planners size
//! GPU-style launches and fast-memory workspaces for the batch.
//!
//! The crate is `no_std` (with `alloc`): it does no IO and touches no
//! platform API, so it can sit inside embedded or offload toolchains.
//! File formats, the parallel driver, and the benchmark CLI live in the
//! companion `batchsolve` crate.
//!
//! Determinism is a design contract: every reduction runs sequentially in
//! ascending index order, so a solve yields bitwise-identical results run
//! to run, under any entry-to-worker assignment, and under any row
//! chunking.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod blas;
pub mod error;
pub mod formats;
pub mod precond;
pub mod solver;
pub mod tuning;

pub use error::Error;
pub use formats::{
    dense_of, generate_stencil_batch, AnyBatchMatrix, BatchCsr, BatchDense, BatchEll, BatchMatrix,
    BatchMultiVector, StorageReport, Violation, ELL_PADDING,
};
pub use precond::{generate_jacobi, BatchJacobi, Preconditioner};
pub use solver::{
    batch_bicgstab, batch_cg, batch_cg_traced, prepare, solve, solve_any, BatchSolveResult,
    CgObserver, CgStep, CgTrace, EntryOutcome, NoObserver, PrecondKind, Prepared, SolveConfig,
    SolveWorkspace, SolverKind, TolMode,
};
pub use tuning::{
    make_launch_plan, plan_workspace, select_sub_group_size, select_work_group_size, DeviceProfile,
    LaunchPlan, PlanOverrides, Tier, WorkspacePlan,
};
