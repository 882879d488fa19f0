//! Host-side companion to `batchsolve-core`: file formats, device profiles,
//! a thread-parallel batch driver, and the benchmark harness behind the
//! `batchsolve` binary.

pub mod bench;
pub mod error;
pub mod mtx;
pub mod parallel;
pub mod profile;

pub use bench::{
    emit_csv, run_benchmark, BenchPlan, BenchSource, BenchmarkRecord, FormatKind, CSV_HEADER,
};
pub use error::HarnessError;
pub use mtx::{
    format_matrix_market, list_mtx_files, load_matrix_market_batch, load_matrix_market_filled,
    parse_matrix_market, read_matrix_market, write_matrix_market, write_matrix_market_batch,
    MtxBatchSet, MtxMatrix,
};
pub use parallel::solve_batch_parallel;
pub use profile::{load_device_profile, parse_device_profile};
