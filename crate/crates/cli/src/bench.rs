//! Benchmark harness: build batches, time repeated solves, emit CSV.

use std::path::PathBuf;
use std::time::Instant;

use batchsolve_core::{
    generate_stencil_batch, make_launch_plan, AnyBatchMatrix, BatchCsr, BatchEll, BatchMatrix,
    BatchMultiVector, BatchSolveResult, DeviceProfile, PlanOverrides, PrecondKind, SolveConfig,
    SolverKind, TolMode,
};

use crate::error::HarnessError;
use crate::mtx::MtxBatchSet;
use crate::parallel::solve_batch_parallel;

/// Storage format selector for harness-level code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormatKind {
    Csr,
    Ell,
    Dense,
}

impl FormatKind {
    pub fn name(self) -> &'static str {
        match self {
            FormatKind::Csr => "csr",
            FormatKind::Ell => "ell",
            FormatKind::Dense => "dense",
        }
    }

    /// Convert a CSR batch into this format.
    pub fn realize(self, csr: BatchCsr) -> AnyBatchMatrix {
        match self {
            FormatKind::Csr => AnyBatchMatrix::Csr(csr),
            FormatKind::Ell => AnyBatchMatrix::Ell(BatchEll::from_csr(&csr)),
            FormatKind::Dense => AnyBatchMatrix::Dense(csr.to_dense()),
        }
    }
}

/// Where benchmark systems come from.
#[derive(Debug, Clone)]
pub enum BenchSource {
    /// Generated three-point stencils, one case per (rows, batch) pair.
    Stencil { rows: Vec<usize>, seed: u64 },
    /// A directory of Matrix Market files sharing one pattern. With batch
    /// sizes given, files cycle to fill each size; otherwise `replicate`
    /// copies of the file set make one case.
    MatrixMarket {
        dir: PathBuf,
        replicate: Option<usize>,
    },
}

/// Full description of a benchmark sweep.
#[derive(Debug, Clone)]
pub struct BenchPlan {
    pub solver: SolverKind,
    pub format: FormatKind,
    pub precond: PrecondKind,
    pub tol: f64,
    pub tol_mode: TolMode,
    /// Iteration cap per entry; `None` means twice the case's row count.
    pub max_iters: Option<usize>,
    pub source: BenchSource,
    /// Batch sizes to sweep (may be empty for Matrix Market + replicate).
    pub batch_sizes: Vec<usize>,
    /// Timed repetitions per case, after one untimed warmup.
    pub reps: usize,
    /// Worker threads (0 = one per core).
    pub workers: usize,
    pub device: DeviceProfile,
    pub overrides: Option<PlanOverrides>,
}

/// One row of benchmark output.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRecord {
    pub solver: String,
    pub format: String,
    pub precond: String,
    pub num_systems: usize,
    pub num_rows: usize,
    /// Stored nonzeros per entry of the shared pattern.
    pub nnz: usize,
    pub tol: f64,
    pub tol_mode: String,
    /// Minimum wall time over the repetitions, seconds.
    pub wall_time_seconds: f64,
    /// Median wall time over the repetitions, seconds.
    pub wall_time_median_seconds: f64,
    /// Sum of iteration counts over all entries.
    pub total_iterations: u64,
    /// Largest per-entry iteration count.
    pub max_iterations: usize,
    /// Entries whose solve converged.
    pub converged_count: usize,
    /// Compact launch plan, e.g. `wg=64;sg=16`.
    pub launch_plan: String,
}

impl BenchmarkRecord {
    pub fn all_converged(&self) -> bool {
        self.converged_count == self.num_systems
    }
}

struct Case {
    matrix: AnyBatchMatrix,
    nnz: usize,
    label: String,
}

fn build_cases(plan: &BenchPlan) -> Result<Vec<Case>, HarnessError> {
    let mut cases = Vec::new();
    match &plan.source {
        BenchSource::Stencil { rows, seed } => {
            if rows.is_empty() {
                return Err(HarnessError::usage(
                    "stencil source needs at least one row count",
                ));
            }
            if plan.batch_sizes.is_empty() {
                return Err(HarnessError::usage(
                    "stencil source needs at least one batch size",
                ));
            }
            for &n in rows {
                for &batch in &plan.batch_sizes {
                    let csr = generate_stencil_batch(batch, n, *seed).map_err(|source| {
                        HarnessError::Solve {
                            case: format!("stencil rows={n} batch={batch}"),
                            source,
                        }
                    })?;
                    cases.push(Case {
                        nnz: csr.nnz(),
                        label: format!("stencil rows={n} batch={batch}"),
                        matrix: plan.format.realize(csr),
                    });
                }
            }
        }
        BenchSource::MatrixMarket { dir, replicate } => {
            let paths = crate::mtx::list_mtx_files(dir)?;
            let set = MtxBatchSet::load(&paths)?;
            let mut sized: Vec<(BatchCsr, String)> = Vec::new();
            if plan.batch_sizes.is_empty() {
                let rep = replicate.unwrap_or(1);
                sized.push((
                    set.replicate(rep)?,
                    format!("mm dir={} replicate={rep}", dir.display()),
                ));
            } else {
                for &batch in &plan.batch_sizes {
                    sized.push((
                        set.filled(batch)?,
                        format!("mm dir={} batch={batch}", dir.display()),
                    ));
                }
            }
            for (csr, label) in sized {
                cases.push(Case {
                    nnz: csr.nnz(),
                    label,
                    matrix: plan.format.realize(csr),
                });
            }
        }
    }
    Ok(cases)
}

/// Format-monomorphized parallel solve: the format match happens here, once
/// per timed call, never inside the solver.
fn solve_case(
    m: &AnyBatchMatrix,
    b: &BatchMultiVector,
    config: &SolveConfig,
    workers: usize,
) -> Result<BatchSolveResult, HarnessError> {
    match m {
        AnyBatchMatrix::Csr(a) => solve_batch_parallel(a, b, None, config, workers),
        AnyBatchMatrix::Ell(a) => solve_batch_parallel(a, b, None, config, workers),
        AnyBatchMatrix::Dense(a) => solve_batch_parallel(a, b, None, config, workers),
    }
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Run the sweep. Each case yields its own `Result`, so one failing case
/// (e.g. a singular diagonal under Jacobi) does not abort the others.
pub fn run_benchmark(plan: &BenchPlan) -> Vec<Result<BenchmarkRecord, HarnessError>> {
    if plan.reps == 0 {
        return vec![Err(HarnessError::usage("reps must be at least 1"))];
    }
    let cases = match build_cases(plan) {
        Ok(c) => c,
        Err(e) => return vec![Err(e)],
    };

    let mut out = Vec::with_capacity(cases.len());
    for case in &cases {
        out.push(run_case(plan, case));
    }
    out
}

fn run_case(plan: &BenchPlan, case: &Case) -> Result<BenchmarkRecord, HarnessError> {
    let m = &case.matrix;
    let (ns, n) = (m.num_systems(), m.num_rows());
    let config = SolveConfig {
        solver: plan.solver,
        tol: plan.tol,
        tol_mode: plan.tol_mode,
        max_iters: plan.max_iters.unwrap_or(2 * n.max(1)),
        precond: plan.precond,
        device: plan.device.clone(),
        overrides: plan.overrides,
    };
    let launch = make_launch_plan(n, &plan.device, plan.overrides.as_ref()).map_err(|source| {
        HarnessError::Solve {
            case: case.label.clone(),
            source,
        }
    })?;
    let b = BatchMultiVector::constant(ns, n, 1.0);

    let wrap = |e: HarnessError| match e {
        HarnessError::Core(source) => HarnessError::Solve {
            case: case.label.clone(),
            source,
        },
        other => other,
    };

    // Warmup solve, untimed.
    solve_case(m, &b, &config, plan.workers).map_err(wrap)?;

    let mut times = Vec::with_capacity(plan.reps);
    let mut last = None;
    for _ in 0..plan.reps {
        let start = Instant::now();
        let result = solve_case(m, &b, &config, plan.workers).map_err(wrap)?;
        times.push(start.elapsed().as_secs_f64());
        last = Some(result);
    }
    let result = last.expect("reps >= 1");
    times.sort_by(|a, b| a.partial_cmp(b).expect("finite times"));

    Ok(BenchmarkRecord {
        solver: plan.solver.name().to_string(),
        format: plan.format.name().to_string(),
        precond: plan.precond.name().to_string(),
        num_systems: ns,
        num_rows: n,
        nnz: case.nnz,
        tol: plan.tol,
        tol_mode: plan.tol_mode.name().to_string(),
        wall_time_seconds: times[0],
        wall_time_median_seconds: median(&times),
        total_iterations: result.total_iterations(),
        max_iterations: result.max_iterations(),
        converged_count: result.converged.iter().filter(|&&c| c).count(),
        launch_plan: launch.summary(),
    })
}

/// Column order of [`emit_csv`].
pub const CSV_HEADER: &str = "solver,format,precond,num_systems,num_rows,nnz,tol,tol_mode,\
wall_time_seconds,wall_time_median_seconds,total_iterations,max_iterations,converged_count,\
launch_plan";

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Serialize records as CSV. Floats print with 17 significant digits
/// (`{:.16e}`), so parsing the text back recovers them bit for bit.
pub fn emit_csv(records: &[BenchmarkRecord]) -> String {
    let mut out = String::with_capacity(128 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{:.16e},{},{:.16e},{:.16e},{},{},{},{}\n",
            csv_field(&r.solver),
            csv_field(&r.format),
            csv_field(&r.precond),
            r.num_systems,
            r.num_rows,
            r.nnz,
            r.tol,
            csv_field(&r.tol_mode),
            r.wall_time_seconds,
            r.wall_time_median_seconds,
            r.total_iterations,
            r.max_iterations,
            r.converged_count,
            csv_field(&r.launch_plan),
        ));
    }
    out
}
