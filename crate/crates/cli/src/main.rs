use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use batchsolve::{
    emit_csv, list_mtx_files, load_device_profile, read_matrix_market, run_benchmark, BenchPlan,
    BenchSource, FormatKind, HarnessError, MtxBatchSet,
};
use batchsolve_core::{DeviceProfile, PlanOverrides, PrecondKind, SolverKind, TolMode};

#[derive(Parser)]
#[command(
    name = "batchsolve",
    version,
    about = "Benchmark harness for batched sparse iterative solvers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a benchmark sweep and emit one CSV row per case.
    Bench(BenchArgs),
    /// Check that a directory of Matrix Market files shares one pattern.
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Cg,
    Bicgstab,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csr,
    Ell,
    Dense,
}

#[derive(Clone, Copy, ValueEnum)]
enum PrecondArg {
    None,
    Jacobi,
}

#[derive(Clone, Copy, ValueEnum)]
enum TolModeArg {
    Abs,
    Rel,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum, default_value_t = SolverArg::Cg)]
    solver: SolverArg,
    #[arg(long, value_enum, default_value_t = FormatArg::Csr)]
    format: FormatArg,
    #[arg(long, value_enum, default_value_t = PrecondArg::None)]
    precond: PrecondArg,
    /// Convergence tolerance.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long = "tol-mode", value_enum, default_value_t = TolModeArg::Rel)]
    tol_mode: TolModeArg,
    /// Iteration cap per entry (default: twice the case's row count).
    #[arg(long = "max-iters")]
    max_iters: Option<usize>,
    /// Stencil row counts, comma separated.
    #[arg(
        long = "stencil-rows",
        value_delimiter = ',',
        conflicts_with = "mm_dir"
    )]
    stencil_rows: Vec<usize>,
    /// Directory of Matrix Market files sharing one sparsity pattern.
    #[arg(long = "mm-dir")]
    mm_dir: Option<PathBuf>,
    /// Batch sizes, comma separated.
    #[arg(long = "batch", value_delimiter = ',')]
    batch: Vec<usize>,
    /// Copies of the Matrix Market file set when no batch sizes are given.
    #[arg(long)]
    replicate: Option<usize>,
    /// Timed repetitions per case, after one untimed warmup.
    #[arg(long, default_value_t = 5)]
    reps: usize,
    /// Seed for the stencil diagonal perturbations.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 = one per core).
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Device profile file with `key = value` lines.
    #[arg(long = "device-profile")]
    device_profile: Option<PathBuf>,
    /// Override the planned work group size.
    #[arg(long = "work-group-size")]
    work_group_size: Option<usize>,
    /// Override the planned sub group size.
    #[arg(long = "sub-group-size")]
    sub_group_size: Option<usize>,
    /// Output CSV path (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Directory of Matrix Market files to check.
    #[arg(long = "mm-dir")]
    mm_dir: PathBuf,
}

impl SolverArg {
    fn to_core(self) -> SolverKind {
        match self {
            SolverArg::Cg => SolverKind::Cg,
            SolverArg::Bicgstab => SolverKind::Bicgstab,
        }
    }
}

impl FormatArg {
    fn to_kind(self) -> FormatKind {
        match self {
            FormatArg::Csr => FormatKind::Csr,
            FormatArg::Ell => FormatKind::Ell,
            FormatArg::Dense => FormatKind::Dense,
        }
    }
}

impl PrecondArg {
    fn to_core(self) -> PrecondKind {
        match self {
            PrecondArg::None => PrecondKind::None,
            PrecondArg::Jacobi => PrecondKind::Jacobi,
        }
    }
}

impl TolModeArg {
    fn to_core(self) -> TolMode {
        match self {
            TolModeArg::Abs => TolMode::Absolute,
            TolModeArg::Rel => TolMode::Relative,
        }
    }
}

/// Usage and I/O problems exit 2; data and solve problems exit 1.
fn exit_for(e: &HarnessError) -> ExitCode {
    match e {
        HarnessError::Usage { .. } | HarnessError::Io { .. } => ExitCode::from(2),
        _ => ExitCode::from(1),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Bench(args) => run_bench(args),
        Command::Validate(args) => run_validate(args),
    }
}

fn run_bench(args: BenchArgs) -> ExitCode {
    let source = if !args.stencil_rows.is_empty() {
        BenchSource::Stencil {
            rows: args.stencil_rows.clone(),
            seed: args.seed,
        }
    } else if let Some(dir) = args.mm_dir.clone() {
        BenchSource::MatrixMarket {
            dir,
            replicate: args.replicate,
        }
    } else {
        eprintln!("error: provide --stencil-rows or --mm-dir");
        return ExitCode::from(2);
    };

    let device = match &args.device_profile {
        Some(path) => match load_device_profile(path) {
            Ok(d) => d,
            Err(e) => {
                eprintln!("error: {e}");
                return exit_for(&e);
            }
        },
        None => DeviceProfile::default(),
    };

    let overrides = if args.work_group_size.is_some() || args.sub_group_size.is_some() {
        Some(PlanOverrides {
            work_group_size: args.work_group_size,
            sub_group_size: args.sub_group_size,
        })
    } else {
        None
    };

    let plan = BenchPlan {
        solver: args.solver.to_core(),
        format: args.format.to_kind(),
        precond: args.precond.to_core(),
        tol: args.tol,
        tol_mode: args.tol_mode.to_core(),
        max_iters: args.max_iters,
        source,
        batch_sizes: args.batch.clone(),
        reps: args.reps,
        workers: args.workers,
        device,
        overrides,
    };

    let outcomes = run_benchmark(&plan);
    let mut records = Vec::new();
    let mut worst: Option<ExitCode> = None;
    for outcome in outcomes {
        match outcome {
            Ok(r) => records.push(r),
            Err(e) => {
                eprintln!("error: {e}");
                let code = exit_for(&e);
                // Usage problems dominate data problems in the exit code.
                if worst != Some(ExitCode::from(2)) {
                    worst = Some(code);
                }
            }
        }
    }

    let csv = emit_csv(&records);
    if let Some(path) = &args.out {
        if let Err(source) = std::fs::write(path, &csv) {
            eprintln!("error: writing {}: {source}", path.display());
            return ExitCode::from(2);
        }
    } else {
        print!("{csv}");
    }

    if let Some(code) = worst {
        return code;
    }
    if records.iter().all(|r| r.all_converged()) {
        ExitCode::SUCCESS
    } else {
        let stragglers: usize = records
            .iter()
            .map(|r| r.num_systems - r.converged_count)
            .sum();
        eprintln!("error: {stragglers} entries did not converge");
        ExitCode::from(1)
    }
}

fn run_validate(args: ValidateArgs) -> ExitCode {
    let paths = match list_mtx_files(&args.mm_dir) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_for(&e);
        }
    };
    for path in &paths {
        match read_matrix_market(path) {
            Ok(m) => println!(
                "{}: {} x {}, {} stored, {} numeric, {}",
                path.display(),
                m.num_rows,
                m.num_cols,
                m.stored_nnz(),
                m.numeric_nnz(),
                if m.symmetric { "symmetric" } else { "general" }
            ),
            Err(e) => {
                eprintln!("error: {e}");
                return exit_for(&e);
            }
        }
    }
    match MtxBatchSet::load(&paths) {
        Ok(set) => {
            println!(
                "pattern: shared across {} files, {} x {}, {} entries per matrix",
                set.file_count(),
                set.num_rows(),
                set.num_cols(),
                set.nnz()
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_for(&e)
        }
    }
}
