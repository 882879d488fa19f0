//! Batched iterative solvers.
//!
//! One solve processes every entry of a batch independently: entry `k` runs
//! a fused Krylov loop on matrix plane `k`, right-hand side plane `k`, and
//! solution plane `k`. Dispatch happens on three levels, all hoisted out of
//! the iteration: the matrix format and preconditioner monomorphize the
//! kernel, and the solver kind picks which kernel runs. Inside the loop
//! there are no branches on any of the three.
//!
//! Entries never interact, so outcomes are per entry: a breakdown or
//! non-convergence in one system is reported in that slot of
//! [`BatchSolveResult`] and leaves every other slot untouched. All
//! arithmetic is sequential per entry, which makes results bitwise
//! reproducible run to run and independent of how entries are distributed
//! across workers.

mod bicgstab;
mod cg;
mod observer;

pub use observer::{CgObserver, CgStep, CgTrace, NoObserver};

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::formats::{AnyBatchMatrix, BatchMatrix, BatchMultiVector};
use crate::precond::{generate_jacobi, Preconditioner};
use crate::tuning::{
    make_launch_plan, plan_workspace, DeviceProfile, LaunchPlan, PlanOverrides, WorkspacePlan,
};

/// Which Krylov method to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    /// Conjugate gradients; requires symmetric positive definite entries.
    Cg,
    /// Stabilized biconjugate gradients; handles general square entries.
    Bicgstab,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Cg => "cg",
            SolverKind::Bicgstab => "bicgstab",
        }
    }
}

/// How the stopping threshold is derived from `tol`.
///
/// `Absolute` compares the solver's metric against `tol` directly.
/// `Relative` compares against `tol` times the metric's initial value
/// (falling back to `tol` itself when the initial metric is zero, i.e. when
/// the initial guess already solves the system).
///
/// Note the metric differs per solver: CG stops on `|r . z|`, which scales
/// like the residual norm *squared*; BiCGSTAB stops on `||r||_2`.
///
/// `Relative` rescales to each solve's own starting point: restarting from
/// a converged answer re-baselines the threshold to the (tiny) new initial
/// metric and iterates again. Use `Absolute` when a warm restart should
/// recognize an already-converged state and stop at zero iterations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TolMode {
    Absolute,
    Relative,
}

impl TolMode {
    pub fn name(self) -> &'static str {
        match self {
            TolMode::Absolute => "abs",
            TolMode::Relative => "rel",
        }
    }
}

/// Which preconditioner to build for a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PrecondKind {
    #[default]
    None,
    /// Scalar Jacobi (inverse diagonal).
    Jacobi,
}

impl PrecondKind {
    pub fn name(self) -> &'static str {
        match self {
            PrecondKind::None => "none",
            PrecondKind::Jacobi => "jacobi",
        }
    }
}

/// Everything a solve needs besides the operands.
#[derive(Debug, Clone)]
pub struct SolveConfig {
    pub solver: SolverKind,
    pub tol: f64,
    pub tol_mode: TolMode,
    pub max_iters: usize,
    pub precond: PrecondKind,
    /// Execution target the launch and workspace plans are sized for.
    pub device: DeviceProfile,
    /// Caller-pinned launch decisions; `None` lets the planner choose.
    pub overrides: Option<PlanOverrides>,
}

impl SolveConfig {
    pub fn new(solver: SolverKind, tol: f64, tol_mode: TolMode, max_iters: usize) -> Self {
        SolveConfig {
            solver,
            tol,
            tol_mode,
            max_iters,
            precond: PrecondKind::None,
            device: DeviceProfile::default(),
            overrides: None,
        }
    }

    pub fn with_precond(mut self, precond: PrecondKind) -> Self {
        self.precond = precond;
        self
    }

    pub fn with_device(mut self, device: DeviceProfile) -> Self {
        self.device = device;
        self
    }

    pub fn with_overrides(mut self, overrides: PlanOverrides) -> Self {
        self.overrides = Some(overrides);
        self
    }

    fn check(&self) -> Result<(), Error> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "tolerance must be finite and positive, got {}",
                self.tol
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter(
                "max_iters must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Outcome of one entry's solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntryOutcome {
    /// Completed iteration bodies (BiCGSTAB's mid-body exit counts as one).
    pub iters: usize,
    /// Whether the stopping metric was below the threshold at exit.
    pub converged: bool,
    /// Stopping metric at exit; NaN if the entry hit a breakdown.
    pub final_metric: f64,
    /// `||b - A x||_2` recomputed from the returned iterate.
    pub true_residual_norm: f64,
}

impl EntryOutcome {
    /// True exactly for entries that stopped on a zero denominator.
    pub fn broke_down(&self) -> bool {
        self.final_metric.is_nan()
    }
}

/// Results of a batch solve, one slot per entry.
#[derive(Debug, Clone)]
pub struct BatchSolveResult {
    /// Final iterates, entry-major.
    pub x: BatchMultiVector,
    /// Completed iterations per entry.
    pub iters: Vec<usize>,
    /// Per-entry convergence flags.
    pub converged: Vec<bool>,
    /// Stopping metric at exit per entry; NaN marks a breakdown.
    pub final_metric: Vec<f64>,
    /// `||b - A x||_2` per entry, recomputed from the final iterate.
    pub true_residual_norm: Vec<f64>,
}

impl BatchSolveResult {
    pub fn all_converged(&self) -> bool {
        self.converged.iter().all(|&c| c)
    }

    /// Sum of iteration counts over the batch.
    pub fn total_iterations(&self) -> u64 {
        self.iters.iter().map(|&i| i as u64).sum()
    }

    /// Largest per-entry iteration count.
    pub fn max_iterations(&self) -> usize {
        self.iters.iter().copied().max().unwrap_or(0)
    }

    pub fn outcome(&self, k: usize) -> EntryOutcome {
        EntryOutcome {
            iters: self.iters[k],
            converged: self.converged[k],
            final_metric: self.final_metric[k],
            true_residual_norm: self.true_residual_norm[k],
        }
    }
}

/// Preallocated per-worker scratch for one entry's solve.
///
/// Holds the named vectors of the workspace plan (minus `x`, which is the
/// caller's output plane, and `precond`, which lives in the preconditioner).
/// Reusing one workspace across entries keeps the iteration loops free of
/// allocation.
#[derive(Debug, Clone)]
pub struct SolveWorkspace {
    r: Vec<f64>,
    z: Vec<f64>,
    p: Vec<f64>,
    t: Vec<f64>,
    v: Vec<f64>,
    s: Vec<f64>,
    r_hat: Vec<f64>,
}

impl SolveWorkspace {
    fn new(kind: SolverKind, n: usize) -> Self {
        let extra = match kind {
            SolverKind::Cg => 0,
            SolverKind::Bicgstab => n,
        };
        SolveWorkspace {
            r: vec![0.0; n],
            z: vec![0.0; n],
            p: vec![0.0; n],
            t: vec![0.0; n],
            v: vec![0.0; extra],
            s: vec![0.0; extra],
            r_hat: vec![0.0; extra],
        }
    }

    #[allow(clippy::type_complexity)]
    fn cg_slices(&mut self) -> (&mut [f64], &mut [f64], &mut [f64], &mut [f64]) {
        (&mut self.r, &mut self.z, &mut self.p, &mut self.t)
    }

    #[allow(clippy::type_complexity)]
    fn bicgstab_slices(
        &mut self,
    ) -> (
        &mut [f64],
        &mut [f64],
        &mut [f64],
        &mut [f64],
        &mut [f64],
        &mut [f64],
        &mut [f64],
    ) {
        (
            &mut self.r,
            &mut self.r_hat,
            &mut self.p,
            &mut self.v,
            &mut self.s,
            &mut self.t,
            &mut self.z,
        )
    }
}

/// A solve with its per-batch setup done: preconditioner built, plans
/// resolved, configuration validated.
///
/// Entries can then be solved one at a time in any order or from any number
/// of workers; [`Prepared::solve_entry`] touches only entry-local state.
#[derive(Debug)]
pub struct Prepared<'a, M: BatchMatrix> {
    matrix: &'a M,
    kind: SolverKind,
    precond: Preconditioner,
    tol: f64,
    tol_mode: TolMode,
    max_iters: usize,
    launch: LaunchPlan,
    workspace_plan: WorkspacePlan,
}

/// Validate `config` against `a`, build the preconditioner, and resolve the
/// launch and workspace plans.
pub fn prepare<'a, M: BatchMatrix>(
    a: &'a M,
    config: &SolveConfig,
) -> Result<Prepared<'a, M>, Error> {
    config.check()?;
    if a.num_rows() != a.num_cols() {
        return Err(Error::ShapeMismatch(format!(
            "iterative solve needs square systems, got {} x {}",
            a.num_rows(),
            a.num_cols()
        )));
    }
    let precond = match config.precond {
        PrecondKind::None => Preconditioner::Identity,
        PrecondKind::Jacobi => Preconditioner::Jacobi(generate_jacobi(a)?),
    };
    let launch = make_launch_plan(a.num_rows(), &config.device, config.overrides.as_ref())?;
    let workspace_plan = plan_workspace(
        config.solver,
        a.num_rows(),
        core::mem::size_of::<f64>(),
        config.device.fast_memory_bytes,
    );
    Ok(Prepared {
        matrix: a,
        kind: config.solver,
        precond,
        tol: config.tol,
        tol_mode: config.tol_mode,
        max_iters: config.max_iters,
        launch,
        workspace_plan,
    })
}

impl<'a, M: BatchMatrix> Prepared<'a, M> {
    pub fn launch_plan(&self) -> &LaunchPlan {
        &self.launch
    }

    pub fn workspace_plan(&self) -> &WorkspacePlan {
        &self.workspace_plan
    }

    pub fn solver(&self) -> SolverKind {
        self.kind
    }

    pub fn num_systems(&self) -> usize {
        self.matrix.num_systems()
    }

    pub fn num_rows(&self) -> usize {
        self.matrix.num_rows()
    }

    /// Allocate scratch sized for this solve. One workspace per worker.
    pub fn make_workspace(&self) -> SolveWorkspace {
        SolveWorkspace::new(self.kind, self.matrix.num_rows())
    }

    /// Solve entry `k` in place: `x` holds the initial guess on entry and
    /// the final iterate on return. Allocation-free.
    pub fn solve_entry(
        &self,
        k: usize,
        b: &[f64],
        x: &mut [f64],
        ws: &mut SolveWorkspace,
    ) -> EntryOutcome {
        self.solve_entry_observed(k, b, x, ws, &mut NoObserver)
    }

    /// [`Self::solve_entry`] with a CG observer attached. BiCGSTAB runs
    /// ignore the observer.
    pub fn solve_entry_observed<O: CgObserver>(
        &self,
        k: usize,
        b: &[f64],
        x: &mut [f64],
        ws: &mut SolveWorkspace,
        obs: &mut O,
    ) -> EntryOutcome {
        let chunk = self.launch.work_group_size;
        // The (kind, preconditioner) match is the dispatch point: each arm
        // is a fully monomorphized fused loop.
        match (self.kind, &self.precond) {
            (SolverKind::Cg, Preconditioner::Identity) => cg::cg_entry(
                self.matrix,
                k,
                b,
                x,
                &crate::precond::Identity,
                self.tol,
                self.tol_mode,
                self.max_iters,
                chunk,
                ws,
                obs,
            ),
            (SolverKind::Cg, Preconditioner::Jacobi(j)) => cg::cg_entry(
                self.matrix,
                k,
                b,
                x,
                j,
                self.tol,
                self.tol_mode,
                self.max_iters,
                chunk,
                ws,
                obs,
            ),
            (SolverKind::Bicgstab, Preconditioner::Identity) => bicgstab::bicgstab_entry(
                self.matrix,
                k,
                b,
                x,
                &crate::precond::Identity,
                self.tol,
                self.tol_mode,
                self.max_iters,
                chunk,
                ws,
            ),
            (SolverKind::Bicgstab, Preconditioner::Jacobi(j)) => bicgstab::bicgstab_entry(
                self.matrix,
                k,
                b,
                x,
                j,
                self.tol,
                self.tol_mode,
                self.max_iters,
                chunk,
                ws,
            ),
        }
    }
}

fn check_operands<M: BatchMatrix>(
    a: &M,
    b: &BatchMultiVector,
    x0: Option<&BatchMultiVector>,
) -> Result<(), Error> {
    if b.num_systems() != a.num_systems() || b.length() != a.num_rows() {
        return Err(Error::ShapeMismatch(format!(
            "rhs batch {} x {} against matrix batch {} x ({} x {})",
            b.num_systems(),
            b.length(),
            a.num_systems(),
            a.num_rows(),
            a.num_cols()
        )));
    }
    if let Some(x0) = x0 {
        if x0.num_systems() != a.num_systems() || x0.length() != a.num_cols() {
            return Err(Error::ShapeMismatch(format!(
                "initial guess batch {} x {} against matrix batch {} x ({} x {})",
                x0.num_systems(),
                x0.length(),
                a.num_systems(),
                a.num_rows(),
                a.num_cols()
            )));
        }
    }
    Ok(())
}

fn solve_observed<M: BatchMatrix, O: CgObserver>(
    a: &M,
    b: &BatchMultiVector,
    x0: Option<&BatchMultiVector>,
    config: &SolveConfig,
    obs: &mut O,
) -> Result<BatchSolveResult, Error> {
    check_operands(a, b, x0)?;
    let prepared = prepare(a, config)?;
    let ns = a.num_systems();
    let mut x = match x0 {
        Some(v) => v.clone(),
        None => BatchMultiVector::zeros(ns, a.num_cols()),
    };
    let mut ws = prepared.make_workspace();
    let mut iters = Vec::with_capacity(ns);
    let mut converged = Vec::with_capacity(ns);
    let mut final_metric = Vec::with_capacity(ns);
    let mut true_residual_norm = Vec::with_capacity(ns);
    for k in 0..ns {
        let out = prepared.solve_entry_observed(k, b.entry(k), x.entry_mut(k), &mut ws, obs);
        iters.push(out.iters);
        converged.push(out.converged);
        final_metric.push(out.final_metric);
        true_residual_norm.push(out.true_residual_norm);
    }
    Ok(BatchSolveResult {
        x,
        iters,
        converged,
        final_metric,
        true_residual_norm,
    })
}

/// Solve `A_k x_k = b_k` for every entry with the configured method.
///
/// `x0` is the initial guess (zero when `None`). Errors cover invalid
/// configuration and shape or setup problems; per-entry numerical failure
/// is reported in the result, not as an `Error`.
pub fn solve<M: BatchMatrix>(
    a: &M,
    b: &BatchMultiVector,
    x0: Option<&BatchMultiVector>,
    config: &SolveConfig,
) -> Result<BatchSolveResult, Error> {
    solve_observed(a, b, x0, config, &mut NoObserver)
}

/// [`solve`] with the method pinned to CG.
pub fn batch_cg<M: BatchMatrix>(
    a: &M,
    b: &BatchMultiVector,
    x0: Option<&BatchMultiVector>,
    config: &SolveConfig,
) -> Result<BatchSolveResult, Error> {
    let config = SolveConfig {
        solver: SolverKind::Cg,
        ..config.clone()
    };
    solve(a, b, x0, &config)
}

/// [`solve`] with the method pinned to BiCGSTAB.
pub fn batch_bicgstab<M: BatchMatrix>(
    a: &M,
    b: &BatchMultiVector,
    x0: Option<&BatchMultiVector>,
    config: &SolveConfig,
) -> Result<BatchSolveResult, Error> {
    let config = SolveConfig {
        solver: SolverKind::Bicgstab,
        ..config.clone()
    };
    solve(a, b, x0, &config)
}

/// CG solve that records every iteration of every entry.
pub fn batch_cg_traced<M: BatchMatrix>(
    a: &M,
    b: &BatchMultiVector,
    x0: Option<&BatchMultiVector>,
    config: &SolveConfig,
) -> Result<(BatchSolveResult, CgTrace), Error> {
    let config = SolveConfig {
        solver: SolverKind::Cg,
        ..config.clone()
    };
    let mut trace = CgTrace::default();
    let result = solve_observed(a, b, x0, &config, &mut trace)?;
    Ok((result, trace))
}

/// [`solve`] over a runtime-chosen format.
///
/// The format match happens here, once per solve; each arm runs the solver
/// monomorphized for its concrete format.
pub fn solve_any(
    a: &AnyBatchMatrix,
    b: &BatchMultiVector,
    x0: Option<&BatchMultiVector>,
    config: &SolveConfig,
) -> Result<BatchSolveResult, Error> {
    match a {
        AnyBatchMatrix::Csr(m) => solve(m, b, x0, config),
        AnyBatchMatrix::Ell(m) => solve(m, b, x0, config),
        AnyBatchMatrix::Dense(m) => solve(m, b, x0, config),
    }
}
