use super::observer::CgObserver;
use super::{EntryOutcome, SolveWorkspace, TolMode};
use crate::blas::{entry, spmv_entry_chunked};
use crate::formats::BatchMatrix;
use crate::precond::ApplyEntry;

/// Fused preconditioned CG on one batch entry.
///
/// The whole iteration runs on the caller's workspace slices; nothing here
/// allocates. Generic over matrix format, preconditioner, and observer, so
/// each combination monomorphizes into one flat loop.
///
/// The stopping metric is `|rho| = |r . z|`, checked at the top of each
/// body; `iters` counts completed bodies. An exactly zero `p . t`
/// denominator is a breakdown: the entry stops with `final_metric = NaN`
/// and `converged = false`, leaving the iterate at its last completed
/// state.
#[allow(clippy::too_many_arguments)]
pub(super) fn cg_entry<M: BatchMatrix, P: ApplyEntry, O: CgObserver>(
    a: &M,
    k: usize,
    b: &[f64],
    x: &mut [f64],
    precond: &P,
    tol: f64,
    tol_mode: TolMode,
    max_iters: usize,
    row_chunk: usize,
    ws: &mut SolveWorkspace,
    obs: &mut O,
) -> EntryOutcome {
    let n = b.len();
    let (r, z, p, t) = ws.cg_slices();

    // r = b - A x, z = M r, p = z, rho = r . z
    spmv_entry_chunked(a, k, x, t, row_chunk);
    for i in 0..n {
        r[i] = b[i] - t[i];
    }
    precond.apply_entry(k, r, z);
    p.copy_from_slice(z);
    let mut rho = entry::dot(r, z);

    let tau = match tol_mode {
        TolMode::Absolute => tol,
        TolMode::Relative => {
            if rho == 0.0 {
                tol
            } else {
                tol * rho.abs()
            }
        }
    };

    let mut iters = 0usize;
    let mut breakdown = false;
    for _ in 0..max_iters {
        if rho.abs() < tau {
            break;
        }
        spmv_entry_chunked(a, k, p, t, row_chunk); // t = A p
        let pt = entry::dot(p, t);
        if pt == 0.0 {
            breakdown = true;
            break;
        }
        let alpha = rho / pt;
        entry::axpy(alpha, p, x); // x += alpha p
        entry::axpy(-alpha, t, r); // r -= alpha t
        precond.apply_entry(k, r, z);
        let rho_hat = entry::dot(r, z);
        let beta = rho_hat / rho;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
        obs.cg_step(k, iters, rho, alpha, x, r);
        rho = rho_hat;
        iters += 1;
    }

    let (converged, final_metric) = if breakdown {
        (false, f64::NAN)
    } else {
        (rho.abs() < tau, rho.abs())
    };

    spmv_entry_chunked(a, k, x, t, row_chunk);
    let true_residual_norm = entry::residual_norm(b, t);
    EntryOutcome {
        iters,
        converged,
        final_metric,
        true_residual_norm,
    }
}
