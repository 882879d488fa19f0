use super::{EntryOutcome, SolveWorkspace, TolMode};
use crate::blas::{entry, spmv_entry_chunked};
use crate::formats::BatchMatrix;
use crate::precond::ApplyEntry;

/// Fused preconditioned BiCGSTAB on one batch entry.
///
/// Uses the standard preconditioned recurrence with the preconditioner
/// applied to the search directions (`z = M p`, `z = M s`) so the updates to
/// `x` stay in the original variable and the stopping metric is the true
/// residual norm `||r||_2`, checked at the top of each body.
///
/// Initializing `rho_old = alpha = omega = 1` with `p = v = 0` makes the
/// first body reduce to `p = r` without a special case. The mid-body exit on
/// `||s|| < tau` counts as a completed iteration. Exact zero denominators
/// (`rho`, `r_hat . v`, `t . t`) and a zero `omega` are breakdowns: the
/// entry stops with `final_metric = NaN` and `converged = false`.
#[allow(clippy::too_many_arguments)]
pub(super) fn bicgstab_entry<M: BatchMatrix, P: ApplyEntry>(
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
) -> EntryOutcome {
    let n = b.len();
    let (r, r_hat, p, v, s, t, z) = ws.bicgstab_slices();

    // r = b - A x, r_hat = r, p = v = 0
    spmv_entry_chunked(a, k, x, t, row_chunk);
    for i in 0..n {
        r[i] = b[i] - t[i];
    }
    r_hat.copy_from_slice(r);
    p.fill(0.0);
    v.fill(0.0);

    let mut rho_old = 1.0;
    let mut alpha = 1.0;
    let mut omega = 1.0;
    let mut metric = entry::norm2(r);

    let tau = match tol_mode {
        TolMode::Absolute => tol,
        TolMode::Relative => {
            if metric == 0.0 {
                tol
            } else {
                tol * metric
            }
        }
    };

    let mut iters = 0usize;
    let mut breakdown = false;
    for _ in 0..max_iters {
        if metric < tau {
            break;
        }
        let rho = entry::dot(r_hat, r);
        if rho == 0.0 {
            breakdown = true;
            break;
        }
        let beta = (rho / rho_old) * (alpha / omega);
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        precond.apply_entry(k, p, z); // z = M p
        spmv_entry_chunked(a, k, z, v, row_chunk); // v = A z
        let rv = entry::dot(r_hat, v);
        if rv == 0.0 {
            breakdown = true;
            break;
        }
        alpha = rho / rv;
        for i in 0..n {
            s[i] = r[i] - alpha * v[i];
        }
        entry::axpy(alpha, z, x); // x += alpha z
        let s_norm = entry::norm2(s);
        if s_norm < tau {
            r.copy_from_slice(s);
            metric = s_norm;
            iters += 1; // the half step is a full update of x and r
            break;
        }
        precond.apply_entry(k, s, z); // z = M s
        spmv_entry_chunked(a, k, z, t, row_chunk); // t = A z
        let tt = entry::dot(t, t);
        if tt == 0.0 {
            breakdown = true;
            break;
        }
        omega = entry::dot(t, s) / tt;
        entry::axpy(omega, z, x); // x += omega z
        for i in 0..n {
            r[i] = s[i] - omega * t[i];
        }
        metric = entry::norm2(r);
        rho_old = rho;
        iters += 1;
        if omega == 0.0 {
            // The body completed, but the next beta would divide by zero.
            breakdown = true;
            break;
        }
    }

    let (converged, final_metric) = if breakdown {
        (false, f64::NAN)
    } else {
        (metric < tau, metric)
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
