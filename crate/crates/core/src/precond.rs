//! Batch preconditioners.
//!
//! The solver loops are generic over [`ApplyEntry`], so each (solver,
//! preconditioner) pair compiles to its own fused loop with the application
//! inlined; no per-iteration dispatch remains. [`Preconditioner`] is the
//! runtime-selected wrapper that harness code holds; solver entry points
//! match on it once, outside all loops.

use alloc::format;
use alloc::vec::Vec;

use crate::error::Error;
use crate::formats::{BatchMatrix, BatchMultiVector};

/// Application of one preconditioner entry to one residual plane:
/// `z = M_k r`.
pub trait ApplyEntry {
    fn apply_entry(&self, entry: usize, r: &[f64], z: &mut [f64]);
}

/// The do-nothing preconditioner, `z = r`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Identity;

impl ApplyEntry for Identity {
    #[inline]
    fn apply_entry(&self, _entry: usize, r: &[f64], z: &mut [f64]) {
        z.copy_from_slice(r);
    }
}

/// Scalar Jacobi: per entry, the inverse of the matrix diagonal.
///
/// Its workspace is one vector of `num_rows` reciprocals per entry,
/// entry-major like every other batch object.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchJacobi {
    num_systems: usize,
    num_rows: usize,
    inv_diag: Vec<f64>,
}

impl BatchJacobi {
    pub fn num_systems(&self) -> usize {
        self.num_systems
    }

    pub fn num_rows(&self) -> usize {
        self.num_rows
    }

    /// Reciprocal diagonal of entry `k`.
    pub fn inv_diag_entry(&self, k: usize) -> &[f64] {
        &self.inv_diag[k * self.num_rows..(k + 1) * self.num_rows]
    }
}

impl ApplyEntry for BatchJacobi {
    #[inline]
    fn apply_entry(&self, entry: usize, r: &[f64], z: &mut [f64]) {
        let inv = self.inv_diag_entry(entry);
        for i in 0..r.len() {
            z[i] = inv[i] * r[i];
        }
    }
}

/// Extract and invert the diagonal of every entry of `a`.
///
/// Fails with [`Error::SingularDiagonal`] naming the first entry and row
/// whose diagonal is missing from the pattern or stored as exactly zero.
pub fn generate_jacobi<M: BatchMatrix>(a: &M) -> Result<BatchJacobi, Error> {
    let (ns, nr) = (a.num_systems(), a.num_rows());
    let mut inv_diag = Vec::with_capacity(ns * nr);
    for entry in 0..ns {
        for row in 0..nr {
            match a.diag_value(entry, row) {
                Some(d) if d != 0.0 => inv_diag.push(1.0 / d),
                _ => return Err(Error::SingularDiagonal { entry, row }),
            }
        }
    }
    Ok(BatchJacobi {
        num_systems: ns,
        num_rows: nr,
        inv_diag,
    })
}

/// Runtime-selected preconditioner.
#[derive(Debug, Clone)]
pub enum Preconditioner {
    Identity,
    Jacobi(BatchJacobi),
}

impl Preconditioner {
    /// Short lowercase name, matching the CLI `--precond` values.
    pub fn name(&self) -> &'static str {
        match self {
            Preconditioner::Identity => "none",
            Preconditioner::Jacobi(_) => "jacobi",
        }
    }

    /// `z_k = M_k r_k` for every entry, as a standalone batch operation.
    pub fn apply(&self, r: &BatchMultiVector) -> Result<BatchMultiVector, Error> {
        if let Preconditioner::Jacobi(j) = self {
            if j.num_systems != r.num_systems() || j.num_rows != r.length() {
                return Err(Error::ShapeMismatch(format!(
                    "preconditioner built for {} systems of {} rows, applied to {} systems of {}",
                    j.num_systems,
                    j.num_rows,
                    r.num_systems(),
                    r.length()
                )));
            }
        }
        let mut z = BatchMultiVector::zeros(r.num_systems(), r.length());
        for k in 0..r.num_systems() {
            self.apply_entry(k, r.entry(k), z.entry_mut(k));
        }
        Ok(z)
    }
}

impl ApplyEntry for Preconditioner {
    #[inline]
    fn apply_entry(&self, entry: usize, r: &[f64], z: &mut [f64]) {
        match self {
            Preconditioner::Identity => Identity.apply_entry(entry, r, z),
            Preconditioner::Jacobi(j) => j.apply_entry(entry, r, z),
        }
    }
}
