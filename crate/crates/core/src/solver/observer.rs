use alloc::vec::Vec;

/// Per-iteration instrumentation hook for the CG loop.
///
/// The fused kernel is generic over the observer, so the no-op implementation
/// compiles away entirely and the production loop carries no tracing cost.
pub trait CgObserver {
    /// Called once per completed iteration body with the scalars of that
    /// body and the freshly updated iterate and residual. `rho` is the
    /// value that produced `alpha` (i.e. the metric entering the body).
    fn cg_step(&mut self, entry: usize, iter: usize, rho: f64, alpha: f64, x: &[f64], r: &[f64]);
}

/// Observer that records nothing.
#[derive(Debug, Default, Clone, Copy)]
pub struct NoObserver;

impl CgObserver for NoObserver {
    #[inline]
    fn cg_step(&mut self, _: usize, _: usize, _: f64, _: f64, _: &[f64], _: &[f64]) {}
}

/// One recorded CG iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct CgStep {
    pub entry: usize,
    pub iter: usize,
    pub rho: f64,
    pub alpha: f64,
    pub x: Vec<f64>,
    pub r: Vec<f64>,
}

/// Observer that snapshots every iteration of every entry, in solve order.
#[derive(Debug, Default, Clone)]
pub struct CgTrace {
    pub steps: Vec<CgStep>,
}

impl CgTrace {
    /// Steps belonging to one batch entry, in iteration order.
    pub fn entry_steps(&self, entry: usize) -> impl Iterator<Item = &CgStep> {
        self.steps.iter().filter(move |s| s.entry == entry)
    }
}

impl CgObserver for CgTrace {
    fn cg_step(&mut self, entry: usize, iter: usize, rho: f64, alpha: f64, x: &[f64], r: &[f64]) {
        self.steps.push(CgStep {
            entry,
            iter,
            rho,
            alpha,
            x: x.to_vec(),
            r: r.to_vec(),
        });
    }
}
