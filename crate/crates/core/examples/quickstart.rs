use batchsolve_core::{
    batch_cg, generate_stencil_batch, BatchMultiVector, PrecondKind, SolveConfig, SolverKind,
    TolMode,
};

fn main() -> Result<(), batchsolve_core::Error> {
    // 1000 tridiagonal systems of 64 rows, each with its own diagonal shift.
    let a = generate_stencil_batch(1000, 64, 42)?;
    let b = BatchMultiVector::constant(1000, 64, 1.0);

    let config = SolveConfig::new(SolverKind::Cg, 1e-10, TolMode::Relative, 128)
        .with_precond(PrecondKind::Jacobi);
    let result = batch_cg(&a, &b, None, &config)?;

    assert!(result.all_converged());
    println!("worst entry took {} iterations", result.max_iterations());
    Ok(())
}
