//! Execution policy for grid sweeps.
//!
//! Every quadrature loop maps over grid rows and folds the per-row results
//! in row order. Both the rayon path and the sequential fallback perform
//! identical floating-point operations in identical order; only the
//! scheduling differs, so outputs are bit-identical across the two builds.

/// True when the rayon path is compiled in (`parallel` feature).
pub const PARALLEL: bool = cfg!(feature = "parallel");

#[cfg(feature = "parallel")]
pub(crate) fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Send + Sync,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Send + Sync,
{
    (0..n).map(f).collect()
}
