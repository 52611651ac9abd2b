//! Data-parallel execution over fixed index partitions.
//!
//! Heavy reductions (Ryser subsets, Monte Carlo sample chunks) are split into
//! chunks whose boundaries depend only on the problem size, never on the
//! thread count. Chunk results are combined in index order, so the outcome is
//! identical whether the chunks run on one thread or many — bit-identical in
//! float mode, exactly equal in rational mode.
//!
//! The `parallel` feature (default) maps chunks over rayon's global pool;
//! without it the same chunks run sequentially.

/// Evaluates `f(0), ..., f(n-1)` and returns the results in index order.
#[cfg(feature = "parallel")]
pub fn map_collect<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Send + Sync,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

/// Evaluates `f(0), ..., f(n-1)` and returns the results in index order.
#[cfg(not(feature = "parallel"))]
pub fn map_collect<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Send + Sync,
{
    map_collect_seq(n, f)
}

/// Sequential reference path, always available (benchmarks compare against it).
pub fn map_collect_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

/// Number of chunks covering `n` items at `chunk` items apiece.
pub fn chunk_count(n: usize, chunk: usize) -> usize {
    n.div_ceil(chunk)
}
