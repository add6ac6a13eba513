//! Data-parallel map helpers shared by the downstream crates.
//!
//! With the (default) `parallel` feature [`par_map`] and
//! [`par_map_indices`] fan work out over rayon; without it they call the
//! sequential implementations, which stay public so benchmarks can compare
//! the two paths in one binary. Both paths preserve input order, so every
//! caller produces identical output regardless of feature selection or
//! thread count — parallelism here is strictly a throughput knob, never a
//! semantics knob.

/// Maps `f` over `items` sequentially, preserving order. This is the exact
/// code [`par_map`] degrades to without the `parallel` feature.
pub fn seq_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Maps `f` over `0..n` sequentially, preserving index order. This is the
/// exact code [`par_map_indices`] degrades to without the `parallel`
/// feature.
pub fn seq_map_indices<U, F>(n: usize, f: F) -> Vec<U>
where
    F: Fn(usize) -> U,
{
    (0..n).map(f).collect()
}

/// Maps `f` over `items`, preserving order.
pub fn par_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        seq_map(items, f)
    }
}

/// Maps `f` over `0..n`, preserving index order. Useful when the work is
/// keyed by position (e.g. one synthetic patient per index).
pub fn par_map_indices<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        seq_map_indices(n, f)
    }
}
