//! Data-parallel map helpers. With the `parallel` feature (default) the
//! indexed maps fan out over the rayon pool; without it they run
//! sequentially. Both paths produce results in index order, so outputs are
//! bit-identical regardless of feature flags or worker count.

/// Maps `f` over `0..count`, parallel when the feature is enabled.
pub fn map_indexed<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..count).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..count).map(f).collect()
    }
}

/// Sequential variant, always available (benchmark baseline).
pub fn map_indexed_seq<T, F>(count: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..count).map(f).collect()
}
