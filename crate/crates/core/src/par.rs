//! Data-parallel sweeps with a sequential fallback.
//!
//! With the `parallel` feature (default) [`map`] fans out over rayon's
//! global pool; without it, it is [`map_sequential`]. Results are returned
//! in input order in both cases and every item is computed independently,
//! so the two paths produce bit-identical output.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Apply `f` to every item, in parallel when the `parallel` feature is on.
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_sequential(items, f)
    }
}

/// Apply `f` to every item on the calling thread.
pub fn map_sequential<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

/// Whether [`map`] runs on the rayon pool in this build.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
