//! Data-parallel execution helpers.
//!
//! With the default `parallel` feature, corpus-level loops run on a rayon
//! thread pool; built without it, the same helpers run sequentially. Both
//! builds preserve input order, so results are byte-identical regardless of
//! feature set or worker count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Order-preserving map over a slice.
#[cfg(feature = "parallel")]
pub fn map_ordered<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}

/// Order-preserving map over a slice.
#[cfg(not(feature = "parallel"))]
pub fn map_ordered<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Run `f` with a bounded worker count.
///
/// `jobs = Some(n)` caps the pool at `n` threads; `None` uses the default
/// pool. Sequential builds run `f` directly and ignore `jobs`.
#[cfg(feature = "parallel")]
pub fn with_jobs<R, F>(jobs: Option<usize>, f: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    match jobs {
        Some(n) if n > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool construction")
            .install(f),
        _ => f(),
    }
}

/// Run `f` with a bounded worker count (no-op bound in sequential builds).
#[cfg(not(feature = "parallel"))]
pub fn with_jobs<R, F>(_jobs: Option<usize>, f: F) -> R
where
    F: FnOnce() -> R,
{
    f()
}
