//! Data-parallel helpers.
//!
//! With the `parallel` feature (default) work items are spread over the rayon
//! pool; without it everything runs on the calling thread. Results always come
//! back in index order so reductions done by the caller are deterministic and
//! independent of the worker count.

use std::ops::Range;

/// Maps `f` over `range`, returning results in index order.
#[cfg(feature = "parallel")]
pub fn map_collect<T, F>(range: Range<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    range.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_collect<T, F>(range: Range<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    range.map(f).collect()
}

/// Maps `f` over a slice, returning results in order.
pub fn map_slice<S, T, F>(items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    map_collect(0..items.len(), |i| f(&items[i]))
}

/// Maximum of `f` over `range` (`f64::NEG_INFINITY` for an empty range).
pub fn max_over<F>(range: Range<usize>, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    map_collect(range, f)
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Caps the global pool at `threads` workers. Must run before any parallel
/// work; a no-op in sequential builds.
#[cfg(feature = "parallel")]
pub fn set_threads(threads: usize) -> crate::Result<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| crate::Error::Precondition(format!("cannot size the thread pool: {e}")))
}

#[cfg(not(feature = "parallel"))]
pub fn set_threads(_threads: usize) -> crate::Result<()> {
    Ok(())
}

/// Whether this build spreads work over a thread pool.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn results_come_back_in_order() {
        let v = map_collect(0..1000, |i| i * 2);
        assert!(v.iter().enumerate().all(|(i, &x)| x == 2 * i));
    }

    #[test]
    fn max_of_empty_range() {
        assert_eq!(max_over(0..0, |_| 1.0), f64::NEG_INFINITY);
        assert_eq!(max_over(0..5, |i| i as f64), 4.0);
    }
}
