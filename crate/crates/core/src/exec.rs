//! Execution helpers shared by every data-parallel loop in the crate.
//!
//! With the `parallel` feature the helpers fan out over rayon's current pool;
//! without it they run sequentially. Every helper applies the same closure to
//! the same inputs in either mode, and results are collected in index order,
//! so outputs never depend on the thread count.

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Whether the crate was built with rayon support.
pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

/// Run `f` inside a pool with `threads` workers. `threads == 0` uses the
/// global pool. Without the `parallel` feature this just calls `f`.
pub fn with_threads<R, F>(threads: usize, f: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    #[cfg(feature = "parallel")]
    {
        if threads == 0 {
            return f();
        }
        match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        f()
    }
}

/// `f(i)` for every `i` in `range`, in index order.
pub fn map_range<T, F>(range: Range<u64>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        range.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        range.map(f).collect()
    }
}

/// Fallible variant of [`map_range`]; the first error in index order wins.
pub fn try_map_range<T, E, F>(range: Range<u64>, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(u64) -> Result<T, E> + Sync + Send,
{
    map_range(range, f).into_iter().collect()
}

/// Calls `f(chunk_index, chunk)` on consecutive chunks of `chunk` elements.
pub fn for_each_chunk_mut<T, F>(data: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    let chunk = chunk.max(1);
    #[cfg(feature = "parallel")]
    {
        data.par_chunks_mut(chunk)
            .enumerate()
            .for_each(|(i, c)| f(i, c));
    }
    #[cfg(not(feature = "parallel"))]
    {
        data.chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
    }
}

/// Element-wise `f(&mut dst[i], &src[i])`.
pub fn zip_apply<T, F>(dst: &mut [T], src: &[T], f: F)
where
    T: Send + Sync,
    F: Fn(&mut T, &T) + Sync + Send,
{
    debug_assert_eq!(dst.len(), src.len());
    #[cfg(feature = "parallel")]
    {
        dst.par_iter_mut().zip(src.par_iter()).for_each(|(d, s)| f(d, s));
    }
    #[cfg(not(feature = "parallel"))]
    {
        dst.iter_mut().zip(src.iter()).for_each(|(d, s)| f(d, s));
    }
}

/// Sum of `f(i)` over `range` with integer accumulation.
pub fn count_range<F>(range: Range<u64>, f: F) -> u64
where
    F: Fn(u64) -> u64 + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        range.into_par_iter().map(f).sum()
    }
    #[cfg(not(feature = "parallel"))]
    {
        range.map(f).sum()
    }
}
