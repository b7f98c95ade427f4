//! Thin switch between rayon and sequential iteration.
//!
//! With the `parallel` feature disabled every helper runs on the calling
//! thread. With it enabled, callers can still request sequential execution at
//! runtime, which is what the benches use to compare both paths.

/// Map `f` over `items`, preserving order.
pub fn map_collect<T, R, F>(items: Vec<T>, parallel: bool, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if parallel {
            use rayon::prelude::*;
            return items.into_par_iter().map(f).collect();
        }
    }
    let _ = parallel;
    items.into_iter().map(f).collect()
}

/// Run `f` on every fixed-size chunk of `data`.
pub fn for_each_chunk_mut<T, F>(data: &mut [T], chunk: usize, parallel: bool, f: F)
where
    T: Send,
    F: Fn(&mut [T]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if parallel {
            use rayon::prelude::*;
            data.par_chunks_mut(chunk).for_each(f);
            return;
        }
    }
    let _ = parallel;
    data.chunks_mut(chunk).for_each(f);
}

pub fn enabled() -> bool {
    cfg!(feature = "parallel")
}
