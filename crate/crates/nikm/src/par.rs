//! Data-parallel helpers. With the `parallel` feature the default entry
//! points run on rayon; without it they fall back to sequential loops. The
//! explicit `_seq` variants are always available for comparison.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub fn map_seq<T, R>(items: &[T], f: impl Fn(&T) -> R) -> Vec<R> {
    items.iter().map(f).collect()
}

pub fn find_map_first_seq<T, R>(items: &[T], f: impl Fn(&T) -> Option<R>) -> Option<R> {
    items.iter().find_map(f)
}

#[cfg(feature = "parallel")]
pub fn map_par<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    items.par_iter().map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn find_map_first_par<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> Option<R> + Sync + Send) -> Option<R> {
    items.par_iter().find_map_first(f)
}

/// Order-preserving map.
pub fn map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    #[cfg(feature = "parallel")]
    {
        map_par(items, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_seq(items, f)
    }
}

/// First item (in slice order) for which `f` returns `Some`.
pub fn find_map_first<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> Option<R> + Sync + Send) -> Option<R> {
    #[cfg(feature = "parallel")]
    {
        find_map_first_par(items, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        find_map_first_seq(items, f)
    }
}
