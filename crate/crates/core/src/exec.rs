//! Order-preserving parallel map. Output order is the input index order no
//! matter how the work is split, so every reduction done on the result is
//! independent of the worker count.

#[cfg(feature = "parallel")]
pub(crate) fn ordered_map<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..len).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn ordered_map<T, F>(len: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..len).map(f).collect()
}
