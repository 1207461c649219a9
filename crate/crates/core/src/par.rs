//! Data-parallel map helpers with a sequential fallback.
//!
//! With the `parallel` feature (default), [`map_indexed`] fans work out on
//! the rayon pool; without it, the same call runs a plain iterator. Results
//! are always collected in input-index order, so both paths — and any thread
//! count — produce identical output.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Pin the global worker count (first call wins). No-op in sequential
/// builds.
#[cfg(feature = "parallel")]
pub fn configure_workers(n: usize) {
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
}

/// Pin the global worker count (first call wins). No-op in sequential
/// builds.
#[cfg(not(feature = "parallel"))]
pub fn configure_workers(_n: usize) {}

/// Map `f` over `0..n`, preserving index order in the output.
#[cfg(feature = "parallel")]
pub fn map_indexed<O, F>(n: usize, f: F) -> Vec<O>
where
    O: Send,
    F: Fn(usize) -> O + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

/// Map `f` over `0..n`, preserving index order in the output.
#[cfg(not(feature = "parallel"))]
pub fn map_indexed<O, F>(n: usize, f: F) -> Vec<O>
where
    O: Send,
    F: Fn(usize) -> O + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Sequential variant, always available; the criterion benches compare this
/// against [`map_indexed`] on the same workloads.
pub fn map_indexed_seq<O, F>(n: usize, f: F) -> Vec<O>
where
    O: Send,
    F: Fn(usize) -> O + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Map `f` over a slice, preserving order.
#[cfg(feature = "parallel")]
pub fn map_slice<I, O, F>(items: &[I], f: F) -> Vec<O>
where
    I: Sync,
    O: Send,
    F: Fn(&I) -> O + Sync + Send,
{
    items.par_iter().map(f).collect()
}

/// Map `f` over a slice, preserving order.
#[cfg(not(feature = "parallel"))]
pub fn map_slice<I, O, F>(items: &[I], f: F) -> Vec<O>
where
    I: Sync,
    O: Send,
    F: Fn(&I) -> O + Sync + Send,
{
    items.iter().map(f).collect()
}
