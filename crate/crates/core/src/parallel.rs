//! Data-parallel map helpers. The `parallel` feature (on by default) routes
//! `par_map` through rayon; without it both helpers run sequentially, so
//! callers never branch on the feature themselves.
//!
//! Every kernel used with `par_map` must be a pure per-item function whose
//! combination is order-independent, so both paths produce identical output.

/// Map `f` over `items`, in parallel when the `parallel` feature is enabled.
/// Output order always matches input order.
#[cfg(feature = "parallel")]
pub fn par_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn par_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    items.into_iter().map(f).collect()
}

/// Sequential map with the same signature as [`par_map`], for benchmarks and
/// for comparing both paths under the same build.
pub fn seq_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    items.into_iter().map(f).collect()
}
