//! A bounded worker pool with order-preserving results.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

/// Run `f` over `items` on at most `workers` threads. Results come back in
/// input order regardless of completion order.
pub fn run_pool<T, R, F>(items: Vec<T>, workers: usize, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync,
{
    let n = items.len();
    if n == 0 {
        return Vec::new();
    }
    let workers = workers.max(1).min(n);
    if workers == 1 {
        return items.into_iter().map(f).collect();
    }

    let queue: Mutex<Vec<Option<T>>> =
        Mutex::new(items.into_iter().map(Some).collect());
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<R>>> =
        Mutex::new((0..n).map(|_| None).collect());

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::SeqCst);
                if idx >= n {
                    break;
                }
                let item = queue.lock().expect("pool queue")[idx]
                    .take()
                    .expect("each index is claimed once");
                let result = f(item);
                results.lock().expect("pool results")[idx] = Some(result);
            });
        }
    });

    results
        .into_inner()
        .expect("pool results")
        .into_iter()
        .map(|r| r.expect("every item completed"))
        .collect()
}
