//! Minimal scoped-thread helpers; results never depend on scheduling.

use std::thread;

pub fn threads() -> usize {
    thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(16)
}

/// The failure of the lowest-indexed item that fails, if any.
pub fn find_first<T: Sync, F>(items: &[T], f: F) -> Option<String>
where
    F: Fn(&T) -> Option<String> + Sync,
{
    let chunk = items.len().div_ceil(threads()).max(1);
    thread::scope(|s| {
        let hs: Vec<_> = items.chunks(chunk).map(|c| s.spawn(|| c.iter().find_map(&f))).collect();
        hs.into_iter().find_map(|h| h.join().expect("worker panicked"))
    })
}

/// Map in parallel, keeping input order.
pub fn map<T: Sync, R: Send, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R + Sync,
{
    let chunk = items.len().div_ceil(threads()).max(1);
    thread::scope(|s| {
        let hs: Vec<_> = items.chunks(chunk).map(|c| s.spawn(|| c.iter().map(&f).collect::<Vec<_>>())).collect();
        hs.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}
