//! Deterministic parallel reduction.
//!
//! Replicas are grouped into fixed-size blocks. Each block is folded
//! sequentially and the block accumulators are merged in block order, so
//! floating-point results do not depend on the size of the thread pool.

use rayon::prelude::*;

pub const BLOCK: usize = 512;

/// Folds `step(acc, i)` over `0..n` and merges block results in order.
pub fn block_reduce<A, I, F, M>(n: usize, init: I, step: F, mut merge: M) -> A
where
    A: Send,
    I: Fn() -> A + Sync,
    F: Fn(&mut A, usize) + Sync,
    M: FnMut(&mut A, A),
{
    let blocks = n.div_ceil(BLOCK);
    let partials: Vec<A> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut acc = init();
            for i in b * BLOCK..((b + 1) * BLOCK).min(n) {
                step(&mut acc, i);
            }
            acc
        })
        .collect();
    let mut total = init();
    for p in partials {
        merge(&mut total, p);
    }
    total
}

/// Order-preserving parallel map over `0..n`.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}
