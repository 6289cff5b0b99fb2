//! Row-level execution strategy shared by the image kernels.
//!
//! Every data-parallel loop in the crate funnels through [`fill_rows`] so
//! that the parallel and sequential paths compute *identical* bytes: work is
//! split by output row only, each row is produced by a pure function of the
//! inputs, and no reductions happen across rows.

/// Fills `out` (length = rows × `row_len`) row by row using `fill`.
///
/// With the `parallel` feature enabled and `parallel = true`, rows are
/// distributed across the rayon pool; otherwise they run in index order.
/// `fill` receives the row index and that row's output slice.
pub(crate) fn fill_rows<T, F>(out: &mut [T], row_len: usize, parallel: bool, fill: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync,
{
    assert!(row_len > 0 && out.len() % row_len == 0);
    #[cfg(feature = "parallel")]
    if parallel {
        use rayon::prelude::*;
        out.par_chunks_mut(row_len)
            .enumerate()
            .for_each(|(y, row)| fill(y, row));
        return;
    }
    let _ = parallel;
    for (y, row) in out.chunks_mut(row_len).enumerate() {
        fill(y, row);
    }
}

/// Maps `items` to a vector, in parallel when available.
///
/// Results are always in input order regardless of execution order.
#[allow(dead_code)]
pub(crate) fn map_indexed<T, U, F>(items: &[T], parallel: bool, f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(usize, &T) -> U + Sync,
{
    #[cfg(feature = "parallel")]
    if parallel {
        use rayon::prelude::*;
        return items.par_iter().enumerate().map(|(i, t)| f(i, t)).collect();
    }
    let _ = parallel;
    items.iter().enumerate().map(|(i, t)| f(i, t)).collect()
}
