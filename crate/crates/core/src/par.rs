//! Execution-mode plumbing. Every bulk operation goes through `build_vec`
//! or `rows_mut`, so the parallel and sequential paths share one kernel
//! and produce bitwise-identical output: parallel writes land in disjoint
//! per-index slots and reductions stay sequential.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunMode {
    Sequential,
    Parallel,
}

impl Default for RunMode {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            RunMode::Parallel
        } else {
            RunMode::Sequential
        }
    }
}

impl RunMode {
    pub fn label(self) -> &'static str {
        match self {
            RunMode::Sequential => "sequential",
            RunMode::Parallel => "parallel",
        }
    }
}

/// Collect `f(0..n)` in index order.
pub fn build_vec<U, F>(mode: RunMode, n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    match mode {
        RunMode::Sequential => (0..n).map(f).collect(),
        RunMode::Parallel => {
            #[cfg(feature = "parallel")]
            {
                use rayon::prelude::*;
                (0..n).into_par_iter().map(f).collect()
            }
            #[cfg(not(feature = "parallel"))]
            {
                (0..n).map(f).collect()
            }
        }
    }
}

/// Apply `f(row_index, row_slice)` to consecutive `width`-sized rows.
pub fn rows_mut<T, F>(mode: RunMode, data: &mut [T], width: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    assert_eq!(data.len() % width, 0);
    match mode {
        RunMode::Sequential => {
            for (i, row) in data.chunks_mut(width).enumerate() {
                f(i, row);
            }
        }
        RunMode::Parallel => {
            #[cfg(feature = "parallel")]
            {
                use rayon::prelude::*;
                data.par_chunks_mut(width).enumerate().for_each(|(i, row)| f(i, row));
            }
            #[cfg(not(feature = "parallel"))]
            {
                for (i, row) in data.chunks_mut(width).enumerate() {
                    f(i, row);
                }
            }
        }
    }
}

/// Cap the worker pool. Call once at startup; later calls are ignored by
/// the pool builder and reported as `false`.
pub fn limit_threads(n: usize) -> bool {
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_ok()
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = n;
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_vec_preserves_index_order() {
        let seq = build_vec(RunMode::Sequential, 1000, |i| i * i);
        let par = build_vec(RunMode::Parallel, 1000, |i| i * i);
        assert_eq!(seq, par);
        assert_eq!(seq[37], 37 * 37);
    }

    #[test]
    fn rows_mut_touches_disjoint_rows() {
        let mut a = vec![0usize; 12];
        let mut b = vec![0usize; 12];
        rows_mut(RunMode::Sequential, &mut a, 4, |i, row| {
            for (j, x) in row.iter_mut().enumerate() {
                *x = 10 * i + j;
            }
        });
        rows_mut(RunMode::Parallel, &mut b, 4, |i, row| {
            for (j, x) in row.iter_mut().enumerate() {
                *x = 10 * i + j;
            }
        });
        assert_eq!(a, b);
        assert_eq!(a[5], 11);
    }
}
