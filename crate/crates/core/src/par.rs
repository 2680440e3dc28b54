//! Data-parallel helpers. With the `parallel` feature the work is spread
//! over the rayon pool; without it, or under [`Parallelism::Sequential`],
//! everything runs on the calling thread. Output order is identical either way.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    Sequential,
    #[default]
    Parallel,
}

impl Parallelism {
    /// Whether work actually fans out, given the compiled feature set.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Parallelism::Parallel
    }
}

/// Order-preserving map over a slice.
pub fn map<T, R, F>(mode: Parallelism, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = mode;
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree_on_order() {
        let xs: Vec<u64> = (0..1000).collect();
        let seq = map(Parallelism::Sequential, &xs, |x| x * x);
        let par = map(Parallelism::Parallel, &xs, |x| x * x);
        assert_eq!(seq, par);
    }
}
