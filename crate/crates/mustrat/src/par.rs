//! Data-parallel helpers with a sequential fallback.
//!
//! The `parallel` feature (on by default) backs `par_map` with rayon; without
//! it the same call runs serially. Benchmarks flip the runtime switch to
//! compare the two paths inside one build.

use std::sync::atomic::{AtomicBool, Ordering};

static FORCE_SERIAL: AtomicBool = AtomicBool::new(false);

/// Force the sequential path at runtime (used by benchmarks and `--no-parallel`).
pub fn set_force_serial(v: bool) {
    FORCE_SERIAL.store(v, Ordering::SeqCst);
}

pub fn force_serial() -> bool {
    FORCE_SERIAL.load(Ordering::SeqCst)
}

#[cfg(feature = "parallel")]
pub fn par_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    if force_serial() {
        items.into_iter().map(f).collect()
    } else {
        items.into_par_iter().map(f).collect()
    }
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

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn par_map_matches_serial() {
        let v: Vec<u64> = (0..100).collect();
        let a = par_map(v.clone(), |x| x * x);
        set_force_serial(true);
        let b = par_map(v, |x| x * x);
        set_force_serial(false);
        assert_eq!(a, b);
    }
}
